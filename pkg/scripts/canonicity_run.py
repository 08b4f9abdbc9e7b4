"""Check and run every closed boolean lemma of a script under several fuel limits.

    python3 scripts/canonicity_run.py --fuels 10 1000 100000
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from gctt import rules as R
from gctt import syntax as S
from gctt.elaborate import elab_term
from gctt.semantics import CanonOk, canonicity_check

from _config import parse_config


@dataclass(frozen=True)
class CanonicityConfig:
    script: str = "canonicity.gctt"
    fuels: tuple[int, ...] = (10, 1000, 100_000)
    out: str = ""


def read_script(name: str) -> str:
    path = Path(name)
    if path.exists():
        return path.read_text()
    return resources.files("gctt").joinpath("library", path.name).read_text()


def run(cfg: CanonicityConfig) -> list[dict]:
    text = read_script(cfg.script)
    script = R.load_script(text)
    reports = {r.name: r for r in R.check_script(script)}
    rows = []
    for lem in script.lemmas:
        j = lem.judgment
        if not (isinstance(j, R.EqMem) and j.ty == S.BoolTy() and not j.clocks and not j.ctx):
            continue
        prog = elab_term((), (), j.lhs, {})
        runs = {}
        for fuel in cfg.fuels:
            res = canonicity_check(prog, fuel)
            runs[fuel] = (f"{res.value} in {res.steps}" if isinstance(res, CanonOk)
                          else res.reason)
        rows.append({"lemma": lem.name, "term": S.pretty(j.lhs),
                     "derivation": "ok" if reports[lem.name].ok else str(reports[lem.name].error),
                     "runs": runs})
    return rows


def main(argv=None) -> int:
    cfg = parse_config(CanonicityConfig, __doc__.splitlines()[0], argv)
    rows = run(cfg)
    print(f"{'lemma':<22} {'derivation':<10} " + " ".join(f"{'fuel ' + str(f):>16}" for f in cfg.fuels))
    for r in rows:
        print(f"{r['lemma']:<22} {r['derivation'][:10]:<10} "
              + " ".join(f"{r['runs'][f]:>16}" for f in cfg.fuels))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": dataclasses.asdict(cfg), "rows": rows}, fh, indent=2)
    bad = [r for r in rows if r["derivation"] != "ok" or "in" not in r["runs"][max(cfg.fuels)]]
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
