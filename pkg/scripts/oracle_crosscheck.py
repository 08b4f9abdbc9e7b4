"""Ask the semantic oracle about every checked closed judgment under a range of budgets.

    python3 scripts/oracle_crosscheck.py --enum-depths 2 4 --fresh-clock-times 1 3 5
"""

from __future__ import annotations

import collections
import dataclasses
import itertools
import json
import sys
from dataclasses import dataclass
from importlib import resources

from gctt import program as P
from gctt.elaborate import elab_term, generic_env
from gctt.opsem import Tri
from gctt.rules import EqMem, check_script, load_script
from gctt.semantics import OracleBudget, World, clock_sensitive, member_detail

from _config import parse_config


@dataclass(frozen=True)
class CrossCheckConfig:
    scripts: tuple[str, ...] = ("streams.gctt", "canonicity.gctt")
    level: int = 2
    max_time: int = 3
    enum_depths: tuple[int, ...] = (4,)
    fresh_clock_times: tuple[int, ...] = (1, 3)
    out: str = ""


def judgments(names):
    for name in names:
        text = resources.files("gctt").joinpath("library", name).read_text()
        script = load_script(text)
        for lem, rep in zip(script.lemmas, check_script(text)):
            if rep.ok and isinstance(lem.judgment, EqMem) and not lem.judgment.ctx:
                yield lem.name, lem.judgment


def worlds(clocks, max_time):
    dom = [P.ClockName(k) for k in clocks] or [P.ClockName("w0")]
    for ts in itertools.product(range(max_time + 1), repeat=len(dom)):
        yield World(tuple(zip(dom, ts)))


def run(cfg: CrossCheckConfig) -> list[dict]:
    rows = []
    for name, j in judgments(cfg.scripts):
        rho = generic_env(j.clocks)
        m0, m1, ty = (elab_term(j.clocks, [], t, rho) for t in (j.lhs, j.rhs, j.ty))
        sampled = any(clock_sensitive(m) for m in (m0, m1, ty))
        for enum, fresh in itertools.product(cfg.enum_depths, cfg.fresh_clock_times):
            budget = OracleBudget(enum_depth=enum, fresh_clock_times=fresh)
            tally = collections.Counter()
            for w in worlds(j.clocks, cfg.max_time):
                ans, _ = member_detail(w, m0, m1, ty, cfg.level, budget)
                tally[ans.value] += 1
            rows.append({"lemma": name, "enum_depth": enum, "fresh_clock_times": fresh,
                         "sampled_clocks": sampled, **tally})
    return rows


def main(argv=None) -> int:
    cfg = parse_config(CrossCheckConfig, __doc__.splitlines()[0], argv)
    rows = run(cfg)
    for r in rows:
        mark = " (sampled clock quantifier)" if r["sampled_clocks"] else ""
        print(f"{r['lemma']:<22} enum={r['enum_depth']} fresh={r['fresh_clock_times']}  "
              f"Yes {r.get('Yes', 0):>3}  No {r.get('No', 0):>3}  "
              f"Unknown {r.get('Unknown', 0):>3}{mark}")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": dataclasses.asdict(cfg), "rows": rows}, fh, indent=2)
    return 1 if any(r.get(Tri.NO.value) for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
