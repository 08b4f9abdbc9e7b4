"""Sweep the forcing theorems over truncation sizes and report pass/fail and timings.

    python3 scripts/forcing_sweep.py --time-bounds 1 2 3 --out sweep.json

A pool of three clocks takes minutes per theorem, mostly in the implication clause.
"""

from __future__ import annotations

import dataclasses
import json
import sys
import time
from dataclasses import dataclass

from gctt.forcing import THEOREMS, TruncParams, check_theorem, world_count

from _config import parse_config


@dataclass(frozen=True)
class SweepConfig:
    pools: tuple[int, ...] = (2,)
    time_bounds: tuple[int, ...] = (1, 2, 3)
    headrooms: tuple[int, ...] = (0, 1)
    family_limit: int = 4096
    include_negative_control: bool = True
    out: str = ""


def show(r: dict) -> str:
    head = f"P={r['pool']} T={r['time_bound']} h={r['headroom']}"
    if "skipped" in r:
        return f"{head:<16} skipped: {r['skipped']}"
    where = f" at {r['counterexample']['world']}" if r["counterexample"] else ""
    return (f"{head:<16} {r['theorem']:<18} {r['status']:<14} {r['instances']:>7} instances "
            f"{r['seconds']:>7.2f}s{where}")


def run(cfg: SweepConfig, progress=None) -> list[dict]:
    names = list(THEOREMS) + (["negative_control"] if cfg.include_negative_control else [])
    rows = []
    for pool in cfg.pools:
        for bound in cfg.time_bounds:
            for headroom in cfg.headrooms:
                try:
                    params = TruncParams.sized(pool, bound, headroom).validate()
                except ValueError as e:
                    rows.append({"pool": pool, "time_bound": bound, "headroom": headroom,
                                 "skipped": str(e)})
                    if progress:
                        progress(rows[-1])
                    continue
                for name in names:
                    start = time.perf_counter()
                    r = check_theorem(name, params, cfg.family_limit)
                    rows.append({"pool": pool, "time_bound": bound, "headroom": headroom,
                                 "worlds": world_count(pool, bound), **r.to_json(),
                                 "seconds": round(time.perf_counter() - start, 3)})
                    if progress:
                        progress(rows[-1])
    return rows


def main(argv=None) -> int:
    cfg = parse_config(SweepConfig, __doc__.splitlines()[0], argv)
    rows = run(cfg, lambda r: print(show(r), flush=True))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"config": dataclasses.asdict(cfg), "rows": rows}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
