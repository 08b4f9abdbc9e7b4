"""Command-line driver: ``gctt <subcommand> ...``.

Exit codes: 0 success, 1 a check failed or found a counterexample, 2 usage or
parse errors. ``--format json`` prints one JSON document tagged with
``SCHEMA``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import forcing as F
from . import opsem
from . import program as P
from . import rules as R
from . import semantics as SEM
from . import syntax as S
from .elaborate import ElabError, elab_term, generic_env

SCHEMA = "gctt/1"
FUEL_ENV = "GCTT_FUEL"


class UsageError(Exception):
    pass


def library_dir():
    return resources.files("gctt").joinpath("library")


def library_files() -> list[str]:
    return sorted(p.name for p in library_dir().iterdir() if p.name.endswith(".gctt"))


def read_source(path: str) -> tuple[str, str]:
    """Contents of ``path``; a missing path falls back to a shipped file of the same name."""
    p = Path(path)
    if p.is_file():
        return str(p), p.read_text(encoding="utf-8")
    shipped = library_dir().joinpath(p.name)
    if p.name.endswith(".gctt") and shipped.is_file():
        return f"<library>/{p.name}", shipped.read_text(encoding="utf-8")
    raise UsageError(f"no such file: {path}")


def default_fuel(fallback: int) -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return fallback
    if not raw.isdigit():
        raise UsageError(f"{FUEL_ENV} must be a non-negative integer, got {raw!r}")
    return int(raw)


def load_defs(paths: Sequence[str] | None) -> dict:
    defs: dict = {}
    for path in paths or ():
        _, text = read_source(path)
        p = R.ScriptParser(text)
        p.defs = dict(defs)
        defs.update(p.parse().defs)
    return defs


def closed_program(text: str, defs: dict, clocks: Sequence[str] = ()) -> tuple[S.Term, P.Program]:
    term = S.parse(text, clocks=clocks, defs=defs)
    try:
        return term, elab_term(tuple(clocks), (), term, generic_env(clocks))
    except ElabError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, human text, json payload)

def cmd_parse(a) -> tuple[int, str, dict]:
    defs = load_defs(a.defs)
    if a.input.endswith(".gctt"):
        name, text = read_source(a.input)
        p = R.ScriptParser(text)
        p.defs = dict(defs)
        script = p.parse()
        lines = [f"def {k} := {S.pretty(v)}" for k, v in script.defs.items()]
        lines += [f"lemma {lem.name} : {lem.text}" for lem in script.lemmas]
        return 0, "\n".join(lines), {
            "file": name,
            "defs": {k: S.pretty(v) for k, v in script.defs.items()},
            "lemmas": [{"name": lem.name, "judgment": lem.text}
                       for lem in script.lemmas]}
    term = S.parse(a.input, clocks=a.clock or (), defs=defs)
    out = {"term": S.pretty(term)}
    if not S.free_vars(term):
        prog = elab_term(tuple(a.clock or ()), (), term, generic_env(a.clock or ()))
        out["program"] = P.to_json(prog)
        out["debug"] = P.show(prog)
    return 0, S.pretty(term), out


def cmd_eval(a) -> tuple[int, str, dict]:
    fuel = a.fuel if a.fuel is not None else default_fuel(opsem.DEFAULT_FUEL)
    _, prog = closed_program(a.term, load_defs(a.defs))
    lines = []
    payload: dict = {"fuel": fuel}
    if a.trace:
        steps = [P.show(t) for t in opsem.trace(prog, fuel)]
        lines.extend(steps)
        payload["trace"] = steps
    r = opsem.eval_program(prog, fuel)
    if isinstance(r, opsem.Val):
        payload.update(outcome="value", value=P.to_json(r.value), shown=P.show(r.value), steps=r.steps)
        if not a.trace:
            lines.append(P.show(r.value))
        return 0, "\n".join(lines), payload
    if isinstance(r, opsem.OutOfFuel):
        payload.update(outcome="out_of_fuel", steps=r.steps, residual=P.show(r.residual))
        lines.append(f"out of fuel after {r.steps} steps")
    else:
        payload.update(outcome="stuck", steps=r.steps, reason=r.reason, term=P.show(r.term))
        lines.append(f"stuck after {r.steps} steps: {r.reason}")
    return 1, "\n".join(lines), payload


def cmd_check(a) -> tuple[int, str, dict]:
    fuel = a.fuel if a.fuel is not None else R.DEFAULT_CONV_FUEL
    files = []
    lines = []
    code = 0
    for path in a.files:
        name, text = read_source(path)
        reports = R.check_script(text, fuel=fuel)
        files.append({"file": name, "lemmas": [r.to_json() for r in reports]})
        ok = sum(r.ok for r in reports)
        lines.append(f"{name}: {ok}/{len(reports)} lemma(s) ok")
        for r in reports:
            lines.append(f"  {'ok   ' if r.ok else 'FAIL '} {r.name} : {r.judgment}")
            if not r.ok:
                code = 1
                lines.append(f"        at {r.error.path}")
                lines.append(f"        {r.error.explanation}")
    return code, "\n".join(lines), {"files": files}


def cmd_oracle(a) -> tuple[int, str, dict]:
    world = SEM.parse_world(a.world) if a.world else SEM.World.of({"k": 3})
    clocks = tuple(c.atom for c in world.dom)
    defs = load_defs(a.defs)
    budget = SEM.OracleBudget(a.unfold, a.enum, a.fuel if a.fuel is not None else
                              default_fuel(SEM.OracleBudget().fuel), a.fresh_times)
    _, ty = closed_program(a.type, defs, clocks)
    payload: dict = {"world": {c.atom: t for c, t in world.times}, "level": a.level,
                     "budget": {"unfold": budget.unfold_depth, "enum": budget.enum_depth,
                                "fuel": budget.fuel, "fresh_times": budget.fresh_clock_times}}
    if a.left is None:
        rel = SEM.interp_type(world, ty, a.level, budget)
        if isinstance(rel, SEM.NotAType):
            payload.update(answer="NotAType", reason=rel.reason)
            return 1, f"not a type: {rel.reason}", payload
        if isinstance(rel, SEM.Exhausted):
            payload.update(answer="Unknown", reason=rel.reason)
            return 1, f"Unknown ({rel.reason})", payload
        payload.update(answer="Type", relation=rel.tag)
        return 0, f"type: {rel.tag}", payload
    _, m0 = closed_program(a.left, defs, clocks)
    _, m1 = closed_program(a.right if a.right is not None else a.left, defs, clocks)
    ans, why = SEM.member_detail(world, m0, m1, ty, a.level, budget)
    payload.update(answer=str(ans), detail=why)
    return (0 if ans is opsem.Tri.YES else 1), f"{ans} ({why})", payload


def cmd_canonicity(a) -> tuple[int, str, dict]:
    fuel = a.fuel if a.fuel is not None else default_fuel(opsem.DEFAULT_FUEL)
    name, text = read_source(a.file)
    script = R.load_script(text)
    reports = {r.name: r for r in R.check_script(script)}
    lines, items, code = [], [], 0
    for lem in script.lemmas:
        j = lem.judgment
        if not (isinstance(j, R.EqMem) and j.ty == S.BoolTy() and not j.clocks and not j.ctx
                and j.lhs == j.rhs):
            continue
        rep = reports[lem.name]
        prog = elab_term((), (), j.lhs, {})
        res = SEM.canonicity_check(prog, fuel)
        ok = rep.ok and isinstance(res, SEM.CanonOk)
        code |= 0 if ok else 1
        item = {"lemma": lem.name, "term": S.pretty(j.lhs), "derivation": "ok" if rep.ok else "error"}
        if isinstance(res, SEM.CanonOk):
            item.update(result="Ok", value=res.value, steps=res.steps)
            lines.append(f"{'ok  ' if ok else 'FAIL'} {lem.name}: {S.pretty(j.lhs)} => {res.value} "
                         f"({res.steps} steps)")
        else:
            item.update(result="Fail", reason=res.reason)
            lines.append(f"FAIL {lem.name}: {S.pretty(j.lhs)} => {res.reason}")
        if not rep.ok:
            lines.append(f"     derivation: {rep.error}")
        items.append(item)
    lines.append(f"{sum(1 for i in items if i['result'] == 'Ok' and i['derivation'] == 'ok')}"
                 f"/{len(items)} closed booleans canonical")
    return code, "\n".join(lines), {"file": name, "fuel": fuel, "programs": items}


def cmd_forcing(a) -> tuple[int, str, dict]:
    try:
        p = F.TruncParams.sized(a.pool, a.time_bound, a.headroom).validate()
    except ValueError as e:
        raise UsageError(str(e)) from None
    names = list(F.THEOREMS) if a.theorem == "all" else [a.theorem]
    results, lines, code = [], [], 0
    for n in names:
        try:
            r = F.check_theorem(n, p, limit=a.limit, seed=a.seed)
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        results.append(r.to_json())
        if r.passed:
            lines.append(f"pass {n} ({r.instances} instances)")
        else:
            code = 1
            lines.append(f"counterexample {n}: {json.dumps(r.counterexample)}")
    return code, "\n".join(lines), {"pool": a.pool, "time_bound": a.time_bound,
                                   "time_headroom": a.headroom, "results": results}


def cmd_examples(a) -> tuple[int, str, dict]:
    files = library_files()
    if not a.run:
        return 0, "\n".join(files), {"files": files}
    code, lines, out = 0, [], []
    for f in files:
        reports = R.check_script(read_source(f)[1])
        ok = all(r.ok for r in reports)
        code |= 0 if ok else 1
        lines.append(f"{'ok  ' if ok else 'FAIL'} {f}: {sum(r.ok for r in reports)}/{len(reports)}")
        out.append({"file": f, "ok": ok, "lemmas": len(reports)})
    return code, "\n".join(lines), {"files": out}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gctt", description="ClockCTT kernel, interpreter and oracle.")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
        p.add_argument("--defs", action="append", metavar="FILE",
                       help="take definitions from a .gctt file (repeatable)")
        return p

    p = fmt(sub.add_parser("parse", help="parse a term or a .gctt file and print it back"))
    p.add_argument("input")
    p.add_argument("--clock", action="append", help="free clock allowed in the term")
    p.set_defaults(fn=cmd_parse)

    p = fmt(sub.add_parser("eval", help="evaluate a closed term"))
    p.add_argument("term")
    p.add_argument("--fuel", type=int)
    p.add_argument("--trace", action="store_true", help="print every reduct, one per line")
    p.set_defaults(fn=cmd_eval)

    p = fmt(sub.add_parser("check", help="check the lemmas of .gctt files"))
    p.add_argument("files", nargs="+")
    p.add_argument("--fuel", type=int, help="fuel for open conversion")
    p.set_defaults(fn=cmd_check)

    p = fmt(sub.add_parser("oracle", help="ask the semantic oracle about a type or membership"))
    p.add_argument("--type", required=True, help="the type, closed over the world's clocks")
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    p.add_argument("--world", help='e.g. "k1=2,k2=0" (default k=3)')
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--unfold", type=int, default=SEM.OracleBudget().unfold_depth)
    p.add_argument("--enum", type=int, default=SEM.OracleBudget().enum_depth)
    p.add_argument("--fresh-times", type=int, default=SEM.OracleBudget().fresh_clock_times)
    p.add_argument("--fuel", type=int)
    p.set_defaults(fn=cmd_oracle)

    p = fmt(sub.add_parser("canonicity", help="check and run closed boolean lemmas"))
    p.add_argument("file", nargs="?", default="canonicity.gctt")
    p.add_argument("--fuel", type=int)
    p.set_defaults(fn=cmd_canonicity)

    p = fmt(sub.add_parser("forcing", help="sweep forcing theorems over a finite truncation"))
    p.add_argument("--pool", type=int, default=2)
    p.add_argument("--time-bound", type=int, default=2)
    p.add_argument("--headroom", type=int, default=1, help="extra time steps for quantifiers")
    p.add_argument("--theorem", default="all",
                   help=f"all, negative_control, or one of: {', '.join(F.THEOREMS)}")
    p.add_argument("--limit", type=int, default=4096, help="cap on atom families per slot")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_forcing)

    p = fmt(sub.add_parser("examples", help="list (or --run) the shipped .gctt files"))
    p.add_argument("--run", action="store_true")
    p.set_defaults(fn=cmd_examples)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        code, text, payload = a.fn(a)
    except (UsageError, ValueError) as e:
        if a.format == "json":
            print(json.dumps({"schema": SCHEMA, "command": a.cmd, "error": str(e)}, indent=2))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 2
    if a.format == "json":
        print(json.dumps({"schema": SCHEMA, "command": a.cmd, "exit": code, **payload},
                         indent=2, sort_keys=False))
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
