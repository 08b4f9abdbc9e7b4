"""Small-step evaluation, bounded Kleene equivalence and open conversion."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from . import program as P
from .program import Program

__all__ = [
    "Tri", "StepResult", "Stepped", "Value", "Stuck", "EvalOutcome", "Val", "OutOfFuel",
    "StuckAt", "DEFAULT_FUEL", "is_value", "step", "eval_program", "trace",
    "closed_sq_bounded", "open_conv", "whnf",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_FUEL = 100_000


class Tri(Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value

    def __and__(self, other: "Tri") -> "Tri":
        if self is Tri.NO or other is Tri.NO:
            return Tri.NO
        if self is Tri.UNKNOWN or other is Tri.UNKNOWN:
            return Tri.UNKNOWN
        return Tri.YES


# -- step results

class StepResult:
    __slots__ = ()


@dataclass(frozen=True)
class Stepped(StepResult):
    term: Program


@dataclass(frozen=True)
class Value(StepResult):
    pass


@dataclass(frozen=True)
class Stuck(StepResult):
    reason: str
    neutral: bool = False   # blocked on a free variable (open terms only)


# -- evaluation outcomes

class EvalOutcome:
    __slots__ = ()


@dataclass(frozen=True)
class Val(EvalOutcome):
    value: Program
    steps: int


@dataclass(frozen=True)
class OutOfFuel(EvalOutcome):
    residual: Program
    steps: int


@dataclass(frozen=True)
class StuckAt(EvalOutcome):
    term: Program
    reason: str
    steps: int


_VALUES = (P.Lam, P.KLam, P.Pair, P.Star, P.Tt, P.Ff, P.Ze, P.Su, P.Sup,
           P.Pi, P.Sg, P.WTy, P.Eq, P.Later, P.Isect, P.KProd,
           P.Void, P.Unit, P.Bool, P.Nat, P.Univ)


def is_value(m: Program) -> bool:
    return isinstance(m, _VALUES)


class _Blocked(Exception):
    def __init__(self, reason: str, neutral: bool):
        self.reason, self.neutral = reason, neutral


def _head(m: Program, n: int, what: str) -> Program:
    """Step the principal argument of an eliminator."""
    if isinstance(m, P.Var):
        raise _Blocked(f"{what} of variable", True)
    if is_value(m):
        raise _Blocked(f"{what} of {P.show(m)[:40]}", False)
    r = _step(m, n)
    assert r is not None
    return r


def _step(m: Program, n: int) -> Program | None:
    """One step in scope ``n``; ``None`` for values, ``_Blocked`` when stuck."""
    match m:
        case P.App(f, a):
            if isinstance(f, P.Lam):
                return P.subst_top(f.body, a, n)
            return P.App(_head(f, n, "application"), a)
        case P.CApp(f, kappa):
            if isinstance(f, P.KLam):
                return P.instantiate_clock(f.body, f.bound, kappa)
            return P.CApp(_head(f, n, "clock application"), kappa)
        case P.Fix(body):
            return P.subst_top(body, m, n)
        case P.Fst(a):
            if isinstance(a, P.Pair):
                return a.left
            return P.Fst(_head(a, n, "fst"))
        case P.Snd(a):
            if isinstance(a, P.Pair):
                return a.right
            return P.Snd(_head(a, n, "snd"))
        case P.If(b, t, e):
            if isinstance(b, P.Tt):
                return t
            if isinstance(b, P.Ff):
                return e
            return P.If(_head(b, n, "if"), t, e)
        case P.IfZe(s, z, succ):
            if isinstance(s, P.Ze):
                return z
            if isinstance(s, P.Su):
                return P.subst_top(succ, s.arg, n)
            return P.IfZe(_head(s, n, "ifze"), z, succ)
        case P.WRec(a, body):
            if isinstance(a, P.Sup):
                return _wrec_contract(a, body, n)
            return P.WRec(_head(a, n, "wrec"), body)
        case P.Var(_):
            raise _Blocked("variable", True)
    if is_value(m):
        return None
    raise TypeError(f"not a program: {m!r}")


def _wrec_contract(s: P.Sup, body: Program, n: int) -> Program:
    # body[x := label, y := lam branches, z := lam (wrec (branches) body)]
    branches = s.branches                     # scope n+1
    body_up = P.weaken(body, n, n + 1)        # body re-based under one more binder
    rec = P.Lam(P.WRec(branches, body_up))
    gamma = [P.Var(i) for i in range(n)] + [s.label, P.Lam(branches), rec]
    return P._subst(body, gamma, n + 3, n)


def step(m: Program, scope: int = 0) -> StepResult:
    """One step of the operational semantics (``scope`` > 0 for open terms)."""
    if scope == 0:
        P.check_scope(m, 0)
    try:
        r = _step(m, scope)
    except _Blocked as b:
        return Stuck(b.reason, b.neutral)
    return Value() if r is None else Stepped(r)


_PRINCIPAL = {P.App: "fn", P.CApp: "fn", P.Fst: "arg", P.Snd: "arg",
              P.If: "cond", P.IfZe: "scrut", P.WRec: "arg"}


def _run(m: Program, n: int, fuel: int) -> tuple[Program, int, StepResult]:
    """Reduce ``m`` with an explicit stack of pending eliminators.

    Takes the same steps as iterating ``_step`` but keeps the spine off the
    Python stack, so each step costs time independent of the spine's depth.
    Returns (term reached, steps taken, status of that term)."""
    stack: list[Program] = []      # eliminator nodes waiting for their principal argument
    focus = m
    steps = 0

    def rebuild(t: Program) -> Program:
        for frame in reversed(stack):
            t = P._replace(frame, {_PRINCIPAL[type(frame)]: t})
        return t

    while True:
        field = _PRINCIPAL.get(type(focus))
        if field is not None and not is_value(getattr(focus, field)) \
                and not isinstance(getattr(focus, field), P.Var):
            stack.append(focus)
            focus = getattr(focus, field)
            continue
        try:
            r = _step(focus, n)
        except _Blocked as b:
            return rebuild(focus), steps, Stuck(b.reason, b.neutral)
        if r is None:
            if not stack:
                return focus, steps, Value()
            frame = stack.pop()
            focus = P._replace(frame, {_PRINCIPAL[type(frame)]: focus})
            continue
        if steps >= fuel:
            return rebuild(focus), steps, Stepped(rebuild(r))
        focus = r
        steps += 1


def eval_program(m: Program, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    """Iterate ``step`` on a closed program until a value, stuck term or no fuel."""
    P.check_scope(m, 0)
    t, steps, res = _run(m, 0, fuel)
    if isinstance(res, Value):
        return Val(t, steps)
    if isinstance(res, Stuck):
        return StuckAt(t, res.reason, steps)
    return OutOfFuel(t, steps)


def trace(m: Program, fuel: int = DEFAULT_FUEL) -> Iterator[Program]:
    """The reduction sequence of ``m``, starting with ``m`` itself."""
    P.check_scope(m, 0)
    yield m
    for _ in range(fuel):
        try:
            r = _step(m, 0)
        except _Blocked:
            return
        if r is None:
            return
        m = r
        yield m


def closed_sq_bounded(m0: Program, m1: Program, fuel: int = DEFAULT_FUEL) -> Tri:
    """Bounded Kleene equivalence of closed programs.

    Two stuck programs have no value at all and are therefore equivalent."""
    r0, r1 = eval_program(m0, fuel), eval_program(m1, fuel)
    if isinstance(r0, OutOfFuel) or isinstance(r1, OutOfFuel):
        return Tri.UNKNOWN
    if isinstance(r0, Val) and isinstance(r1, Val):
        return Tri.YES if P.alpha_eq(r0.value, r1.value) else Tri.NO
    if isinstance(r0, StuckAt) and isinstance(r1, StuckAt):
        return Tri.YES
    return Tri.NO


def whnf(m: Program, scope: int, fuel: int) -> tuple[Program, int, StepResult]:
    """Reduce to weak-head form; returns (term, steps used, final status)."""
    if scope:
        P.check_scope(m, scope)
    return _run(m, scope, fuel)


def _safe_step(m: Program) -> StepResult:
    try:
        r = _step(m, 0)
    except _Blocked as b:
        return Stuck(b.reason, b.neutral)
    return Value() if r is None else Stepped(r)


def open_conv(n: int, m0: Program, m1: Program, fuel: int = 1000) -> Tri:
    """Sound, incomplete open conversion in scope ``n``.

    Yes when the two reduction sequences meet in a common term (steps are
    stable under closing substitutions), or when both block on a non-variable
    redex (then no instance ever reaches a value). Never answers No."""
    P.check_scope(m0, n)
    P.check_scope(m1, n)
    cur = [m0, m1]
    seen = [{P.canon(m0)}, {P.canon(m1)}]
    if seen[0] & seen[1]:
        return Tri.YES
    done = [None, None]   # final StepResult once a side stops
    used = 0
    while used < fuel and (done[0] is None or done[1] is None):
        for side in (0, 1):
            if done[side] is not None or used >= fuel:
                continue
            res = step(cur[side], n)
            if isinstance(res, Stepped):
                cur[side] = res.term
                used += 1
                c = P.canon(res.term)
                if c in seen[1 - side]:
                    return Tri.YES
                seen[side].add(c)
            else:
                done[side] = res
    if all(isinstance(d, Stuck) and not d.neutral for d in done):
        return Tri.YES
    return Tri.UNKNOWN
