"""Kripke-Joyal forcing over a finite truncation of the clock worlds.

Worlds draw their clocks from a fixed pool and carry times up to a bound.
Implication and the clock quantifier range over world morphisms whose source
lies in the truncation widened by ``time_headroom`` extra time steps; atoms
are tabulated up to the time bound and read the clamped world beyond it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .program import ClockName
from .semantics import World

__all__ = [
    "TruncParams", "ForcingError", "enumerate_worlds", "world_count", "WorldMorphism",
    "morphisms_into", "Formula", "Top", "Bot", "Atom", "And", "Or", "Implies", "Forall",
    "Exists", "Later", "iff", "PropFamily", "NotMonotone", "monotone_families", "Forcer",
    "forces", "THEOREMS", "negative_control", "TheoremResult", "check_formula",
    "check_theorem",
]


@dataclass(frozen=True)
class TruncParams:
    pool: tuple = ("k1", "k2")
    time_bound: int = 2
    time_headroom: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pool", tuple(
            c if isinstance(c, ClockName) else ClockName(str(c)) for c in self.pool))
        if len(set(self.pool)) != len(self.pool):
            raise ValueError("duplicate clock in pool")
        if self.time_bound < 0 or self.time_headroom < 0:
            raise ValueError("times must be non-negative")

    def validate(self) -> "TruncParams":
        """Forcing needs two pool names and a positive time bound."""
        if len(self.pool) < 2:
            raise ValueError("the clock pool needs at least two names")
        if self.time_bound < 1:
            raise ValueError("time bound must be at least 1")
        return self

    @staticmethod
    def sized(pool_size: int, time_bound: int, time_headroom: int = 1) -> "TruncParams":
        return TruncParams(tuple(f"k{i + 1}" for i in range(pool_size)), time_bound, time_headroom)


class ForcingError(ValueError):
    def __init__(self, msg: str, kind: str):
        super().__init__(msg)
        self.kind = kind


def _worlds(pool: Sequence[ClockName], bound: int) -> list[World]:
    out = []
    for size in range(1, len(pool) + 1):
        for names in itertools.combinations(pool, size):
            for ts in itertools.product(range(bound + 1), repeat=size):
                out.append(World(tuple(zip(names, ts))))
    return out


def enumerate_worlds(p: TruncParams) -> list[World]:
    """Every non-empty sub-pool with every time assignment up to the bound."""
    return _worlds(p.pool, p.time_bound)


def world_count(pool_size: int, time_bound: int) -> int:
    return sum(comb(pool_size, k) * (time_bound + 1) ** k for k in range(1, pool_size + 1))


@dataclass(frozen=True)
class WorldMorphism:
    """``source -> target``, given contravariantly by ``mapping: dom(target) -> dom(source)``."""
    source: World
    target: World
    mapping: tuple        # ((target clock, source clock), ...)

    def __post_init__(self):
        m = dict(self.mapping)
        if set(m) != set(self.target.dom):
            raise ValueError("morphism must map every target clock")
        for c, d in m.items():
            if d not in self.source:
                raise ValueError(f"{d} is not a clock of the source world")
            if self.source[d] > self.target[c]:
                raise ValueError(f"time of {d} exceeds time of {c}")

    def __call__(self, c: ClockName) -> ClockName:
        return dict(self.mapping)[c]

    def then(self, other: "WorldMorphism") -> "WorldMorphism":
        """``self: V -> U`` followed by ``other: U -> W``."""
        if other.source != self.target:
            raise ValueError("morphisms do not compose")
        return WorldMorphism(self.source, other.target,
                             tuple((c, self(other(c))) for c in other.target.dom))

    @staticmethod
    def identity(w: World) -> "WorldMorphism":
        return WorldMorphism(w, w, tuple((c, c) for c in w.dom))


def morphisms_into(u: World, sources: Iterable[World]) -> Iterator[WorldMorphism]:
    for v in sources:
        choices = [[d for d in v.dom if v[d] <= u[c]] for c in u.dom]
        for img in itertools.product(*choices):
            yield WorldMorphism(v, u, tuple(zip(u.dom, img)))


# ---------------------------------------------------------------------------
# formulas

class Formula:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bot(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    family: "PropFamily"
    clock: str | None = None


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    binder: str
    body: Formula


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    binder: str
    body: Formula


@dataclass(frozen=True, eq=False)
class Later(Formula):
    clock: str
    body: Formula


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def free_clock_refs(phi: Formula) -> set[str]:
    match phi:
        case Atom(_, k):
            return set() if k is None else {k}
        case And(a, b) | Or(a, b) | Implies(a, b):
            return free_clock_refs(a) | free_clock_refs(b)
        case Forall(k, body) | Exists(k, body):
            return free_clock_refs(body) - {k}
        case Later(k, body):
            return free_clock_refs(body) | {k}
    return set()


# ---------------------------------------------------------------------------
# atom families

class NotMonotone(ValueError):
    pass


class PropFamily:
    """A monotone truth assignment on the truncation, optionally taking a clock.

    Truth at a world must survive restriction along every morphism into it."""

    def __init__(self, params: TruncParams, fn: Callable, clock_arg: bool = False,
                 name: str = "phi", _trusted: bool = False):
        self.params = params
        self.clock_arg = clock_arg
        self.name = name
        points = _points(params, clock_arg)
        self.table = {pt: bool(fn(*pt)) for pt in points}
        if not _trusted:
            for lo, hi in _order(params, clock_arg):
                if self.table[hi] and not self.table[lo]:
                    raise NotMonotone(f"{name} holds at {_show_point(hi)} "
                                      f"but not at its restriction {_show_point(lo)}")

    def holds(self, w: World, clock: ClockName | None = None) -> bool:
        w = _clamp(w, self.params.time_bound)
        return self.table[(w, clock) if self.clock_arg else (w,)]

    def true_points(self) -> list:
        return [pt for pt, v in self.table.items() if v]

    def to_json(self) -> dict:
        return {"name": self.name, "clock_arg": self.clock_arg,
                "true_at": [_show_point(pt) for pt in self.true_points()]}

    def __repr__(self) -> str:
        return f"PropFamily({self.name}, true at {len(self.true_points())} point(s))"


def _clamp(w: World, bound: int) -> World:
    if all(t <= bound for _, t in w.times):
        return w
    return World(tuple((c, min(t, bound)) for c, t in w.times))


def _points(p: TruncParams, clock_arg: bool) -> list:
    ws = enumerate_worlds(p)
    return [(w, c) for w in ws for c in w.dom] if clock_arg else [(w,) for w in ws]


def _show_point(pt) -> str:
    return str(pt[0]) if len(pt) == 1 else f"{pt[0]}@{pt[1]}"


_ORDER_CACHE: dict = {}


def _order(p: TruncParams, clock_arg: bool) -> list:
    """Pairs (lo, hi): a morphism lo -> hi exists (respecting the clock argument)."""
    key = (p.pool, p.time_bound, clock_arg)
    if key not in _ORDER_CACHE:
        ws = enumerate_worlds(p)
        pairs = set()
        for u in ws:
            for m in morphisms_into(u, ws):
                if clock_arg:
                    for c in u.dom:
                        pairs.add(((m.source, m(c)), (u, c)))
                else:
                    pairs.add(((m.source,), (u,)))
        _ORDER_CACHE[key] = sorted(pairs, key=lambda x: (str(x[0]), str(x[1])))
    return _ORDER_CACHE[key]


def monotone_families(p: TruncParams, clock_arg: bool = False, limit: int = 4096,
                      seed: int = 0) -> list[PropFamily]:
    """All monotone families when there are at most ``limit``; otherwise a seeded sample."""
    points = _points(p, clock_arg)
    below: dict = {pt: set() for pt in points}
    for lo, hi in _order(p, clock_arg):
        below[hi].add(lo)
    # collapse mutually reachable points, then enumerate down-closed sets of classes
    cls_of: dict = {}
    classes: list[frozenset] = []
    for pt in points:
        if pt in cls_of:
            continue
        members = frozenset(q for q in points if q in below[pt] and pt in below[q]) | {pt}
        for q in members:
            cls_of[q] = len(classes)
        classes.append(members)
    n = len(classes)
    down = [set() for _ in range(n)]
    for i, members in enumerate(classes):
        for q in below[next(iter(members))]:
            if cls_of[q] != i:
                down[i].add(cls_of[q])
    order = sorted(range(n), key=lambda i: len(down[i]))
    results: list[frozenset] = []

    def rec(idx: int, chosen: set) -> bool:
        if len(results) > limit:
            return False
        if idx == n:
            results.append(frozenset(chosen))
            return True
        i = order[idx]
        if not rec(idx + 1, chosen):
            return False
        if down[i] <= chosen:
            chosen.add(i)
            ok = rec(idx + 1, chosen)
            chosen.discard(i)
            return ok
        return True

    if rec(0, set()):
        sets = results
    else:
        rng = random.Random(seed)
        seen: set = set()
        sets = []
        for _ in range(limit * 4):
            chosen: set = set()
            for i in order:
                if down[i] <= chosen and rng.random() < 0.5:
                    chosen.add(i)
            fz = frozenset(chosen)
            if fz not in seen:
                seen.add(fz)
                sets.append(fz)
            if len(sets) >= limit:
                break
    fams = []
    for j, s in enumerate(sorted(sets, key=lambda s: (len(s), sorted(s)))):
        truth = {q for i in s for q in classes[i]}
        fams.append(PropFamily(p, lambda *pt, t=truth: pt in t, clock_arg,
                               name=f"{'psi' if clock_arg else 'phi'}{j}", _trusted=True))
    return fams


# ---------------------------------------------------------------------------
# forcing

class Forcer:
    """Memoised forcing relation for one truncation.

    ``quantifier`` selects how the clock quantifier is read: ``"morphism"``
    quantifies over all morphisms into the world and all clocks of their
    sources; ``"extension"`` adds one unused pool clock at every time."""

    def __init__(self, p: TruncParams, quantifier: str = "morphism"):
        if quantifier not in ("morphism", "extension"):
            raise ValueError(f"unknown quantifier reading {quantifier!r}")
        self.p = p.validate()
        self.quantifier = quantifier
        self.outer = p.time_bound + p.time_headroom
        self.sources = _worlds(p.pool, self.outer)
        self._into: dict = {}
        self._memo: dict = {}

    def into(self, u: World) -> list[WorldMorphism]:
        if u not in self._into:
            self._into[u] = list(morphisms_into(u, self.sources))
        return self._into[u]

    def forces(self, u: World, phi: Formula, env: Mapping[str, ClockName] | None = None) -> bool:
        if any(c not in self.p.pool for c in u.dom):
            raise ForcingError(f"world {u} uses clocks outside the pool", "scope")
        if any(t > self.outer for _, t in u.times):
            raise ForcingError(f"world {u} exceeds the truncation", "scope")
        env = {c.atom: c for c in u.dom} if env is None else dict(env)
        missing = free_clock_refs(phi) - set(env)
        if missing:
            raise ForcingError(f"clock {sorted(missing)[0]} is not in scope", "scope")
        for name, c in env.items():
            if c not in u:
                raise ForcingError(f"clock {name} is bound to {c}, which is not in {u}", "scope")
        return self._f(u, phi, tuple(sorted(env.items())))

    def _f(self, u: World, phi: Formula, env: tuple) -> bool:
        key = (u, phi, env)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        r = self._eval(u, phi, env)
        self._memo[key] = r
        return r

    def _eval(self, u: World, phi: Formula, env: tuple) -> bool:
        match phi:
            case Top():
                return True
            case Bot():
                return False
            case Atom(fam, k):
                if k is None:
                    return fam.holds(u)
                return fam.holds(u, dict(env)[k])
            case And(a, b):
                return self._f(u, a, env) and self._f(u, b, env)
            case Or(a, b):
                return self._f(u, a, env) or self._f(u, b, env)
            case Implies(a, b):
                for m in self.into(u):
                    e2 = tuple((n, m(c)) for n, c in env)
                    if self._f(m.source, a, e2) and not self._f(m.source, b, e2):
                        return False
                return True
            case Forall(k, body):
                if self.quantifier == "extension":
                    return all(self._f(w, body, e) for w, e in self._extensions(u, k, env))
                for m in self.into(u):
                    e2 = tuple((n, m(c)) for n, c in env if n != k)
                    for c in m.source.dom:
                        if not self._f(m.source, body, tuple(sorted(e2 + ((k, c),)))):
                            return False
                return True
            case Exists(k, body):
                rest = tuple((n, c) for n, c in env if n != k)
                return any(self._f(u, body, tuple(sorted(rest + ((k, c),)))) for c in u.dom)
            case Later(k, body):
                c = dict(env)[k]
                if u[c] == 0:
                    return True
                return self._f(u.with_time(c, u[c] - 1), body, env)
        raise TypeError(f"not a formula: {phi!r}")

    def _extensions(self, u: World, k: str, env: tuple):
        spare = [c for c in self.p.pool if c not in u]
        if not spare:
            raise ForcingError(f"no unused pool clock to extend {u}", "headroom")
        fresh = spare[0]
        rest = tuple((n, c) for n, c in env if n != k)
        for t in range(self.p.time_bound + 1):
            yield u.extend(fresh, t), tuple(sorted(rest + ((k, fresh),)))


def forces(u: World, phi: Formula, p: TruncParams, quantifier: str = "morphism",
           env: Mapping[str, ClockName] | None = None) -> bool:
    return Forcer(p, quantifier).forces(u, phi, env)


# ---------------------------------------------------------------------------
# theorems

@dataclass(frozen=True)
class TheoremSpec:
    """``build(families, kappa)``; ``kinds`` lists the atom families it takes."""
    name: str
    kinds: tuple          # "closed" or "clock" per family argument
    build: Callable
    uses_kappa: bool = True


K = "kappa"


def _yank(fams, kappa):
    lhs = Later(kappa, _disj([Atom(f) for f in fams]))
    return Implies(lhs, _disj([Later(kappa, Atom(f)) for f in fams]))


def _disj(fs: Sequence[Formula]) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


THEOREMS: dict[str, TheoremSpec] = {t.name: t for t in [
    TheoremSpec("local_clock", (), lambda fs, k: Exists("j", Top()), uses_kappa=False),
    TheoremSpec("clock_irrelevance", ("closed",),
                lambda fs, k: iff(Atom(fs[0]), Forall("j", Atom(fs[0]))), uses_kappa=False),
    TheoremSpec("delete_later", ("clock",),
                lambda fs, k: Implies(Forall("j", Later("j", Atom(fs[0], "j"))),
                                      Forall("j", Atom(fs[0], "j"))), uses_kappa=False),
    TheoremSpec("later_unit", ("closed",),
                lambda fs, k: Implies(Atom(fs[0]), Later(k, Atom(fs[0])))),
    TheoremSpec("later_and", ("closed", "closed"),
                lambda fs, k: iff(Later(k, And(Atom(fs[0]), Atom(fs[1]))),
                                  And(Later(k, Atom(fs[0])), Later(k, Atom(fs[1]))))),
    TheoremSpec("later_implies", ("closed", "closed"),
                lambda fs, k: iff(Later(k, Implies(Atom(fs[0]), Atom(fs[1]))),
                                  Implies(Later(k, Atom(fs[0])), Later(k, Atom(fs[1]))))),
    TheoremSpec("loeb", ("closed",),
                lambda fs, k: Implies(Implies(Later(k, Atom(fs[0])), Atom(fs[0])), Atom(fs[0]))),
    # Y is the constant two-element object; a predicate on it is a pair of atoms
    TheoremSpec("total_yank", ("closed", "closed"), _yank),
]}

negative_control = TheoremSpec(
    "negative_control", ("closed",),
    lambda fs, k: Implies(Atom(fs[0]), Implies(Later(k, Atom(fs[0])), Bot())))


@dataclass
class TheoremResult:
    name: str
    passed: bool
    instances: int
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {"theorem": self.name, "status": "pass" if self.passed else "counterexample",
                "instances": self.instances, "counterexample": self.counterexample}


def check_formula(spec: TheoremSpec, p: TruncParams, limit: int = 4096, seed: int = 0,
                  quantifier: str = "morphism") -> TheoremResult:
    """Sweep every world of the truncation, clock choice and family tuple."""
    forcer = Forcer(p, quantifier)
    pools = {kind: monotone_families(p, kind == "clock", limit, seed) for kind in set(spec.kinds)}
    tuples = list(itertools.product(*(pools[k] for k in spec.kinds)))
    count = 0
    for u in enumerate_worlds(p):
        kappas = u.dom if spec.uses_kappa else (None,)
        for kappa in kappas:
            env = {c.atom: c for c in u.dom}
            if kappa is not None:
                env[K] = kappa
            for fams in tuples:
                count += 1
                if not forcer.forces(u, spec.build(fams, K), env):
                    cex = {"world": {c.atom: t for c, t in u.times},
                           "kappa": None if kappa is None else kappa.atom,
                           "families": [f.to_json() for f in fams]}
                    return TheoremResult(spec.name, False, count, cex)
    return TheoremResult(spec.name, True, count)


def check_theorem(name: str, p: TruncParams, limit: int = 4096, seed: int = 0) -> TheoremResult:
    if name == negative_control.name:
        return check_formula(negative_control, p, limit, seed)
    if name not in THEOREMS:
        raise KeyError(f"unknown theorem {name!r}; known: {', '.join(THEOREMS)}")
    return check_formula(THEOREMS[name], p, limit, seed)
