"""Finite-world approximation of the PER meaning of types.

A type program is interpreted at a world (clocks with remaining time) and a
universe level as a relation object with a tri-valued membership test. Yes
and No answers are sound; anything the bounded search cannot settle is
Unknown. Sub-relations for families are built lazily and memoised.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import program as P
from .opsem import OutOfFuel, StuckAt, Tri, Val, eval_program
from .program import ClockName, Program

__all__ = [
    "World", "parse_world", "tick", "OracleBudget", "NotAType", "Exhausted",
    "TypeRelApprox", "Oracle", "interp_type", "member", "member_detail",
    "canonicity_check", "CanonOk", "CanonFail", "per_audit", "AuditReport", "rel_equal",
]

YES, NO, UNKNOWN = Tri.YES, Tri.NO, Tri.UNKNOWN


# ---------------------------------------------------------------------------
# worlds

@dataclass(frozen=True, order=True)
class World:
    """Clock names with their remaining time; the domain is never empty."""
    times: tuple[tuple[ClockName, int], ...]

    def __post_init__(self):
        if not self.times:
            raise ValueError("a world needs at least one clock")
        names = [k for k, _ in self.times]
        if len(set(names)) != len(names):
            raise ValueError("duplicate clock in world")
        if any(t < 0 for _, t in self.times):
            raise ValueError("negative time")
        if list(self.times) != sorted(self.times):
            object.__setattr__(self, "times", tuple(sorted(self.times)))

    @staticmethod
    def of(mapping: Mapping) -> "World":
        return World(tuple(sorted(
            ((k if isinstance(k, ClockName) else ClockName(k)), int(t)) for k, t in mapping.items())))

    def as_dict(self) -> dict[ClockName, int]:
        return dict(self.times)

    def __getitem__(self, k: ClockName) -> int:
        for c, t in self.times:
            if c == k:
                return t
        raise KeyError(k)

    def __contains__(self, k: ClockName) -> bool:
        return any(c == k for c, _ in self.times)

    @property
    def dom(self) -> tuple[ClockName, ...]:
        return tuple(c for c, _ in self.times)

    def extend(self, k: ClockName, t: int) -> "World":
        if k in self:
            raise ValueError(f"clock {k} already in world")
        return World(tuple(sorted(self.times + ((k, t),))))

    def with_time(self, k: ClockName, t: int) -> "World":
        return World(tuple((c, t if c == k else s) for c, s in self.times))

    def __str__(self) -> str:
        return "{" + ", ".join(f"{c}={t}" for c, t in self.times) + "}"


def parse_world(spec: str) -> World:
    """``"k1=2,k2=0"`` to a world."""
    out = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, t = part.partition("=")
        if not t.strip().isdigit():
            raise ValueError(f"bad world entry {part!r}")
        out[name.strip()] = int(t)
    return World.of(out)


def tick(w: World, k: ClockName) -> World:
    if k not in w:
        raise ValueError(f"clock {k} not in world {w}")
    if w[k] == 0:
        raise ValueError(f"clock {k} has no time left in {w}")
    return w.with_time(k, w[k] - 1)


@dataclass(frozen=True)
class OracleBudget:
    unfold_depth: int = 8
    enum_depth: int = 4
    fuel: int = 10_000
    fresh_clock_times: int = 3

    def __post_init__(self):
        for f in ("unfold_depth", "enum_depth", "fuel", "fresh_clock_times"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be non-negative")


@dataclass(frozen=True)
class NotAType:
    reason: str


@dataclass(frozen=True)
class Exhausted:
    reason: str


class _NotType(Exception):
    pass


class _Exhaust(Exception):
    pass


_PLACEHOLDERS = (P.Fst(P.Star()), P.Snd(P.Star()))
_ENUM_CAP = 64


# ---------------------------------------------------------------------------
# relations

class TypeRelApprox:
    """Membership test for one type at one world and level."""
    tag: str = "?"

    def test(self, m0: Program, m1: Program) -> Tri:
        try:
            return self._test(m0, m1)
        except _NotType:
            return NO
        except _Exhaust:
            return UNKNOWN

    def _test(self, m0: Program, m1: Program) -> Tri:
        raise NotImplementedError

    @property
    def key(self):
        """Structural key; equal keys mean equal relations. ``None`` if unknown."""
        return None

    def enum(self) -> tuple[list[tuple[Program, Program]], bool]:
        """Related pairs (all genuinely related) and whether they cover the
        relation up to Kleene equivalence of components."""
        return [], False

    @property
    def higher_order(self) -> bool:
        return False

    @property
    def truncated(self) -> bool:
        """True when built from a clock quantifier sampled at finitely many times.

        Such a relation may contain more pairs than the exact one, so its
        enumerated pairs cannot witness a difference from another relation."""
        return False

    def __repr__(self) -> str:
        return f"<{self.tag} {self.key!r}>"


class EmptyRel(TypeRelApprox):
    def __init__(self, tag: str = "void"):
        self.tag = tag

    def _test(self, m0, m1):
        return NO

    @property
    def key(self):
        return ("empty",)

    def enum(self):
        return [], True


class TotalRel(TypeRelApprox):
    """Relates every pair of closed programs."""

    def __init__(self, tag: str = "later"):
        self.tag = tag

    def _test(self, m0, m1):
        return YES

    @property
    def key(self):
        return ("total",)

    def enum(self):
        a, b = _PLACEHOLDERS
        return [(a, a), (a, b), (b, a)], False

    @property
    def higher_order(self) -> bool:
        return True


class _Evaluating:
    def __init__(self, oracle: "Oracle"):
        self.oracle = oracle

    def value(self, m: Program) -> Program | None:
        """Value of ``m``; ``None`` if stuck; raises ``_Exhaust`` on no fuel."""
        r = eval_program(m, self.oracle.budget.fuel)
        if isinstance(r, Val):
            return r.value
        if isinstance(r, OutOfFuel):
            raise _Exhaust("evaluation fuel")
        return None


class ValRel(TypeRelApprox, _Evaluating):
    """Value closure of a finite diagonal set of canonical values."""

    def __init__(self, oracle, tag: str, values: tuple):
        _Evaluating.__init__(self, oracle)
        self.tag = tag
        self.values = values

    def _test(self, m0, m1):
        v0, v1 = self.value(m0), self.value(m1)
        if v0 is None or v1 is None:
            return NO
        return YES if v0 == v1 and v0 in self.values else NO

    @property
    def key(self):
        return ("vals", self.values)

    def enum(self):
        return [(v, v) for v in self.values], True


class NatRel(TypeRelApprox, _Evaluating):
    tag = "nat"

    def _test(self, m0, m1):
        for _ in range(self.oracle.budget.unfold_depth + 1):
            v0, v1 = self.value(m0), self.value(m1)
            if isinstance(v0, P.Ze) and isinstance(v1, P.Ze):
                return YES
            if isinstance(v0, P.Su) and isinstance(v1, P.Su):
                m0, m1 = v0.arg, v1.arg
                continue
            return NO
        raise _Exhaust("nat unfolding")

    @property
    def key(self):
        return ("nat",)

    def enum(self):
        out, n = [], P.Ze()
        for _ in range(self.oracle.budget.enum_depth + 1):
            out.append((n, n))
            n = P.Su(n)
        return out, False


class Family:
    def at(self, a: Program) -> TypeRelApprox:
        raise NotImplementedError

    @property
    def key(self):
        return None

    @property
    def truncated(self) -> bool:
        return False


class ConstFamily(Family):
    def __init__(self, rel: TypeRelApprox):
        self.rel = rel

    def at(self, a):
        return self.rel

    @property
    def key(self):
        return ("const", self.rel.key)

    @property
    def truncated(self) -> bool:
        return self.rel.truncated


class ProgFamily(Family):
    """``a ↦ [[body[a]]]`` for a body in scope 1."""

    def __init__(self, oracle: "Oracle", world: World, body: Program, level: int,
                 depth: int, dom: TypeRelApprox):
        self.oracle, self.world, self.body = oracle, world, body
        self.level, self.depth, self.dom = level, depth, dom
        self.constant = 0 not in P.free_vars(body, 1)
        self.memo: dict = {}
        self._key = False

    @property
    def truncated(self) -> bool:
        return clock_sensitive(self.body)

    def at(self, a):
        c = P.canon(a)
        hit = self.memo.get(c)
        if hit is None:
            try:
                hit = self.oracle.type_rel(self.world, P.subst_top(self.body, a), self.level,
                                           self.depth)
            except (_NotType, _Exhaust) as e:
                hit = e
            self.memo[c] = hit
        if isinstance(hit, Exception):
            raise hit
        return hit

    @property
    def key(self):
        if self._key is False:
            self._key = self._compute_key()
        return self._key

    def _compute_key(self):
        try:
            if self.constant:
                return ("const", self.at(_PLACEHOLDERS[0]).key)
            pairs, complete = self.dom.enum()
            if complete:
                keys = tuple(self.at(a).key for a, _ in pairs)
                if all(k is not None for k in keys):
                    return ("tab", keys)
        except (_NotType, _Exhaust):
            return None
        return ("prog", P.canon(self.body), self.world, self.level)


def _check_family(dom: TypeRelApprox, fam: Family) -> None:
    """Eagerly instantiate the family on enumerated related pairs."""
    pairs, _ = dom.enum()
    for a0, a1 in pairs[:_ENUM_CAP]:
        try:
            r0 = fam.at(a0)
            if a1 is not a0 and a1 != a0:
                r1 = fam.at(a1)
                if rel_equal(r0, r1) is NO:
                    raise _NotType("family not functional on related arguments")
        except _Exhaust:
            continue


class SigmaRel(TypeRelApprox, _Evaluating):
    tag = "sg"

    def __init__(self, oracle, dom: TypeRelApprox, fam: Family):
        _Evaluating.__init__(self, oracle)
        self.dom, self.fam = dom, fam

    def _test(self, m0, m1):
        first = self.dom._test(P.Fst(m0), P.Fst(m1))
        if first is NO:
            return NO
        if isinstance(self.fam, ConstFamily):
            rel_b = self.fam.rel
        else:
            a0 = self.value(P.Fst(m0))
            rel_b = self.fam.at(P.Fst(m0) if a0 is None else a0)
        second = rel_b._test(P.Snd(m0), P.Snd(m1))
        return first & second

    @property
    def truncated(self) -> bool:
        return self.dom.truncated or self.fam.truncated

    @property
    def key(self):
        k0, k1 = self.dom.key, self.fam.key
        return None if k0 is None or k1 is None else ("sg", k0, k1)

    def enum(self):
        out, complete = [], True
        pairs, c0 = self.dom.enum()
        complete &= c0
        for a0, a1 in pairs:
            try:
                inner, c1 = self.fam.at(a0).enum()
            except (_NotType, _Exhaust):
                complete = False
                continue
            complete &= c1
            for b0, b1 in inner:
                out.append((P.Pair(a0, b0), P.Pair(a1, b1)))
                if len(out) >= _ENUM_CAP:
                    return out, False
        return out, complete

    @property
    def higher_order(self):
        return self.dom.higher_order or _fam_higher(self.fam, self.dom)


def _fam_higher(fam: Family, dom: TypeRelApprox) -> bool:
    try:
        pairs, _ = dom.enum()
        probe = pairs[0][0] if pairs else _PLACEHOLDERS[0]
        return fam.at(probe).higher_order
    except (_NotType, _Exhaust):
        return True


class PiRel(TypeRelApprox):
    tag = "pi"

    def __init__(self, oracle, dom: TypeRelApprox, fam: Family):
        self.oracle, self.dom, self.fam = oracle, dom, fam

    def _test(self, m0, m1):
        if isinstance(self.fam, ConstFamily) and isinstance(self.fam.rel, TotalRel):
            return YES
        pairs, complete = self.dom.enum()
        acc = YES
        for a0, a1 in pairs:
            try:
                r = self.fam.at(a0)._test(P.App(m0, a0), P.App(m1, a1))
            except _Exhaust:
                r = UNKNOWN
            if r is NO:
                if self.dom.truncated:
                    return UNKNOWN
                return NO
            acc = acc & r
        if not complete:
            return UNKNOWN
        return acc

    @property
    def truncated(self) -> bool:
        return self.dom.truncated or self.fam.truncated

    @property
    def key(self):
        k0, k1 = self.dom.key, self.fam.key
        return None if k0 is None or k1 is None else ("pi", k0, k1)

    @property
    def higher_order(self):
        return True


class WRel(TypeRelApprox, _Evaluating):
    tag = "wty"

    def __init__(self, oracle, dom: TypeRelApprox, fam: Family):
        _Evaluating.__init__(self, oracle)
        self.dom, self.fam = dom, fam

    def _test(self, m0, m1):
        return self._tree(m0, m1, 0)

    def _tree(self, m0, m1, depth):
        if depth > self.oracle.budget.unfold_depth:
            raise _Exhaust("W unfolding")
        v0, v1 = self.value(m0), self.value(m1)
        if not (isinstance(v0, P.Sup) and isinstance(v1, P.Sup)):
            return NO
        acc = self.dom._test(v0.label, v1.label)
        if acc is NO:
            return NO
        a0 = self.value(v0.label)
        if a0 is None:
            return NO
        branch_rel = self.fam.at(a0)
        pairs, complete = branch_rel.enum()
        for o0, o1 in pairs:
            r = self._tree(P.subst_top(v0.branches, o0), P.subst_top(v1.branches, o1), depth + 1)
            if r is NO:
                return UNKNOWN if branch_rel.truncated else NO
            acc = acc & r
        return acc if complete else acc & UNKNOWN

    @property
    def truncated(self) -> bool:
        return self.dom.truncated or self.fam.truncated

    @property
    def key(self):
        k0, k1 = self.dom.key, self.fam.key
        return None if k0 is None or k1 is None else ("w", k0, k1)

    @property
    def higher_order(self):
        return True


class PendingEqRel(TypeRelApprox, _Evaluating):
    """Equality type whose endpoints could not be compared within budget."""
    tag = "eq"

    def _test(self, m0, m1):
        v0, v1 = self.value(m0), self.value(m1)
        if not (isinstance(v0, P.Star) and isinstance(v1, P.Star)):
            return NO
        return UNKNOWN


class LaterRel(TypeRelApprox):
    """The relation of the body at the ticked world."""
    tag = "later"

    def __init__(self, inner: TypeRelApprox):
        self.inner = inner

    def _test(self, m0, m1):
        return self.inner._test(m0, m1)

    @property
    def key(self):
        return self.inner.key

    def enum(self):
        return self.inner.enum()

    @property
    def higher_order(self):
        return self.inner.higher_order

    @property
    def truncated(self) -> bool:
        return self.inner.truncated


class MeetRel(TypeRelApprox):
    tag = "isect"

    def __init__(self, parts: Sequence[TypeRelApprox], sampled: bool = False):
        self.parts = list(parts)
        self.sampled = sampled

    @property
    def truncated(self) -> bool:
        return self.sampled or any(r.truncated for r in self.parts)

    def _test(self, m0, m1):
        acc = YES
        for r in self.parts:
            t = r._test(m0, m1)
            if t is NO:
                return NO
            acc = acc & t
        return acc

    @property
    def key(self):
        ks = [r.key for r in self.parts]
        if any(k is None for k in ks):
            return None
        return ("meet", frozenset(ks))

    def enum(self):
        pairs, complete = self.parts[0].enum()
        out = []
        for a, b in pairs:
            t = self.test(a, b)
            if t is YES:
                out.append((a, b))
            elif t is UNKNOWN:
                complete = False
        return out, complete

    @property
    def higher_order(self):
        return any(r.higher_order for r in self.parts)


class KProdRel(TypeRelApprox):
    tag = "kprod"

    def __init__(self, parts: Sequence[tuple[ClockName, TypeRelApprox]], sampled: bool = False):
        self.parts = list(parts)
        self.sampled = sampled

    @property
    def truncated(self) -> bool:
        return self.sampled or any(r.truncated for _, r in self.parts)

    def _test(self, m0, m1):
        acc = YES
        for k, r in self.parts:
            t = r._test(P.CApp(m0, k), P.CApp(m1, k))
            if t is NO:
                return NO
            acc = acc & t
        return acc

    @property
    def key(self):
        ks = [(k, r.key) for k, r in self.parts]
        if any(k is None for _, k in ks):
            return None
        return ("kprod", tuple(ks))

    @property
    def higher_order(self):
        return True


class UnivRel(TypeRelApprox):
    tag = "univ"

    def __init__(self, oracle, world: World, index: int, depth: int):
        self.oracle, self.world, self.index, self.depth = oracle, world, index, depth

    def _interp(self, a):
        return self.oracle.type_rel(self.world, a, self.index, self.depth + 1)

    def _test(self, a0, a1):
        r0 = self._interp(a0)   # _NotType propagates to test() as No
        r1 = r0 if a1 == a0 else self._interp(a1)
        return rel_equal(r0, r1)

    @property
    def key(self):
        return ("univ", self.index, self.world)

    def enum(self):
        tys = [P.Void(), P.Unit(), P.Bool(), P.Nat()] + [P.Univ(j) for j in range(self.index)]
        return [(t, t) for t in tys], False

    @property
    def higher_order(self):
        return True


def rel_equal(r0: TypeRelApprox, r1: TypeRelApprox) -> Tri:
    """Compare two relations: keys, then enumerated witnesses."""
    if r0 is r1:
        return YES
    k0, k1 = r0.key, r1.key
    if k0 is not None and k0 == k1:
        return YES
    verdict = YES
    complete = True
    for a, b in ((r0, r1), (r1, r0)):
        pairs, c = a.enum()
        complete &= c
        for x, y in pairs:
            t = b.test(x, y)
            if t is NO and a.truncated:
                # the pair may only be in ``a`` because of the sampled clock times
                t = UNKNOWN
            if t is NO:
                return NO
            verdict = verdict & t
    # a relation without canonical inhabitants cannot be compared this way
    if complete and verdict is YES:
        return YES
    return UNKNOWN


def _meet(parts: list[TypeRelApprox]) -> TypeRelApprox:
    if any(isinstance(r, EmptyRel) for r in parts):
        return EmptyRel("isect")
    parts = [r for r in parts if not isinstance(r, TotalRel)]
    if not parts:
        return TotalRel("isect")
    uniq, seen = [], set()
    for r in parts:
        k = r.key
        if k is not None:
            if k in seen:
                continue
            seen.add(k)
        uniq.append(r)
    if len(uniq) == 1:
        return uniq[0]
    base = [r.inner if isinstance(r, LaterRel) else r for r in uniq]
    if all(isinstance(r, SigmaRel) and r.fam.key is not None and r.fam.key[0] == "const"
           for r in base):
        oracle = base[0].oracle
        dom = _meet([r.dom for r in base])
        cod = _meet([r.fam.at(_PLACEHOLDERS[0]) for r in base])
        return SigmaRel(oracle, dom, ConstFamily(cod))
    return MeetRel(uniq)


@functools.lru_cache(maxsize=4096)
def clock_sensitive(m: Program) -> bool:
    """Whether ``m`` contains a clock intersection or product whose body uses its clock.

    The oracle samples such quantifiers at finitely many times only."""
    if isinstance(m, (P.Isect, P.KProd)) and m.bound in P.free_clocks(m.body):
        return True
    return any(clock_sensitive(getattr(m, name)) for name, kind in type(m)._shape
               if kind not in ("k", "cb"))


# ---------------------------------------------------------------------------
# the interpreter

class Oracle:
    """Interprets closed type programs; holds the budget and memo tables."""

    def __init__(self, budget: OracleBudget | None = None):
        self.budget = budget or OracleBudget()
        self.memo: dict = {}

    def clock_choices(self, w: World) -> list[tuple[ClockName, World]]:
        out = [(k, w) for k in w.dom]
        taken = {c.atom for c in w.dom}
        for t in range(self.budget.fresh_clock_times + 1):
            atom = f"~{t}"
            while atom in taken:
                atom += "'"
            k = ClockName(atom)
            out.append((k, w.extend(k, t)))
        return out

    def type_rel(self, w: World, a: Program, level: int, depth: int = 0) -> TypeRelApprox:
        if depth > self.budget.unfold_depth:
            raise _Exhaust("unfold depth")
        ck = (w, P.canon(a), level)
        hit = self.memo.get(ck)
        if hit is not None:
            if isinstance(hit, _NotType):
                raise hit
            return hit
        try:
            rel = self._interp(w, a, level, depth)
        except _NotType as e:
            self.memo[ck] = e
            raise
        self.memo[ck] = rel
        return rel

    def _value(self, a: Program) -> Program:
        r = eval_program(a, self.budget.fuel)
        if isinstance(r, OutOfFuel):
            raise _Exhaust("evaluation fuel")
        if isinstance(r, StuckAt):
            raise _NotType(f"type evaluation stuck: {r.reason}")
        return r.value

    def _interp(self, w: World, a: Program, level: int, depth: int) -> TypeRelApprox:
        v = self._value(a)
        d = depth + 1
        match v:
            case P.Void():
                return EmptyRel("void")
            case P.Unit():
                return ValRel(self, "unit", (P.Star(),))
            case P.Bool():
                return ValRel(self, "bool", (P.Tt(), P.Ff()))
            case P.Nat():
                return NatRel(self)
            case P.Sg(dom, cod) | P.Pi(dom, cod) | P.WTy(dom, cod):
                drel = self.type_rel(w, dom, level, d)
                fam = ProgFamily(self, w, cod, level, d, drel)
                _check_family(drel, fam)
                if fam.constant:
                    try:
                        fam = ConstFamily(fam.at(_PLACEHOLDERS[0]))
                    except _Exhaust:
                        pass
                cls = {P.Sg: SigmaRel, P.Pi: PiRel, P.WTy: WRel}[type(v)]
                return cls(self, drel, fam)
            case P.Eq(ty, m0, m1):
                carrier = self.type_rel(w, ty, level, d)
                ends = carrier._test(m0, m0) & carrier._test(m1, m1)
                if ends is NO:
                    raise _NotType("equality endpoint outside its type")
                if ends is UNKNOWN:
                    raise _Exhaust("equality endpoints undecided")
                rel = carrier._test(m0, m1)
                if rel is YES:
                    return ValRel(self, "eq", (P.Star(),))
                if rel is NO:
                    return EmptyRel("eq")
                return PendingEqRel(self)
            case P.Later(k, body):
                if k not in w:
                    raise ValueError(f"clock {k} not in world {w}")
                if w[k] == 0:
                    return TotalRel("later")
                return LaterRel(self.type_rel(tick(w, k), body, level, depth))
            case P.Isect(b, body):
                parts = [self.type_rel(w2, P.instantiate_clock(body, b, k), level, d)
                         for k, w2 in self.clock_choices(w)]
                rel = _meet(parts)
                if clock_sensitive(v) and not rel.truncated:
                    rel = MeetRel([rel], sampled=True)
                return rel
            case P.KProd(b, body):
                parts = [(k, self.type_rel(w2, P.instantiate_clock(body, b, k), level, d))
                         for k, w2 in self.clock_choices(w)]
                return KProdRel(parts, sampled=clock_sensitive(v))
            case P.Univ(i):
                if i >= level:
                    raise _NotType(f"universe {i} is not a type at level {level}")
                return UnivRel(self, w, i, depth)
        raise _NotType(f"{P.show(v)[:40]} is not a type")


def _pre(w: World, progs: Iterable[Program]) -> None:
    for m in progs:
        P.check_scope(m, 0)
        extra = P.free_clocks(m) - set(w.dom)
        if extra:
            raise ValueError(f"clocks {sorted(c.atom for c in extra)} not in world {w}")


def interp_type(w: World, a: Program, level: int, b: OracleBudget | None = None,
                oracle: Oracle | None = None):
    """Relation for ``a`` at ``w``, or ``NotAType`` / ``Exhausted``."""
    _pre(w, [a])
    oracle = oracle or Oracle(b)
    try:
        return oracle.type_rel(w, a, level)
    except _NotType as e:
        return NotAType(str(e))
    except _Exhaust as e:
        return Exhausted(str(e))


def member_detail(w: World, m0: Program, m1: Program, a: Program, level: int,
                  b: OracleBudget | None = None, oracle: Oracle | None = None) -> tuple[Tri, str]:
    _pre(w, [m0, m1, a])
    rel = interp_type(w, a, level, b, oracle)
    if isinstance(rel, NotAType):
        return NO, f"not a type: {rel.reason}"
    if isinstance(rel, Exhausted):
        return UNKNOWN, f"budget: {rel.reason}"
    t = rel.test(m0, m1)
    return t, rel.tag


def member(w: World, m0: Program, m1: Program, a: Program, level: int,
           b: OracleBudget | None = None, oracle: Oracle | None = None) -> Tri:
    return member_detail(w, m0, m1, a, level, b, oracle)[0]


# ---------------------------------------------------------------------------
# canonicity and audits

@dataclass(frozen=True)
class CanonOk:
    value: str   # "tt" or "ff"
    steps: int


@dataclass(frozen=True)
class CanonFail:
    reason: str


def canonicity_check(m: Program, fuel: int = 100_000):
    r = eval_program(m, fuel)
    if isinstance(r, Val):
        if isinstance(r.value, P.Tt):
            return CanonOk("tt", r.steps)
        if isinstance(r.value, P.Ff):
            return CanonOk("ff", r.steps)
        return CanonFail(f"value {P.show(r.value)} is not a boolean")
    if isinstance(r, OutOfFuel):
        return CanonFail("OutOfFuel")
    return CanonFail(f"stuck: {r.reason}")


@dataclass
class AuditReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def per_audit(rel: TypeRelApprox, sample: Sequence[tuple[Program, Program]],
              fuel: int = 10_000) -> AuditReport:
    """Look for symmetry, transitivity and approximation failures among Yes answers."""
    rep = AuditReport()
    terms = list(dict.fromkeys(itertools.chain.from_iterable(sample)))
    ans: dict = {}

    def t(x, y):
        if (x, y) not in ans:
            ans[(x, y)] = rel.test(x, y)
        return ans[(x, y)]

    for x, y in sample:
        rep.checked += 1
        if t(x, y) is YES:
            if t(y, x) is NO:
                rep.violations.append(("symmetry", x, y))
            # x is approximated by (lam z. z) x, and by its value if it has one
            variants = [P.App(P.Lam(P.Var(0)), x)]
            r = eval_program(x, fuel)
            if isinstance(r, Val):
                variants.append(r.value)
            for x2 in variants:
                if rel.test(x2, y) is NO:
                    rep.violations.append(("approximation", x2, y))
    for x, y, z in itertools.product(terms, repeat=3):
        if len(terms) > 12:
            break
        if t(x, y) is YES and t(y, z) is YES and t(x, z) is NO:
            rep.violations.append(("transitivity", x, z))
    if len(terms) > 12:
        for (x, y), (y2, z) in itertools.product(sample, repeat=2):
            if y == y2 and t(x, y) is YES and t(y, z) is YES and t(x, z) is NO:
                rep.violations.append(("transitivity", x, z))
    return rep
