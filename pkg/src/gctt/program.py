"""Programs: well-scoped internal terms with de Bruijn levels and named clocks.

A program in scope ``n`` may mention ``Var(0) .. Var(n-1)``; ``Var(i)`` is the
variable introduced at position ``i`` of the enclosing variable list, so a
term stays valid, unchanged, when the scope grows. Clock binders carry the
bound ``ClockName`` explicitly (nominal representation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Sequence

__all__ = [
    "ClockName", "NameSupply", "fresh_clock", "Program",
    "Var", "Lam", "KLam", "App", "CApp", "Fix", "Pair", "Fst", "Snd",
    "Star", "Tt", "Ff", "Ze", "Su", "If", "IfZe", "Sup", "WRec",
    "Pi", "Sg", "WTy", "Eq", "Later", "Isect", "KProd",
    "Void", "Unit", "Bool", "Nat", "Univ",
    "ScopeMismatch", "Substitution", "subst", "subst_top", "weaken", "identity",
    "instantiate_clock", "rename_clocks", "free_clocks", "free_vars", "check_scope",
    "canon", "alpha_eq", "show", "to_json", "from_json", "size",
]


@dataclass(frozen=True, order=True, slots=True)
class ClockName:
    atom: str

    def __str__(self) -> str:
        return self.atom


def fresh_clock(avoid: Iterable[ClockName], base: str = "k") -> ClockName:
    taken = {c.atom for c in avoid}
    for i in itertools.count():
        atom = f"{base}{i}"
        if atom not in taken:
            return ClockName(atom)
    raise AssertionError("unreachable")


class NameSupply:
    """Deterministic counter producing clock names outside ``avoid``."""

    def __init__(self, avoid: Iterable[ClockName] = (), prefix: str = "_k"):
        self.avoid = {c.atom for c in avoid}
        self.prefix = prefix
        self.n = 0

    def fresh(self) -> ClockName:
        while True:
            atom = f"{self.prefix}{self.n}"
            self.n += 1
            if atom not in self.avoid:
                self.avoid.add(atom)
                return ClockName(atom)


# ---------------------------------------------------------------------------
# constructors
#
# ``_shape`` entries: (field, kind) with kinds
#   "t" same scope, "b1" one more variable, "b3" three more variables,
#   "k" a free clock occurrence, "cb" a clock binder name, "c" body under it.

class Program:
    __slots__ = ()
    _shape: tuple = ()

    def __str__(self) -> str:
        return show(self)


def _prog(cls):
    return dataclass(frozen=True, slots=True)(cls)


@_prog
class Var(Program):
    index: int


@_prog
class Lam(Program):
    body: Program
    _shape = (("body", "b1"),)


@_prog
class KLam(Program):
    bound: ClockName
    body: Program
    _shape = (("bound", "cb"), ("body", "c"))


@_prog
class App(Program):
    fn: Program
    arg: Program
    _shape = (("fn", "t"), ("arg", "t"))


@_prog
class CApp(Program):
    fn: Program
    clock: ClockName
    _shape = (("fn", "t"), ("clock", "k"))


@_prog
class Fix(Program):
    body: Program
    _shape = (("body", "b1"),)


@_prog
class Pair(Program):
    left: Program
    right: Program
    _shape = (("left", "t"), ("right", "t"))


@_prog
class Fst(Program):
    arg: Program
    _shape = (("arg", "t"),)


@_prog
class Snd(Program):
    arg: Program
    _shape = (("arg", "t"),)


@_prog
class Star(Program):
    pass


@_prog
class Tt(Program):
    pass


@_prog
class Ff(Program):
    pass


@_prog
class Ze(Program):
    pass


@_prog
class Su(Program):
    arg: Program
    _shape = (("arg", "t"),)


@_prog
class If(Program):
    cond: Program
    then: Program
    orelse: Program
    _shape = (("cond", "t"), ("then", "t"), ("orelse", "t"))


@_prog
class IfZe(Program):
    scrut: Program
    zero: Program
    succ: Program
    _shape = (("scrut", "t"), ("zero", "t"), ("succ", "b1"))


@_prog
class Sup(Program):
    label: Program
    branches: Program
    _shape = (("label", "t"), ("branches", "b1"))


@_prog
class WRec(Program):
    arg: Program
    body: Program
    _shape = (("arg", "t"), ("body", "b3"))


@_prog
class Pi(Program):
    dom: Program
    cod: Program
    _shape = (("dom", "t"), ("cod", "b1"))


@_prog
class Sg(Program):
    dom: Program
    cod: Program
    _shape = (("dom", "t"), ("cod", "b1"))


@_prog
class WTy(Program):
    dom: Program
    cod: Program
    _shape = (("dom", "t"), ("cod", "b1"))


@_prog
class Eq(Program):
    ty: Program
    left: Program
    right: Program
    _shape = (("ty", "t"), ("left", "t"), ("right", "t"))


@_prog
class Later(Program):
    clock: ClockName
    ty: Program
    _shape = (("clock", "k"), ("ty", "t"))


@_prog
class Isect(Program):
    bound: ClockName
    body: Program
    _shape = (("bound", "cb"), ("body", "c"))


@_prog
class KProd(Program):
    bound: ClockName
    body: Program
    _shape = (("bound", "cb"), ("body", "c"))


@_prog
class Void(Program):
    pass


@_prog
class Unit(Program):
    pass


@_prog
class Bool(Program):
    pass


@_prog
class Nat(Program):
    pass


@_prog
class Univ(Program):
    level: int


_TDEPTH = {"t": 0, "b1": 1, "b3": 3, "c": 0}


def _replace(p: Program, changes: dict) -> Program:
    if not changes:
        return p
    return type(p)(**{f.name: changes.get(f.name, getattr(p, f.name)) for f in fields(p)})


# ---------------------------------------------------------------------------
# scope and substitution

class ScopeMismatch(ValueError):
    pass


def check_scope(m: Program, n: int) -> None:
    """Raise ``ScopeMismatch`` unless every variable of ``m`` is below ``n``."""
    def go(t: Program, depth: int) -> None:
        if isinstance(t, Var):
            if not 0 <= t.index < depth:
                raise ScopeMismatch(f"var {t.index} out of scope {depth}")
            return
        for name, kind in type(t)._shape:
            if kind in _TDEPTH:
                go(getattr(t, name), depth + _TDEPTH[kind])
    go(m, n)


def free_vars(m: Program, n: int) -> set[int]:
    """Variables below ``n`` that occur in ``m`` (``m`` in scope >= n)."""
    out: set[int] = set()

    def go(t: Program) -> None:
        if isinstance(t, Var):
            if t.index < n:
                out.add(t.index)
            return
        for name, kind in type(t)._shape:
            if kind in _TDEPTH:
                go(getattr(t, name))
    go(m)
    return out


def _subst(m: Program, gamma: Sequence[Program], src: int, tgt: int) -> Program:
    """Map a program from scope ``src`` (plus binders) to scope ``tgt``.

    Outer variables ``i < src`` become ``gamma[i]``; variables introduced by
    binders inside ``m`` are renumbered from ``src`` to ``tgt``. A substituted
    term landing under ``d`` binders has its own binder levels raised by ``d``."""
    delta = tgt - src

    def go(t: Program, d: int) -> Program:
        if isinstance(t, Var):
            if t.index < src:
                g = gamma[t.index]
                return _rebase(g, tgt, d) if d else g
            return t if delta == 0 else Var(t.index + delta)
        shape = type(t)._shape
        if not shape:
            return t
        changes = {}
        for name, kind in shape:
            if kind in _TDEPTH:
                old = getattr(t, name)
                new = go(old, d + _TDEPTH[kind])
                if new is not old:
                    changes[name] = new
        return _replace(t, changes)

    return go(m, 0)


def _rebase(t: Program, base: int, d: int) -> Program:
    """Raise every variable ``>= base`` (binders internal to ``t``) by ``d``."""
    def go(t: Program) -> Program:
        if isinstance(t, Var):
            return Var(t.index + d) if t.index >= base else t
        shape = type(t)._shape
        if not shape:
            return t
        changes = {}
        for name, kind in shape:
            if kind in _TDEPTH:
                old = getattr(t, name)
                new = go(old)
                if new is not old:
                    changes[name] = new
        return _replace(t, changes)
    return go(t)


@dataclass(frozen=True)
class Substitution:
    """Maps scope ``len(terms)`` to scope ``target``."""
    terms: tuple
    target: int

    def __post_init__(self):
        for t in self.terms:
            check_scope(t, self.target)


def identity(n: int) -> Substitution:
    return Substitution(tuple(Var(i) for i in range(n)), n)


def subst(gamma: Substitution | Sequence[Program], m: Program, target: int | None = None) -> Program:
    """Simultaneous substitution. ``m`` must be in scope ``len(gamma)``."""
    if isinstance(gamma, Substitution):
        terms, tgt = gamma.terms, gamma.target
    else:
        terms = tuple(gamma)
        tgt = 0 if target is None else target
    check_scope(m, len(terms))
    return _subst(m, terms, len(terms), tgt)


def subst_top(body: Program, arg: Program, scope: int = 0) -> Program:
    """Instantiate the innermost binder of a body at ``scope + 1`` with ``arg``."""
    gamma = [Var(i) for i in range(scope)] + [arg]
    return _subst(body, gamma, scope + 1, scope)


def weaken(m: Program, src: int, tgt: int) -> Program:
    """Move the binder-internal variables of ``m`` from base ``src`` to ``tgt``."""
    return _rebase(m, src, tgt - src)


# ---------------------------------------------------------------------------
# clocks

def free_clocks(m: Program) -> set[ClockName]:
    out: set[ClockName] = set()

    def go(t: Program, bound: frozenset) -> None:
        shape = type(t)._shape
        if not shape:
            return
        inner = bound
        for name, kind in shape:
            v = getattr(t, name)
            if kind == "cb":
                inner = bound | {v}
            elif kind == "k":
                if v not in bound:
                    out.add(v)
            elif kind == "c":
                go(v, inner)
            else:
                go(v, bound)
    go(m, frozenset())
    return out


def rename_clocks(m: Program, mapping: dict) -> Program:
    """Capture-avoiding simultaneous renaming of free clocks."""
    if not mapping:
        return m
    targets = set(mapping.values())

    def go(t: Program, mp: dict) -> Program:
        shape = type(t)._shape
        if not shape:
            return t
        changes = {}
        if shape[0][1] == "cb":
            b = getattr(t, "bound")
            body = getattr(t, "body")
            inner = {k: v for k, v in mp.items() if k != b}
            if not inner:
                return t
            if b in targets and any(k in free_clocks(body) for k in inner):
                nb = fresh_clock(free_clocks(body) | targets | set(inner), b.atom + "'")
                inner[b] = nb
                changes["bound"] = nb
            new = go(body, inner)
            if new is not body:
                changes["body"] = new
            return _replace(t, changes)
        for name, kind in shape:
            v = getattr(t, name)
            if kind == "k":
                if v in mp:
                    changes[name] = mp[v]
            else:
                nv = go(v, mp)
                if nv is not v:
                    changes[name] = nv
        return _replace(t, changes)

    return go(m, dict(mapping))


def instantiate_clock(body: Program, bound: ClockName, kappa: ClockName) -> Program:
    """Rename ``bound`` to ``kappa`` in a clock-binder body."""
    if bound == kappa:
        return body
    return rename_clocks(body, {bound: kappa})


# ---------------------------------------------------------------------------
# alpha equality, printing, serialization

def canon(m: Program) -> Program:
    """Canonical representative: clock binders renamed by nesting depth.

    Canonical names start with ``%``, which parsed or generated clock names
    never do, so ``canon(a) == canon(b)`` iff ``a`` and ``b`` are alpha-equal."""
    def go(t: Program, mp: dict, depth: int) -> Program:
        shape = type(t)._shape
        if not shape:
            return t
        changes = {}
        if shape[0][1] == "cb":
            nb = ClockName(f"%{depth}")
            body = go(t.body, {**mp, t.bound: nb}, depth + 1)
            return type(t)(nb, body)
        for name, kind in shape:
            v = getattr(t, name)
            if kind == "k":
                if v in mp:
                    changes[name] = mp[v]
            else:
                nv = go(v, mp, depth)
                if nv is not v:
                    changes[name] = nv
        return _replace(t, changes)
    return go(m, {}, 0)


def alpha_eq(a: Program, b: Program) -> bool:
    return a == b or canon(a) == canon(b)


def size(m: Program) -> int:
    n = 1
    for name, kind in type(m)._shape:
        if kind in _TDEPTH:
            n += size(getattr(m, name))
    return n


_TAGS = {
    Var: "var", Lam: "lam", KLam: "klam", App: "app", CApp: "capp", Fix: "fix",
    Pair: "pair", Fst: "fst", Snd: "snd", Star: "star", Tt: "tt", Ff: "ff",
    Ze: "ze", Su: "su", If: "if", IfZe: "ifze", Sup: "sup", WRec: "wrec",
    Pi: "pi", Sg: "sg", WTy: "wty", Eq: "eq", Later: "later", Isect: "isect",
    KProd: "kprod", Void: "void", Unit: "unit", Bool: "bool", Nat: "nat", Univ: "univ",
}
_BY_TAG = {v: k for k, v in _TAGS.items()}


def show(m: Program) -> str:
    """Stable debug form, e.g. ``app(lam(var 0), tt)``."""
    if isinstance(m, Var):
        return f"var {m.index}"
    if isinstance(m, Univ):
        return f"univ({m.level})"
    tag = _TAGS[type(m)]
    parts = []
    for name, kind in type(m)._shape:
        v = getattr(m, name)
        parts.append(v.atom if kind in ("k", "cb") else show(v))
    return f"{tag}({', '.join(parts)})" if parts else tag


def to_json(m: Program) -> dict:
    if isinstance(m, Var):
        return {"tag": "var", "index": m.index}
    if isinstance(m, Univ):
        return {"tag": "univ", "level": m.level}
    out: dict = {"tag": _TAGS[type(m)]}
    for name, kind in type(m)._shape:
        v = getattr(m, name)
        out[name] = v.atom if kind in ("k", "cb") else to_json(v)
    return out


def from_json(d: dict) -> Program:
    cls = _BY_TAG[d["tag"]]
    if cls is Var:
        return Var(int(d["index"]))
    if cls is Univ:
        return Univ(int(d["level"]))
    kwargs = {}
    for name, kind in cls._shape:
        v = d[name]
        kwargs[name] = ClockName(v) if kind in ("k", "cb") else from_json(v)
    return cls(**kwargs)
