"""Judgments, the validated rule schemas, derivation trees and their checker.

A rule is a function from a conclusion (plus explicit instantiation of the
metavariables the conclusion does not determine) to the list of premises it
demands. Checking a derivation recomputes the premises at each node and
compares them, up to alpha and renaming of context variables, with the
conclusions of the sub-derivations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from . import opsem
from . import program as P
from . import syntax as S
from .elaborate import ElabError, elab_term, generic_env
from .syntax import Term

__all__ = [
    "EqMem", "OpenConv", "Judgment", "mem", "RULES", "RuleError", "Derivation", "LemmaRef",
    "ConvCert", "CheckError", "NodeReport", "check", "check_report", "render_judgment",
    "canonical", "well_formed", "ScriptParser", "Script", "LemmaReport", "check_script",
    "load_script", "DEFAULT_CONV_FUEL",
]

DEFAULT_CONV_FUEL = 1000


# ---------------------------------------------------------------------------
# judgments

@dataclass(frozen=True)
class EqMem:
    """``clocks ; ctx >> lhs = rhs : ty``."""
    clocks: tuple
    ctx: tuple          # ((name, Term), ...)
    lhs: Term
    rhs: Term
    ty: Term

    @property
    def names(self) -> tuple:
        return tuple(x for x, _ in self.ctx)


@dataclass(frozen=True)
class OpenConv:
    """``clocks ; variables >> lhs ~ rhs``."""
    clocks: tuple
    variables: tuple
    lhs: Term
    rhs: Term


Judgment = EqMem | OpenConv


def mem(clocks, ctx, m: Term, a: Term) -> EqMem:
    return EqMem(tuple(clocks), tuple(ctx), m, m, a)


def render_judgment(j: Judgment) -> str:
    d = ", ".join(j.clocks) or "."
    if isinstance(j, OpenConv):
        v = ", ".join(j.variables) or "."
        return f"{d} ; {v} |- {j.lhs} ~ {j.rhs}"
    g = ", ".join(f"{x} : {a}" for x, a in j.ctx) or "."
    if j.lhs == j.rhs:
        return f"{d} ; {g} |- {j.lhs} in {j.ty}"
    return f"{d} ; {g} |- {j.lhs} = {j.rhs} : {j.ty}"


def canonical(j: Judgment) -> Judgment:
    """Rename context clocks and variables positionally."""
    cmap = {k: f"#c{i}" for i, k in enumerate(j.clocks)}

    def rc(t: Term) -> Term:
        for k, k2 in cmap.items():
            t = S.subst_clock_formal(t, k, k2)
        return t

    if isinstance(j, OpenConv):
        vmap = {x: f"#v{i}" for i, x in enumerate(j.variables)}

        def rv(t):
            for x, y in vmap.items():
                t = S.subst_formal(t, x, S.Ident(y))
            return rc(t)
        return OpenConv(tuple(cmap.values()), tuple(vmap.values()), rv(j.lhs), rv(j.rhs))
    vmap = {x: f"#v{i}" for i, (x, _) in enumerate(j.ctx)}

    def rv(t):
        for x, y in vmap.items():
            t = S.subst_formal(t, x, S.Ident(y))
        return rc(t)
    ctx = tuple((vmap[x], rv(a)) for x, a in j.ctx)
    return EqMem(tuple(cmap.values()), ctx, rv(j.lhs), rv(j.rhs), rv(j.ty))


def same_judgment(a: Judgment, b: Judgment) -> bool:
    return type(a) is type(b) and canonical(a) == canonical(b)


def well_formed(j: Judgment) -> None:
    """Raise ``RuleError`` unless contexts are duplicate-free and everything scope-checks."""
    if len(set(j.clocks)) != len(j.clocks):
        raise RuleError("duplicate clock in context", "scope")
    try:
        if isinstance(j, OpenConv):
            if len(set(j.variables)) != len(j.variables):
                raise RuleError("duplicate variable in context", "scope")
            for t in (j.lhs, j.rhs):
                S.scope_check(t, j.clocks, j.variables)
            return
        names: list[str] = []
        for x, a in j.ctx:
            S.scope_check(a, j.clocks, names)
            if x in names:
                raise RuleError(f"duplicate variable {x} in context", "scope")
            names.append(x)
        for t in (j.lhs, j.rhs, j.ty):
            S.scope_check(t, j.clocks, names)
    except S.ScopeError as e:
        raise RuleError(str(e), "scope") from None


# ---------------------------------------------------------------------------
# rule schemas

class RuleError(Exception):
    def __init__(self, msg: str, kind: str = "schema"):
        super().__init__(msg)
        self.kind = kind


class Inst:
    """Rule instantiation with typed access and unused-key detection."""

    def __init__(self, data: Mapping):
        self.data = dict(data)
        self.used: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self.data

    def get(self, key: str, default=None):
        if key in self.data:
            self.used.add(key)
            return self.data[key]
        return default

    def term(self, key: str, default: Term | None = None) -> Term:
        v = self.get(key, default)
        if v is None:
            raise RuleError(f"missing binding {key}=...", "binding")
        if not isinstance(v, Term):
            raise RuleError(f"binding {key} must be a term", "binding")
        return v

    def level(self, key: str = "i", default: int | None = 0) -> int:
        v = self.get(key, default)
        if not isinstance(v, int) or v < 0:
            raise RuleError(f"binding {key} must be a universe index", "binding")
        return v

    def name(self, key: str) -> str | None:
        v = self.get(key)
        if v is None:
            return None
        if isinstance(v, S.Ident):
            return v.name
        if isinstance(v, str):
            return v
        raise RuleError(f"binding {key} must be a name", "binding")

    def unused(self) -> list[str]:
        return sorted(set(self.data) - self.used)


def _need(cond: bool, msg: str, kind: str = "schema") -> None:
    if not cond:
        raise RuleError(msg, kind)


def _as_mem(c: Judgment) -> EqMem:
    _need(isinstance(c, EqMem), "conclusion must be an equality/membership judgment")
    return c


def _as_conv(c: Judgment) -> OpenConv:
    _need(isinstance(c, OpenConv), "conclusion must be an open conversion judgment")
    return c


def _univ(t: Term, what: str = "type") -> int:
    _need(isinstance(t, S.Univ), f"{what} must be a universe, found {t}")
    return t.level


def _shape(t: Term, cls, what: str):
    _need(isinstance(t, cls), f"{what} must have the form {cls.__name__}, found {t}")
    return t


def _avoid(c: EqMem) -> set[str]:
    out = set(c.clocks) | set(c.names)
    for t in (c.lhs, c.rhs, c.ty, *(a for _, a in c.ctx)):
        out |= S.free_vars(t) | S.free_clocks(t)
    return out


def _new_var(c: EqMem, hint: str, inst: Inst, key: str = "x") -> str:
    chosen = inst.name(key)
    if chosen is not None:
        _need(chosen not in _avoid(c), f"binding {key}={chosen} is not fresh", "binding")
        return chosen
    return S.fresh_name(hint if hint and hint != "_" else "x", _avoid(c) | S.KEYWORDS)


def _new_clock(c: EqMem, hint: str, inst: Inst, key: str = "k") -> str:
    chosen = inst.name(key)
    if chosen is not None:
        _need(chosen not in _avoid(c), f"binding {key}={chosen} is not fresh", "binding")
        return chosen
    return S.fresh_name(hint or "k", _avoid(c) | S.KEYWORDS)


def _j(c: EqMem, lhs: Term, rhs: Term, ty: Term, *, clocks=None, ctx=None) -> EqMem:
    return EqMem(c.clocks if clocks is None else tuple(clocks),
                 c.ctx if ctx is None else tuple(ctx), lhs, rhs, ty)


def _inst_term(body: Term, n: Term) -> Term:
    return S.subst_formal(S.open_term(body, "#arg"), "#arg", n)


def _free_clock(c: EqMem, r: S.ClockRef, what: str) -> str:
    _need(isinstance(r, S.Clk), f"{what} must be a clock variable")
    _need(r.name in c.clocks, f"clock {r.name} must belong to the clock context", "side")
    return r.name


RuleFn = Callable[[Judgment, Inst], list]
RULES: dict[str, RuleFn] = {}


def _rule(name: str):
    def deco(fn):
        RULES[name] = fn
        fn.rule_name = name
        return fn
    return deco


@_rule("Conversion.symm")
def _conv_symm(c, inst):
    c = _as_conv(c)
    return [OpenConv(c.clocks, c.variables, c.rhs, c.lhs)]


@_rule("Conversion.trans")
def _conv_trans(c, inst):
    c = _as_conv(c)
    mid = inst.term("M1")
    return [OpenConv(c.clocks, c.variables, c.lhs, mid), OpenConv(c.clocks, c.variables, mid, c.rhs)]


@_rule("General.weakening")
def _weakening(c, inst):
    c = _as_mem(c)
    _need(len(c.ctx) > 0, "weakening needs a non-empty context")
    x = c.ctx[-1][0]
    for t in (c.lhs, c.rhs, c.ty):
        _need(x not in S.free_vars(t), f"weakened variable {x} occurs in the conclusion")
    return [_j(c, c.lhs, c.rhs, c.ty, ctx=c.ctx[:-1])]


@_rule("General.hypothesis")
def _hypothesis(c, inst):
    c = _as_mem(c)
    _need(len(c.ctx) > 0, "hypothesis needs a non-empty context")
    x, a = c.ctx[-1]
    _need(c.lhs == S.Ident(x) and c.rhs == S.Ident(x),
          f"hypothesis concludes the last variable {x} only")
    _need(c.ty == a, f"type {c.ty} differs from the hypothesis type {a}")
    return []


@_rule("General.conv_mem")
def _conv_mem(c, inst):
    c = _as_mem(c)
    m01 = inst.term("M01")
    return [_j(c, m01, c.rhs, c.ty), OpenConv(c.clocks, c.names, c.lhs, m01)]


@_rule("General.conv_ty")
def _conv_ty(c, inst):
    c = _as_mem(c)
    a1 = inst.term("A1")
    return [_j(c, c.lhs, c.rhs, a1), OpenConv(c.clocks, c.names, c.ty, a1)]


@_rule("General.eq_symm")
def _eq_symm(c, inst):
    c = _as_mem(c)
    return [_j(c, c.rhs, c.lhs, c.ty)]


@_rule("General.eq_trans")
def _eq_trans(c, inst):
    c = _as_mem(c)
    mid = inst.term("M1")
    return [_j(c, mid, c.rhs, c.ty), _j(c, c.lhs, mid, c.ty)]


@_rule("General.replace_ty")
def _replace_ty(c, inst):
    c = _as_mem(c)
    a0 = inst.term("A0")
    i = inst.level("i")
    return [_j(c, a0, c.ty, S.Univ(i)), _j(c, c.lhs, c.rhs, a0)]


@_rule("General.univ_formation")
def _univ_formation(c, inst):
    c = _as_mem(c)
    i = _univ(c.lhs, "left side")
    _need(c.rhs == c.lhs, "univ_formation concludes a membership")
    j = _univ(c.ty)
    _need(i < j, f"side condition i < j violated ({i} >= {j})", "side")
    return []


def _axiom(name: str, term: Term, ty_check):
    @_rule(name)
    def fn(c, inst):
        c = _as_mem(c)
        _need(c.lhs == term and c.rhs == term, f"{name} concludes {term} only")
        ty_check(c.ty)
        return []
    return fn


_axiom("Unit.ax_equality", S.Star(), lambda t: _need(t == S.UnitTy(), "type must be unit"))
_axiom("Bool.univ_eq", S.BoolTy(), lambda t: _univ(t))
_axiom("Bool.tt_equality", S.Tt(), lambda t: _need(t == S.BoolTy(), "type must be bool"))
_axiom("Bool.ff_equality", S.Ff(), lambda t: _need(t == S.BoolTy(), "type must be bool"))


def _binder_univ_eq(cls, name):
    @_rule(name)
    def fn(c, inst):
        c = _as_mem(c)
        i = _univ(c.ty)
        l = _shape(c.lhs, cls, "left side")
        r = _shape(c.rhs, cls, "right side")
        x = _new_var(c, l.hint, inst)
        return [_j(c, l.dom, r.dom, c.ty),
                _j(c, S.open_term(l.cod, x), S.open_term(r.cod, x), S.Univ(i),
                   ctx=c.ctx + ((x, l.dom),))]
    return fn


_binder_univ_eq(S.Sg, "Prod.univ_eq")
_binder_univ_eq(S.Pi, "Arr.univ_eq")


@_rule("Prod.intro")
def _prod_intro(c, inst):
    c = _as_mem(c)
    sg = _shape(c.ty, S.Sg, "type")
    l = _shape(c.lhs, S.Pair, "left side")
    r = _shape(c.rhs, S.Pair, "right side")
    i = inst.level("i")
    x = _new_var(c, sg.hint, inst)
    return [_j(c, sg.dom, sg.dom, S.Univ(i)),
            _j(c, S.open_term(sg.cod, x), S.open_term(sg.cod, x), S.Univ(i),
               ctx=c.ctx + ((x, sg.dom),)),
            _j(c, l.left, r.left, sg.dom),
            _j(c, l.right, r.right, _inst_term(sg.cod, l.left))]


@_rule("Arr.intro")
def _arr_intro(c, inst):
    c = _as_mem(c)
    pi = _shape(c.ty, S.Pi, "type")
    l = _shape(c.lhs, S.Lam, "left side")
    r = _shape(c.rhs, S.Lam, "right side")
    i = inst.level("i")
    x = _new_var(c, l.hint, inst)
    ext = c.ctx + ((x, pi.dom),)
    b = S.open_term(pi.cod, x)
    return [_j(c, pi.dom, pi.dom, S.Univ(i)),
            _j(c, b, b, S.Univ(i), ctx=ext),
            _j(c, S.open_term(l.body, x), S.open_term(r.body, x), b, ctx=ext)]


@_rule("Arr.elim")
def _arr_elim(c, inst):
    c = _as_mem(c)
    l = _shape(c.lhs, S.App, "left side")
    r = _shape(c.rhs, S.App, "right side")
    pi = _shape(inst.term("fun_ty"), S.Pi, "binding fun_ty")
    i = inst.level("i")
    _need(c.ty == _inst_term(pi.cod, l.arg),
          f"conclusion type {c.ty} is not [N0/x]B = {_inst_term(pi.cod, l.arg)}")
    x = _new_var(c, pi.hint, inst)
    b = S.open_term(pi.cod, x)
    return [_j(c, pi.dom, pi.dom, S.Univ(i)),
            _j(c, b, b, S.Univ(i), ctx=c.ctx + ((x, pi.dom),)),
            _j(c, l.fn, r.fn, pi),
            _j(c, l.arg, r.arg, pi.dom)]


def _clock_univ_eq(cls, name):
    @_rule(name)
    def fn(c, inst):
        c = _as_mem(c)
        _univ(c.ty)
        l = _shape(c.lhs, cls, "left side")
        r = _shape(c.rhs, cls, "right side")
        k = _new_clock(c, l.hint, inst)
        return [_j(c, S.open_clock(l.body, k), S.open_clock(r.body, k), c.ty,
                   clocks=c.clocks + (k,))]
    return fn


_clock_univ_eq(S.ClkProd, "KArr.univ_eq")
_clock_univ_eq(S.Isect, "Isect.univ_eq")


@_rule("KArr.intro")
def _karr_intro(c, inst):
    c = _as_mem(c)
    ty = _shape(c.ty, S.ClkProd, "type")
    l = _shape(c.lhs, S.KLam, "left side")
    r = _shape(c.rhs, S.KLam, "right side")
    i = inst.level("i")
    k = _new_clock(c, ty.hint, inst)
    a = S.open_clock(ty.body, k)
    ext = c.clocks + (k,)
    return [_j(c, a, a, S.Univ(i), clocks=ext),
            _j(c, S.open_clock(l.body, k), S.open_clock(r.body, k), a, clocks=ext)]


@_rule("KArr.elim")
def _karr_elim(c, inst):
    c = _as_mem(c)
    l = _shape(c.lhs, S.CApp, "left side")
    r = _shape(c.rhs, S.CApp, "right side")
    _need(l.clock == r.clock, "both sides must apply the same clock")
    k1 = _free_clock(c, l.clock, "applied clock")
    prod = _shape(inst.term("all_ty"), S.ClkProd, "binding all_ty")
    i = inst.level("i")
    _need(c.ty == S.open_clock(prod.body, k1),
          f"conclusion type {c.ty} is not [k'/k]A = {S.open_clock(prod.body, k1)}")
    k = _new_clock(c, prod.hint, inst)
    a = S.open_clock(prod.body, k)
    return [_j(c, a, a, S.Univ(i), clocks=c.clocks + (k,)),
            _j(c, l.fn, r.fn, prod)]


@_rule("Isect.intro")
def _isect_intro(c, inst):
    c = _as_mem(c)
    ty = _shape(c.ty, S.Isect, "type")
    i = inst.level("i")
    k = _new_clock(c, ty.hint, inst)
    a = S.open_clock(ty.body, k)
    ext = c.clocks + (k,)
    return [_j(c, c.lhs, c.rhs, a, clocks=ext), _j(c, a, a, S.Univ(i), clocks=ext)]


@_rule("Isect.irrelevance")
def _isect_irrelevance(c, inst):
    c = _as_mem(c)
    i = _univ(c.ty)
    r = _shape(c.rhs, S.Isect, "right side")
    _need(r.hint not in c.clocks, f"side condition {r.hint} ∉ Δ violated", "side")
    _need(not S.mentions_bound(r.body, "clock"),
          f"the intersected type mentions the bound clock {r.hint}")
    _need(r.body == c.lhs, f"right side must be the intersection of the left side {c.lhs}")
    return [_j(c, c.lhs, c.lhs, S.Univ(i))]


@_rule("Isect.preserves_sigma")
def _isect_preserves_sigma(c, inst):
    c = _as_mem(c)
    _univ(c.ty)
    l = _shape(c.lhs, S.Isect, "left side")
    sg = _shape(l.body, S.Sg, "body of the left intersection")
    _need(not S.mentions_bound(sg.cod), "the pair type must be non-dependent")
    r = _shape(c.rhs, S.Sg, "right side")
    _need(not S.mentions_bound(r.cod), "the right pair type must be non-dependent")
    ra = _shape(r.dom, S.Isect, "right first component")
    rb = _shape(r.cod, S.Isect, "right second component")
    _need(ra.body == sg.dom, "right first component must intersect A0")
    _need(rb.body == sg.cod, "right second component must intersect B0")
    k = _new_clock(c, l.hint, inst)
    a0 = S.open_clock(sg.dom, k)
    b0 = S.open_clock(S.open_term(sg.cod, "#unused"), k)
    a1 = _open_binding(inst, "A1", k, a0)
    b1 = _open_binding(inst, "B1", k, b0)
    ext = c.clocks + (k,)
    return [_j(c, a0, a1, c.ty, clocks=ext), _j(c, b0, b1, c.ty, clocks=ext)]


def _open_binding(inst: Inst, key: str, k: str, default: Term) -> Term:
    """Optional binding given as ``isect k. A``; opened at the premise clock."""
    if not inst.has(key):
        return default
    t = _shape(inst.term(key), S.Isect, f"binding {key}")
    return S.open_clock(t.body, k)


@_rule("Later.univ_eq")
def _later_univ_eq(c, inst):
    c = _as_mem(c)
    i = _univ(c.ty)
    l = _shape(c.lhs, S.Later, "left side")
    r = _shape(c.rhs, S.Later, "right side")
    _need(l.clock == r.clock, "both sides must use the same clock")
    k = _free_clock(c, l.clock, "later clock")
    return [_j(c, l.ty, r.ty, S.Later(S.Clk(k), S.Univ(i)))]


@_rule("Later.intro")
def _later_intro(c, inst):
    c = _as_mem(c)
    ty = _shape(c.ty, S.Later, "type")
    _free_clock(c, ty.clock, "later clock")
    i = inst.level("i")
    return [_j(c, c.lhs, c.rhs, ty.ty), _j(c, ty.ty, ty.ty, S.Univ(i))]


@_rule("Later.force")
def _later_force(c, inst):
    c = _as_mem(c)
    _univ(c.ty)
    l = _shape(c.lhs, S.Isect, "left side")
    lt = _shape(l.body, S.Later, "body of the left intersection")
    _need(lt.clock == S.ClkBound(0), "the later must use the intersected clock")
    r = _shape(c.rhs, S.Isect, "right side")
    return [_j(c, S.Isect(lt.ty, l.hint), r, c.ty)]


def _later_preserves(cls, name):
    @_rule(name)
    def fn(c, inst):
        c = _as_mem(c)
        i = _univ(c.ty)
        l = _shape(c.lhs, S.Later, "left side")
        k = _free_clock(c, l.clock, "later clock")
        inner = _shape(l.ty, cls, "body of the later")
        r = _shape(c.rhs, cls, "right side")
        ra = _shape(r.dom, S.Later, "right domain")
        rb = _shape(r.cod, S.Later, "right codomain")
        _need(ra.clock == l.clock and rb.clock == l.clock, "all laters must use the same clock")
        x = _new_var(c, inner.hint, inst)
        a = inst.term("A", inner.dom)
        return [_j(c, inner.dom, ra.ty, c.ty),
                _j(c, S.open_term(inner.cod, x), S.open_term(rb.ty, x),
                   S.Later(S.Clk(k), S.Univ(i)), ctx=c.ctx + ((x, a),))]
    return fn


_later_preserves(S.Pi, "Later.preserves_pi")
_later_preserves(S.Sg, "Later.preserves_sigma")


@_rule("Later.induction")
def _later_induction(c, inst):
    c = _as_mem(c)
    l = _shape(c.lhs, S.Fix, "left side")
    r = _shape(c.rhs, S.Fix, "right side")
    k = inst.name("k")
    if k is None:
        _need(len(c.clocks) > 0, "Later.induction needs a clock in context", "side")
        k = c.clocks[-1]
    _need(k in c.clocks, f"clock {k} must belong to the clock context", "side")
    x = _new_var(c, l.hint, inst)
    return [_j(c, S.open_term(l.body, x), S.open_term(r.body, x), c.ty,
               ctx=c.ctx + ((x, S.Later(S.Clk(k), c.ty)),))]


RULE_NAMES = tuple(RULES)


# ---------------------------------------------------------------------------
# derivations

@dataclass
class Derivation:
    rule: str
    premises: list = field(default_factory=list)
    inst: dict = field(default_factory=dict)
    conclusion: Judgment | None = None
    side: object = None


@dataclass
class LemmaRef:
    name: str
    conclusion: Judgment | None = None


@dataclass
class ConvCert:
    """Discharges an open conversion by search or by an explicit step trace."""
    fuel: int | None = None
    trace: tuple | None = None
    conclusion: Judgment | None = None


class Deferred:
    """A binding written in a script, parsed once the node's context is known."""

    def __init__(self, tokens, defs):
        self.tokens, self.defs = tokens, defs

    def resolve(self, key: str, c: Judgment):
        toks = self.tokens
        if len(toks) == 1 and toks[0].kind == "int":
            return int(toks[0].text)
        if key in ("x", "k") and len(toks) == 1 and toks[0].kind == "ident":
            return toks[0].text
        variables = c.variables if isinstance(c, OpenConv) else c.names
        return _parse_tokens(toks, S.Scope(tuple(variables), tuple(c.clocks), self.defs))


def _parse_tokens(toks, scope: S.Scope) -> Term:
    end = toks[-1]
    p = S.TermParser(list(toks) + [S.Token("eof", "", end.line, end.col)], 0, scope)
    t = p.term()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r} in binding")
    return t


@dataclass
class NodeReport:
    label: str
    judgment: str
    status: str            # ok | error | unchecked
    message: str = ""
    children: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"rule": self.label, "judgment": self.judgment, "status": self.status,
                "message": self.message, "premises": [ch.to_json() for ch in self.children]}


@dataclass
class CheckError:
    path: str
    explanation: str
    kind: str

    def __str__(self) -> str:
        return f"{self.path}: {self.explanation}"


class _Fail(Exception):
    def __init__(self, err: CheckError):
        self.err = err


class _Checker:
    def __init__(self, env: Mapping[str, Judgment], fuel: int):
        self.env = env
        self.fuel = fuel

    def node(self, d, expected: Judgment | None, path: str) -> NodeReport:
        label = _label(d)
        here = f"{path} > {label}" if path else label
        concl = d.conclusion if d.conclusion is not None else expected
        rep = NodeReport(label, render_judgment(concl) if concl else "?", "error")
        try:
            if concl is None:
                raise _Fail(CheckError(here, "no conclusion to check", "schema"))
            if expected is not None and d.conclusion is not None and not same_judgment(d.conclusion, expected):
                raise _Fail(CheckError(here, "premise mismatch: the rule needs "
                                       f"{render_judgment(expected)} but the sub-derivation proves "
                                       f"{render_judgment(d.conclusion)}", "premise"))
            try:
                well_formed(concl)
            except RuleError as e:
                raise _Fail(CheckError(here, f"ill-scoped judgment: {e}", "scope"))
            if isinstance(d, LemmaRef):
                self.lemma(d, concl, here)
            elif isinstance(d, ConvCert):
                self.conv(d, concl, here)
            else:
                self.rule(d, concl, here, rep)
        except _Fail as f:
            rep.message = f.err.explanation
            rep.status = "error"
            rep.error = f.err
            return rep
        rep.status = "ok"
        return rep

    def lemma(self, d: LemmaRef, concl: Judgment, here: str) -> None:
        if d.name not in self.env:
            raise _Fail(CheckError(here, f"unknown lemma {d.name}", "lemma"))
        if not same_judgment(self.env[d.name], concl):
            raise _Fail(CheckError(here, f"lemma {d.name} proves {render_judgment(self.env[d.name])}, "
                                   f"not {render_judgment(concl)}", "lemma"))

    def conv(self, d: ConvCert, concl: Judgment, here: str) -> None:
        if not isinstance(concl, OpenConv):
            raise _Fail(CheckError(here, "a conversion certificate only proves open conversions", "schema"))
        rho = generic_env(concl.clocks)
        trace = d.trace
        if trace is not None:
            try:
                trace = [t.resolve("step", concl) if isinstance(t, Deferred) else t for t in trace]
            except (S.ParseError, ValueError) as e:
                raise _Fail(CheckError(here, f"bad step term: {e}", "binding"))
        try:
            elab = lambda t: elab_term(concl.clocks, concl.variables, t, rho)
            lhs, rhs = elab(concl.lhs), elab(concl.rhs)
            n = len(concl.variables)
            if trace is not None:
                cur = lhs
                for t in trace + [concl.rhs]:
                    nxt = elab(t)
                    if P.alpha_eq(cur, nxt):
                        continue
                    res = opsem.step(cur, n)
                    if not (isinstance(res, opsem.Stepped) and P.alpha_eq(res.term, nxt)):
                        raise _Fail(CheckError(here, f"trace step to {t} is not a single reduction step",
                                               "conversion"))
                    cur = nxt
                return
        except ElabError as e:
            raise _Fail(CheckError(here, str(e), "scope"))
        fuel = d.fuel if d.fuel is not None else self.fuel
        if opsem.open_conv(n, lhs, rhs, fuel) is not opsem.Tri.YES:
            raise _Fail(CheckError(here, f"conversion Unknown within fuel {fuel}: "
                                   f"{concl.lhs} ~ {concl.rhs}", "conversion"))

    def rule(self, d: Derivation, concl: Judgment, here: str, rep: NodeReport) -> None:
        fn = RULES.get(d.rule)
        if fn is None:
            raise _Fail(CheckError(here, f"unknown rule {d.rule}", "rule"))
        try:
            data = {k: (v.resolve(k, concl) if isinstance(v, Deferred) else v)
                    for k, v in d.inst.items()}
        except (S.ParseError, ValueError) as e:
            raise _Fail(CheckError(here, f"bad binding: {e}", "binding"))
        inst = Inst(data)
        try:
            expected = fn(concl, inst)
        except RuleError as e:
            kind = "side-condition" if e.kind == "side" else e.kind
            raise _Fail(CheckError(here, f"{kind} failure: {e}", e.kind))
        extra = inst.unused()
        if extra:
            raise _Fail(CheckError(here, f"unused binding(s) {', '.join(extra)} for {d.rule}", "binding"))
        if len(d.premises) != len(expected):
            raise _Fail(CheckError(here, f"{d.rule} takes {len(expected)} premise(s), "
                                   f"{len(d.premises)} given", "arity"))
        failure = None
        for idx, (sub, exp) in enumerate(zip(d.premises, expected)):
            if failure is not None:
                rep.children.append(NodeReport(_label(sub), render_judgment(exp), "unchecked"))
                continue
            child = self.node(sub, exp, f"{here} [{idx}]")
            rep.children.append(child)
            if child.status == "error":
                failure = child.error
        if failure is not None:
            rep.status = "error"
            raise _Fail(failure)


def _label(d) -> str:
    if isinstance(d, LemmaRef):
        return f"cite {d.name}"
    if isinstance(d, ConvCert):
        return "steps" if d.trace is not None else "conv"
    return d.rule


def check_report(d, env: Mapping[str, Judgment] | None = None,
                 fuel: int = DEFAULT_CONV_FUEL, goal: Judgment | None = None):
    """Check ``d`` (against ``goal`` when given). Returns (error or None, report tree)."""
    rep = _Checker(env or {}, fuel).node(d, goal, "")
    return getattr(rep, "error", None) if rep.status == "error" else None, rep


def check(d, env: Mapping[str, Judgment] | None = None, fuel: int = DEFAULT_CONV_FUEL,
          goal: Judgment | None = None) -> CheckError | None:
    """``None`` when the derivation checks, otherwise the first failure."""
    return check_report(d, env, fuel, goal)[0]


# ---------------------------------------------------------------------------
# scripts

@dataclass
class LemmaDecl:
    name: str
    judgment: Judgment
    proof: object
    line: int
    text: str = ""


@dataclass
class Script:
    defs: dict
    lemmas: list


@dataclass
class LemmaReport:
    name: str
    judgment: str
    ok: bool
    error: CheckError | None
    tree: NodeReport

    def to_json(self) -> dict:
        return {"lemma": self.name, "judgment": self.judgment, "status": "ok" if self.ok else "error",
                "error": None if self.error is None else
                {"path": self.error.path, "message": self.error.explanation, "kind": self.error.kind},
                "derivation": self.tree.to_json()}


class ScriptParser:
    """Reads ``def``, ``proof`` and ``lemma`` items."""

    def __init__(self, text: str):
        self.text = text
        self.toks = S.Lexer(text).tokens()
        starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                starts.append(i + 1)
        self._starts = starts
        self.pos = 0
        self.defs: dict[str, Term] = {}
        self.proofs: dict[str, object] = {}

    def peek(self):
        return self.toks[self.pos]

    def _offset(self, tok) -> int:
        return self._starts[tok.line - 1] + tok.col - 1

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str):
        t = self.next()
        if t.text != text:
            raise S.ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def ident(self):
        t = self.next()
        if t.kind != "ident":
            raise S.ParseError(f"expected a name, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def term(self, scope: S.Scope) -> Term:
        p = S.TermParser(self.toks, self.pos, scope)
        t = p.term()
        self.pos = p.pos
        return t

    def parse(self) -> Script:
        lemmas = []
        while self.peek().kind != "eof":
            t = self.next()
            if t.text == "def":
                name = self.ident().text
                self.expect(":=")
                self.defs[name] = self.term(S.Scope(defs=self.defs))
                self.expect(";")
            elif t.text == "proof":
                name = self.ident().text
                self.expect(":=")
                self.expect("{")
                self.proofs[name] = self.node()
                self.expect("}")
                self.expect(";")
            elif t.text == "lemma":
                name = self.ident().text
                self.expect(":")
                first = self.peek()
                j = self.judgment()
                by = self.expect("by")
                src = " ".join(self.text[self._offset(first):self._offset(by)].split())
                self.expect("{")
                proof = self.node()
                self.expect("}")
                self.expect(";")
                lemmas.append(LemmaDecl(name, j, proof, t.line, src))
            else:
                raise S.ParseError(f"unknown keyword {t.text!r}", t.line, t.col)
        return Script(dict(self.defs), lemmas)

    def judgment(self) -> Judgment:
        clocks: list[str] = []
        if self.peek().text == ".":
            self.next()
        else:
            clocks.append(self.ident().text)
            while self.peek().text == ",":
                self.next()
                clocks.append(self.ident().text)
        self.expect(";")
        ctx: list = []
        plain: list[str] = []
        if self.peek().text == ".":
            self.next()
        else:
            while True:
                x = self.ident().text
                if self.peek().text == ":":
                    self.next()
                    a = self.term(S.Scope(tuple(n for n, _ in ctx), tuple(clocks), self.defs))
                    ctx.append((x, a))
                else:
                    plain.append(x)
                if self.peek().text != ",":
                    break
                self.next()
        self.expect("|-")
        names = tuple(plain) if plain else tuple(n for n, _ in ctx)
        scope = S.Scope(names, tuple(clocks), self.defs)
        lhs = self.term(scope)
        t = self.next()
        if t.text == "~":
            if ctx:
                raise S.ParseError("an open conversion context lists variables only", t.line, t.col)
            return OpenConv(tuple(clocks), tuple(plain), lhs, self.term(scope))
        if plain:
            raise S.ParseError("context entries need types: x : A", t.line, t.col)
        if t.text == "in":
            return EqMem(tuple(clocks), tuple(ctx), lhs, lhs, self.term(scope))
        if t.text == "=":
            rhs = self.term(scope)
            self.expect(":")
            return EqMem(tuple(clocks), tuple(ctx), lhs, rhs, self.term(scope))
        raise S.ParseError(f"expected '=', 'in' or '~', found {t.text!r}", t.line, t.col)

    def node(self):
        t = self.next()
        if t.kind == "rule":
            binds = self.bindings() if self.peek().text == "(" else {}
            kids = []
            if self.peek().text == "{":
                self.next()
                if self.peek().text != "}":
                    kids.append(self.node())
                    while self.peek().text == ";":
                        self.next()
                        kids.append(self.node())
                self.expect("}")
            return Derivation(t.text, kids, binds)
        if t.text == "cite":
            return LemmaRef(self.ident().text)
        if t.text == "reuse":
            name = self.ident()
            if name.text not in self.proofs:
                raise S.ParseError(f"unknown proof {name.text!r}", name.line, name.col)
            return _clone(self.proofs[name.text])
        if t.text == "conv":
            fuel = None
            if self.peek().text == "(":
                b = self.bindings()
                if set(b) - {"fuel"}:
                    raise S.ParseError("conv accepts only fuel=N", t.line, t.col)
                if "fuel" in b:
                    fuel = int(b["fuel"].tokens[0].text)
            return ConvCert(fuel=fuel)
        if t.text == "steps":
            self.expect("{")
            chunks = [[]]
            depth = 0
            while True:
                tok = self.next()
                if tok.kind == "eof":
                    raise S.ParseError("unterminated steps block", tok.line, tok.col)
                if tok.text in ("(", "<", "{"):
                    depth += 1
                elif tok.text in (")", ">", "}"):
                    if depth == 0 and tok.text == "}":
                        break
                    depth -= 1
                if tok.text == ";" and depth == 0:
                    chunks.append([])
                else:
                    chunks[-1].append(tok)
            return ConvCert(trace=tuple(Deferred(c, self.defs) for c in chunks if c))
        if t.text == "show":
            j = self.judgment()
            self.expect("by")
            inner = self.node()
            inner.conclusion = j
            return inner
        raise S.ParseError(f"expected a rule name, cite, reuse, conv, steps or show; found {t.text!r}",
                           t.line, t.col)

    def bindings(self) -> dict:
        self.expect("(")
        out: dict = {}
        while self.peek().text != ")":
            key = self.ident().text
            self.expect("=")
            toks = []
            depth = 0
            while True:
                tok = self.peek()
                if tok.kind == "eof":
                    raise S.ParseError("unterminated bindings", tok.line, tok.col)
                if depth == 0 and tok.text in (",", ")"):
                    break
                if tok.text in ("(", "<"):
                    depth += 1
                elif tok.text in (")", ">"):
                    depth -= 1
                toks.append(self.next())
            if not toks:
                raise S.ParseError(f"empty binding {key}", tok.line, tok.col)
            out[key] = Deferred(toks, self.defs)
            if self.peek().text == ",":
                self.next()
        self.expect(")")
        return out


def _clone(d):
    if isinstance(d, Derivation):
        return Derivation(d.rule, [_clone(p) for p in d.premises], dict(d.inst), d.conclusion, d.side)
    if isinstance(d, LemmaRef):
        return LemmaRef(d.name, d.conclusion)
    return ConvCert(d.fuel, d.trace, d.conclusion)


def load_script(text: str) -> Script:
    return ScriptParser(text).parse()


def check_script(source: str | Script, fuel: int = DEFAULT_CONV_FUEL,
                 env: Mapping[str, Judgment] | None = None) -> list[LemmaReport]:
    """Check every lemma in order; proved lemmas become citable."""
    script = load_script(source) if isinstance(source, str) else source
    table: dict[str, Judgment] = dict(env or {})
    out = []
    for lem in script.lemmas:
        rep = _Checker(table, fuel).node(lem.proof, lem.judgment, "")
        err = getattr(rep, "error", None) if rep.status == "error" else None
        if err is None:
            table[lem.name] = lem.judgment
        out.append(LemmaReport(lem.name, lem.text or render_judgment(lem.judgment), err is None, err, rep))
    return out
