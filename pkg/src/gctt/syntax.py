"""Formal terms: representation, parsing, printing, scoping and substitution.

Terms are locally nameless. Free term variables are ``Ident`` and free clocks
are ``Clk``; bound occurrences are de Bruijn indices (``Bound`` / ``ClkBound``)
counted separately for the two sorts. Binder names survive only as printing
hints that do not take part in equality, so alpha-equivalent terms compare
equal with plain ``==``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Callable, Iterator

__all__ = [
    "Term", "ClockRef", "Clk", "ClkBound",
    "Ident", "Bound", "Lam", "KLam", "App", "CApp", "Pair", "Fst", "Snd", "Fix",
    "Star", "Tt", "Ff", "If", "Ze", "Su", "IfZe", "Sup", "WRec",
    "Pi", "Sg", "WTy", "Eq", "ClkProd", "Isect", "Later",
    "Void", "UnitTy", "BoolTy", "NatTy", "Univ",
    "ParseError", "ScopeError", "Scope",
    "parse", "parse_with", "pretty", "scope_check", "subst_formal", "subst_clock_formal",
    "open_term", "close_term", "open_clock", "close_clock",
    "free_vars", "free_clocks", "mentions_bound", "fresh_name",
    "arrow", "times", "Lexer", "Token", "TermParser",
]


# ---------------------------------------------------------------------------
# clock references

class ClockRef:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Clk(ClockRef):
    name: str


@dataclass(frozen=True, slots=True)
class ClkBound(ClockRef):
    index: int


# ---------------------------------------------------------------------------
# terms
#
# Each class lists its children in ``_shape`` as (field, kind) with kinds
#   "t"  subterm at the same binder depth
#   "b1" subterm under one term binder, "b3" under three term binders
#   "c"  subterm under one clock binder
#   "k"  clock reference
# Everything else (indices, hints) is inert data.

class Term:
    __slots__ = ()
    _shape: tuple = ()

    def __str__(self) -> str:
        return pretty(self)


def _term(cls):
    return dataclass(frozen=True, slots=True)(cls)


@_term
class Ident(Term):
    name: str


@_term
class Bound(Term):
    index: int


@_term
class Lam(Term):
    body: Term
    hint: str = field(default="x", compare=False)
    _shape = (("body", "b1"),)


@_term
class KLam(Term):
    body: Term
    hint: str = field(default="k", compare=False)
    _shape = (("body", "c"),)


@_term
class App(Term):
    fn: Term
    arg: Term
    _shape = (("fn", "t"), ("arg", "t"))


@_term
class CApp(Term):
    fn: Term
    clock: ClockRef
    _shape = (("fn", "t"), ("clock", "k"))


@_term
class Pair(Term):
    left: Term
    right: Term
    _shape = (("left", "t"), ("right", "t"))


@_term
class Fst(Term):
    arg: Term
    _shape = (("arg", "t"),)


@_term
class Snd(Term):
    arg: Term
    _shape = (("arg", "t"),)


@_term
class Fix(Term):
    body: Term
    hint: str = field(default="x", compare=False)
    _shape = (("body", "b1"),)


@_term
class Star(Term):
    pass


@_term
class Tt(Term):
    pass


@_term
class Ff(Term):
    pass


@_term
class If(Term):
    cond: Term
    then: Term
    orelse: Term
    _shape = (("cond", "t"), ("then", "t"), ("orelse", "t"))


@_term
class Ze(Term):
    pass


@_term
class Su(Term):
    arg: Term
    _shape = (("arg", "t"),)


@_term
class IfZe(Term):
    """Case split on a natural; the successor branch binds the predecessor."""
    scrut: Term
    zero: Term
    succ: Term
    hint: str = field(default="n", compare=False)
    _shape = (("scrut", "t"), ("zero", "t"), ("succ", "b1"))


@_term
class Sup(Term):
    label: Term
    branches: Term
    hint: str = field(default="x", compare=False)
    _shape = (("label", "t"), ("branches", "b1"))


@_term
class WRec(Term):
    """W recursor; the body binds label, branch family and recursive results
    (indices 2, 1, 0 respectively)."""
    arg: Term
    body: Term
    hints: tuple = field(default=("x", "y", "z"), compare=False)
    _shape = (("arg", "t"), ("body", "b3"))


@_term
class Pi(Term):
    dom: Term
    cod: Term
    hint: str = field(default="x", compare=False)
    _shape = (("dom", "t"), ("cod", "b1"))


@_term
class Sg(Term):
    dom: Term
    cod: Term
    hint: str = field(default="x", compare=False)
    _shape = (("dom", "t"), ("cod", "b1"))


@_term
class WTy(Term):
    dom: Term
    cod: Term
    hint: str = field(default="x", compare=False)
    _shape = (("dom", "t"), ("cod", "b1"))


@_term
class Eq(Term):
    ty: Term
    left: Term
    right: Term
    _shape = (("ty", "t"), ("left", "t"), ("right", "t"))


@_term
class ClkProd(Term):
    body: Term
    hint: str = field(default="k", compare=False)
    _shape = (("body", "c"),)


@_term
class Isect(Term):
    body: Term
    hint: str = field(default="k", compare=False)
    _shape = (("body", "c"),)


@_term
class Later(Term):
    clock: ClockRef
    ty: Term
    _shape = (("clock", "k"), ("ty", "t"))


@_term
class Void(Term):
    pass


@_term
class UnitTy(Term):
    pass


@_term
class BoolTy(Term):
    pass


@_term
class NatTy(Term):
    pass


@_term
class Univ(Term):
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("universe index must be non-negative")


def arrow(a: Term, b: Term) -> Pi:
    """Non-dependent function type; ``b`` must be locally closed."""
    return Pi(a, _shift_for_binder(b), "_")


def times(a: Term, b: Term) -> Sg:
    return Sg(a, _shift_for_binder(b), "_")


def _shift_for_binder(t: Term) -> Term:
    # a locally closed term needs no shifting when placed under a binder
    return t


# ---------------------------------------------------------------------------
# generic traversal

def _rebuild(t: Term, f_term: Callable[[Term, str], Term],
             f_clock: Callable[[ClockRef], ClockRef]) -> Term:
    shape = type(t)._shape
    if not shape:
        return t
    changes = {}
    for name, kind in shape:
        val = getattr(t, name)
        new = f_clock(val) if kind == "k" else f_term(val, kind)
        if new is not val:
            changes[name] = new
    if not changes:
        return t
    kwargs = {f.name: changes.get(f.name, getattr(t, f.name)) for f in fields(t)}
    return type(t)(**kwargs)


def _children(t: Term) -> Iterator[tuple[str, str, object]]:
    for name, kind in type(t)._shape:
        yield name, kind, getattr(t, name)


_TDEPTH = {"t": 0, "b1": 1, "b3": 3, "c": 0}
_CDEPTH = {"t": 0, "b1": 0, "b3": 0, "c": 1}


def _map_vars(t: Term, on_var: Callable[[Term, int], Term],
              on_clock: Callable[[ClockRef, int], ClockRef],
              td: int = 0, cd: int = 0) -> Term:
    """Structure-preserving map over variable and clock leaves.

    ``td``/``cd`` are the numbers of enclosing term/clock binders."""
    if isinstance(t, (Ident, Bound)):
        return on_var(t, td)

    def ft(sub: Term, kind: str) -> Term:
        return _map_vars(sub, on_var, on_clock, td + _TDEPTH[kind], cd + _CDEPTH[kind])

    return _rebuild(t, ft, lambda c: on_clock(c, cd))


def _keep_clock(c: ClockRef, _cd: int) -> ClockRef:
    return c


def _keep_var(v: Term, _td: int) -> Term:
    return v


def open_term(body: Term, name: str, k: int = 0) -> Term:
    """Replace the bound variable at relative index ``k`` by ``Ident(name)``."""
    def on_var(v, td):
        if isinstance(v, Bound) and v.index == td + k:
            return Ident(name)
        return v
    return _map_vars(body, on_var, _keep_clock)


def close_term(body: Term, name: str, k: int = 0) -> Term:
    def on_var(v, td):
        if isinstance(v, Ident) and v.name == name:
            return Bound(td + k)
        return v
    return _map_vars(body, on_var, _keep_clock)


def open_clock(body: Term, name: str) -> Term:
    def on_clock(c, cd):
        if isinstance(c, ClkBound) and c.index == cd:
            return Clk(name)
        return c
    return _map_vars(body, _keep_var, on_clock)


def close_clock(body: Term, name: str) -> Term:
    def on_clock(c, cd):
        if isinstance(c, Clk) and c.name == name:
            return ClkBound(cd)
        return c
    return _map_vars(body, _keep_var, on_clock)


def subst_formal(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``[n/x]m``.

    Bound variables are indices, so capture cannot happen; renaming of
    clashing binder names is a printing concern only."""
    return _map_vars(m, lambda v, td: n if isinstance(v, Ident) and v.name == x else v,
                     _keep_clock)


def subst_clock_formal(m: Term, k: str, k2: str) -> Term:
    """``[k2/k]m`` on clock positions."""
    return _map_vars(m, _keep_var,
                     lambda c, cd: Clk(k2) if isinstance(c, Clk) and c.name == k else c)


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    _collect(t, out, set())
    return out


def free_clocks(t: Term) -> set[str]:
    out: set[str] = set()
    _collect(t, set(), out)
    return out


def _collect(t: Term, vs: set, cs: set) -> None:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Ident):
            vs.add(t.name)
            continue
        for _, kind, val in _children(t):
            if kind == "k":
                if isinstance(val, Clk):
                    cs.add(val.name)
            else:
                stack.append(val)


def mentions_bound(body: Term, sort: str = "term", k: int = 0) -> bool:
    """Does ``body`` use the binder at relative index ``k`` of the given sort?"""
    hit = False

    def on_var(v, td):
        nonlocal hit
        if sort == "term" and isinstance(v, Bound) and v.index == td + k:
            hit = True
        return v

    def on_clock(c, cd):
        nonlocal hit
        if sort == "clock" and isinstance(c, ClkBound) and c.index == cd + k:
            hit = True
        return c

    _map_vars(body, on_var, on_clock)
    return hit


def fresh_name(base: str, avoid) -> str:
    base = base.rstrip("'0123456789") or "x"
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# scope checking

class ScopeError(ValueError):
    def __init__(self, name: str, sort: str, path: str):
        self.name, self.sort, self.path = name, sort, path
        where = path or "<root>"
        super().__init__(f"{sort} {name} unbound (at {where})")


def scope_check(m: Term, clocks, variables) -> None:
    """Raise ``ScopeError`` for the first free name outside the given lists."""
    cset, vset = set(clocks), set(variables)

    def go(t: Term, path: str) -> None:
        if isinstance(t, Ident):
            if t.name not in vset:
                raise ScopeError(t.name, "variable", path)
            return
        for name, kind, val in _children(t):
            p = f"{path}.{name}" if path else name
            if kind == "k":
                if isinstance(val, Clk) and val.name not in cset:
                    raise ScopeError(val.name, "clock", p)
            else:
                go(val, p)

    go(m, "")


# ---------------------------------------------------------------------------
# lexer

class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str   # ident, int, univ, rule, sym, eof
    text: str
    line: int
    col: int


RULE_FAMILIES = ("Conversion", "General", "Unit", "Bool", "Prod", "Arr", "KArr", "Isect", "Later")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--(?!>)[^\n]*)
  | (?P<univ>U<\d+>)
  | (?P<rule>(?:%s)\.[A-Za-z_]+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:-[a-z]+)?)
  | (?P<sym>:=|\|-|->|\(\)|[()<>,.;:=~{}@*])
""" % "|".join(RULE_FAMILIES), re.VERBOSE)

KEYWORDS = {
    "lam", "clk-lam", "fix", "fst", "snd", "if", "then", "else", "zero", "succ",
    "ifze", "sup", "wrec", "with", "pi", "sg", "wty", "Eq", "all", "isect", "later",
    "void", "unit", "bool", "nat", "tt", "ff", "star", "in", "by",
}


class Lexer:
    def __init__(self, text: str):
        self.text = text

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        pos, line, col = 0, 1, 1
        text = self.text
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            kind = m.lastgroup
            s = m.group()
            if kind == "ident" and "-" in s and s != "clk-lam":
                # hyphenated identifiers other than the keyword are not allowed
                s = s.split("-")[0]
                m_end = pos + len(s)
            else:
                m_end = m.end()
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            chunk = text[pos:m_end]
            nl = chunk.count("\n")
            if nl:
                line += nl
                col = len(chunk) - chunk.rfind("\n")
            else:
                col += len(chunk)
            pos = m_end
        out.append(Token("eof", "", line, col))
        return out


# ---------------------------------------------------------------------------
# parser

@dataclass
class Scope:
    """Names visible to the parser: free variables, free clocks, definitions."""
    variables: tuple = ()
    clocks: tuple = ()
    defs: dict = field(default_factory=dict)
    allow_free: bool = False   # unknown identifiers become free variables


class TermParser:
    def __init__(self, tokens: list[Token], pos: int = 0, scope: Scope | None = None):
        self.toks = tokens
        self.pos = pos
        self.scope = scope or Scope()
        self.bvars: list[str] = []    # innermost last
        self.bclocks: list[str] = []

    # -- token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("sym", "ident")

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def ident(self) -> Token:
        t = self.next()
        if t.kind != "ident" or t.text in KEYWORDS:
            raise ParseError(f"expected identifier, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    # -- binders
    def _with_var(self, name: str, fn):
        self.bvars.append(name)
        try:
            return fn()
        finally:
            self.bvars.pop()

    def _with_clock(self, name: str, fn):
        self.bclocks.append(name)
        try:
            return fn()
        finally:
            self.bclocks.pop()

    def clock(self) -> ClockRef:
        t = self.ident()
        name = t.text
        for i, b in enumerate(reversed(self.bclocks)):
            if b == name:
                return ClkBound(i)
        if name in self.scope.clocks or self.scope.allow_free:
            return Clk(name)
        raise ParseError(f"unbound clock {name!r}", t.line, t.col)

    def variable(self, t: Token) -> Term:
        name = t.text
        for i, b in enumerate(reversed(self.bvars)):
            if b == name:
                return Bound(i)
        if name in self.scope.variables:
            return Ident(name)
        if name in self.scope.defs:
            return self.scope.defs[name]
        if self.scope.allow_free:
            return Ident(name)
        raise ParseError(f"unbound identifier {name!r}", t.line, t.col)

    # -- grammar
    def term(self) -> Term:
        t = self.peek()
        k = t.text if t.kind == "ident" else None
        if k == "lam":
            self.next()
            x = self.ident().text
            self.expect(".")
            return Lam(self._with_var(x, self.term), x)
        if k == "clk-lam":
            self.next()
            c = self.ident().text
            self.expect(".")
            return KLam(self._with_clock(c, self.term), c)
        if k == "fix":
            self.next()
            x = self.ident().text
            self.expect(".")
            return Fix(self._with_var(x, self.term), x)
        if k in ("pi", "sg", "wty"):
            self.next()
            x = self.ident().text
            self.expect(":")
            dom = self.arrow()
            self.expect(".")
            cod = self._with_var(x, self.term)
            return {"pi": Pi, "sg": Sg, "wty": WTy}[k](dom, cod, x)
        if k in ("all", "isect"):
            self.next()
            c = self.ident().text
            self.expect(".")
            body = self._with_clock(c, self.term)
            return (ClkProd if k == "all" else Isect)(body, c)
        if k == "if":
            self.next()
            b = self.term()
            self.expect("then")
            m = self.term()
            self.expect("else")
            return If(b, m, self.term())
        if k == "ifze":
            self.next()
            n = self.term()
            self.expect("then")
            z = self.term()
            self.expect("else")
            x = self.ident().text
            self.expect(".")
            return IfZe(n, z, self._with_var(x, self.term), x)
        if k == "sup":
            self.next()
            m = self.app()
            self.expect("with")
            x = self.ident().text
            self.expect(".")
            return Sup(m, self._with_var(x, self.term), x)
        if k == "wrec":
            self.next()
            m = self.app()
            self.expect("with")
            x, y, z = self.ident().text, self.ident().text, self.ident().text
            self.expect(".")
            self.bvars += [x, y, z]
            try:
                body = self.term()
            finally:
                del self.bvars[-3:]
            return WRec(m, body, (x, y, z))
        return self.arrow()

    def arrow(self) -> Term:
        a = self.prod()
        if self.at("->"):
            self.next()
            return Pi(a, self._with_var("_", self.arrow_or_binder), "_")
        return a

    def arrow_or_binder(self) -> Term:
        return self.term()

    def prod(self) -> Term:
        a = self.app()
        if self.at("*"):
            self.next()
            return Sg(a, self._with_var("_", self.prod_or_binder), "_")
        return a

    def prod_or_binder(self) -> Term:
        t = self.peek()
        if t.kind == "ident" and t.text in ("lam", "clk-lam", "fix", "pi", "sg", "wty", "all",
                                           "isect", "if", "ifze", "sup", "wrec"):
            return self.term()
        return self.prod()

    def app(self) -> Term:
        f = self.prefix()
        while True:
            if self.at("@"):
                self.next()
                f = CApp(f, self.clock())
            elif self._starts_atom():
                f = App(f, self.prefix())
            else:
                return f

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind == "univ":
            return True
        if t.kind == "sym":
            return t.text in ("(", "<", "()")
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in (
                "tt", "ff", "star", "zero", "void", "unit", "bool", "nat",
                "fst", "snd", "succ", "later", "Eq")
        return False

    def prefix(self) -> Term:
        t = self.peek()
        if t.kind == "ident":
            if t.text in ("fst", "snd", "succ"):
                self.next()
                a = self.prefix_arg()
                return {"fst": Fst, "snd": Snd, "succ": Su}[t.text](a)
            if t.text == "later":
                self.next()
                c = self.clock()
                return Later(c, self.prefix_arg())
            if t.text == "Eq":
                self.next()
                a = self.prefix_arg()
                m = self.prefix_arg()
                return Eq(a, m, self.prefix_arg())
        return self.atom()

    def prefix_arg(self) -> Term:
        # arguments of prefix keywords are atoms or further prefix forms
        t = self.peek()
        if t.kind == "ident" and t.text in ("fst", "snd", "succ", "later", "Eq"):
            return self.prefix()
        return self.atom()

    def atom(self) -> Term:
        t = self.next()
        if t.kind == "univ":
            return Univ(int(t.text[2:-1]))
        if t.kind == "sym":
            if t.text == "(":
                m = self.term()
                self.expect(")")
                return m
            if t.text == "()":
                return Star()
            if t.text == "<":
                a = self.term()
                self.expect(",")
                b = self.term()
                self.expect(">")
                return Pair(a, b)
        if t.kind == "ident":
            consts = {"tt": Tt, "ff": Ff, "star": Star, "zero": Ze, "void": Void,
                      "unit": UnitTy, "bool": BoolTy, "nat": NatTy}
            if t.text in consts:
                return consts[t.text]()
            if t.text in KEYWORDS:
                raise ParseError(f"unexpected keyword {t.text!r}", t.line, t.col)
            return self.variable(t)
        raise ParseError(f"unexpected token {t.text or 'end of input'!r}", t.line, t.col)


def parse_with(text: str, scope: Scope | None = None) -> Term:
    toks = Lexer(text).tokens()
    p = TermParser(toks, 0, scope)
    m = p.term()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected trailing input {p.peek().text!r}")
    return m


def parse(text: str, *, variables=(), clocks=(), defs=None) -> Term:
    """Parse a term. Identifiers must be bound, listed, or defined."""
    return parse_with(text, Scope(tuple(variables), tuple(clocks), dict(defs or {})))


# ---------------------------------------------------------------------------
# printing

# precedence levels: 0 binder forms, 1 arrow, 2 product, 3 application, 4 atom
def pretty(t: Term) -> str:
    used = free_vars(t) | free_clocks(t)
    return _Printer(used).go(t, [], [], 0)


class _Printer:
    def __init__(self, used: set[str]):
        self.used = used

    def pick(self, hint: str, bound: list[str]) -> str:
        base = hint if hint and hint != "_" else "x"
        return fresh_name(base, self.used | set(bound) | KEYWORDS)

    def clock(self, c: ClockRef, cs: list[str]) -> str:
        if isinstance(c, Clk):
            return c.name
        if c.index >= len(cs):
            return f"?k{c.index}"
        return cs[-1 - c.index]

    def go(self, t: Term, vs: list[str], cs: list[str], prec: int) -> str:
        s, p = self.render(t, vs, cs)
        return f"({s})" if p < prec else s

    def render(self, t: Term, vs: list[str], cs: list[str]) -> tuple[str, int]:
        g = self.go
        match t:
            case Ident(name):
                return name, 4
            case Bound(i):
                return (vs[-1 - i] if i < len(vs) else f"?{i}"), 4
            case Lam(body, hint):
                x = self.pick(hint, vs)
                return f"lam {x}. {g(body, vs + [x], cs, 0)}", 0
            case KLam(body, hint):
                k = self.pick(hint, cs)
                return f"clk-lam {k}. {g(body, vs, cs + [k], 0)}", 0
            case Fix(body, hint):
                x = self.pick(hint, vs)
                return f"fix {x}. {g(body, vs + [x], cs, 0)}", 0
            case App(f, a):
                return f"{g(f, vs, cs, 3)} {g(a, vs, cs, 4)}", 3
            case CApp(f, c):
                return f"{g(f, vs, cs, 3)} @{self.clock(c, cs)}", 3
            case Pair(a, b):
                return f"<{g(a, vs, cs, 0)}, {g(b, vs, cs, 0)}>", 4
            case Fst(a):
                return f"fst {g(a, vs, cs, 4)}", 3
            case Snd(a):
                return f"snd {g(a, vs, cs, 4)}", 3
            case Su(a):
                return f"succ {g(a, vs, cs, 4)}", 3
            case Star():
                return "star", 4
            case Tt():
                return "tt", 4
            case Ff():
                return "ff", 4
            case Ze():
                return "zero", 4
            case Void():
                return "void", 4
            case UnitTy():
                return "unit", 4
            case BoolTy():
                return "bool", 4
            case NatTy():
                return "nat", 4
            case Univ(i):
                return f"U<{i}>", 4
            case If(b, m, n):
                return f"if {g(b, vs, cs, 0)} then {g(m, vs, cs, 0)} else {g(n, vs, cs, 0)}", 0
            case IfZe(n, z, s, hint):
                x = self.pick(hint, vs)
                return (f"ifze {g(n, vs, cs, 0)} then {g(z, vs, cs, 0)} else {x}. "
                        f"{g(s, vs + [x], cs, 0)}"), 0
            case Sup(m, n, hint):
                x = self.pick(hint, vs)
                return f"sup {g(m, vs, cs, 3)} with {x}. {g(n, vs + [x], cs, 0)}", 0
            case WRec(m, n, hints):
                names: list[str] = []
                for h in hints:
                    names.append(self.pick(h, vs + names))
                return (f"wrec {g(m, vs, cs, 3)} with {' '.join(names)}. "
                        f"{g(n, vs + names, cs, 0)}"), 0
            case Pi(a, b, hint) | Sg(a, b, hint) | WTy(a, b, hint):
                if not isinstance(t, WTy) and not mentions_bound(b):
                    if isinstance(t, Pi):
                        return f"{g(a, vs, cs, 2)} -> {g(b, vs + ['_'], cs, 1)}", 1
                    return f"{g(a, vs, cs, 3)} * {g(b, vs + ['_'], cs, 2)}", 2
                x = self.pick(hint, vs)
                kw = {Pi: "pi", Sg: "sg", WTy: "wty"}[type(t)]
                return f"{kw} {x} : {g(a, vs, cs, 1)}. {g(b, vs + [x], cs, 0)}", 0
            case Eq(a, m, n):
                return f"Eq {g(a, vs, cs, 4)} {g(m, vs, cs, 4)} {g(n, vs, cs, 4)}", 3
            case ClkProd(body, hint) | Isect(body, hint):
                k = self.pick(hint, cs)
                kw = "all" if isinstance(t, ClkProd) else "isect"
                return f"{kw} {k}. {g(body, vs, cs + [k], 0)}", 0
            case Later(c, a):
                return f"later {self.clock(c, cs)} {g(a, vs, cs, 4)}", 3
        raise TypeError(f"not a term: {t!r}")
