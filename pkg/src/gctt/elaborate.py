"""Translation of formal terms and contexts into programs and telescopes."""

from __future__ import annotations

from typing import Mapping, Sequence

from . import program as P
from . import syntax as S

__all__ = ["ElabError", "elab_term", "elab_ctx", "generic_env"]


class ElabError(ValueError):
    pass


def generic_env(clocks: Sequence[str]) -> dict[str, P.ClockName]:
    """Distinct clock names for a clock context, one per variable."""
    return {k: P.ClockName(k) for k in clocks}


def elab_term(clocks: Sequence[str], variables: Sequence[str], m: S.Term,
              rho: Mapping[str, P.ClockName], supply: P.NameSupply | None = None) -> P.Program:
    """Elaborate ``m`` in clock context ``clocks`` and variable list ``variables``.

    A free variable becomes ``Var(position in variables)``; binders extend the
    position list, so bound variables get the next positions in turn."""
    missing = [k for k in clocks if k not in rho]
    if missing:
        raise ElabError(f"clock environment does not cover {missing[0]}")
    try:
        S.scope_check(m, clocks, variables)
    except S.ScopeError as e:
        raise ElabError(str(e)) from None
    if supply is None:
        supply = P.NameSupply(rho.values())
    pos = {x: i for i, x in enumerate(variables)}
    return _Elab(pos, rho, supply).go(m, len(variables), [], [])


class _Elab:
    def __init__(self, pos, rho, supply):
        self.pos = pos
        self.rho = rho
        self.supply = supply

    def clock(self, c: S.ClockRef, cs: list[P.ClockName]) -> P.ClockName:
        if isinstance(c, S.ClkBound):
            return cs[-1 - c.index]
        return self.rho[c.name]

    def go(self, t: S.Term, n: int, vs: list[int], cs: list[P.ClockName]) -> P.Program:
        """``n`` is the current scope; ``vs`` maps bound indices to levels."""
        g = self.go

        def under(body: S.Term, k: int = 1) -> P.Program:
            return g(body, n + k, vs + list(range(n, n + k)), cs)

        def under_clock(body: S.Term) -> tuple[P.ClockName, P.Program]:
            kappa = self.supply.fresh()
            return kappa, g(body, n, vs, cs + [kappa])

        match t:
            case S.Ident(name):
                return P.Var(self.pos[name])
            case S.Bound(i):
                return P.Var(vs[-1 - i])
            case S.Lam(body):
                return P.Lam(under(body))
            case S.KLam(body):
                return P.KLam(*under_clock(body))
            case S.App(f, a):
                return P.App(g(f, n, vs, cs), g(a, n, vs, cs))
            case S.CApp(f, c):
                return P.CApp(g(f, n, vs, cs), self.clock(c, cs))
            case S.Pair(a, b):
                return P.Pair(g(a, n, vs, cs), g(b, n, vs, cs))
            case S.Fst(a):
                return P.Fst(g(a, n, vs, cs))
            case S.Snd(a):
                return P.Snd(g(a, n, vs, cs))
            case S.Fix(body):
                return P.Fix(under(body))
            case S.Star():
                return P.Star()
            case S.Tt():
                return P.Tt()
            case S.Ff():
                return P.Ff()
            case S.If(b, m1, m2):
                return P.If(g(b, n, vs, cs), g(m1, n, vs, cs), g(m2, n, vs, cs))
            case S.Ze():
                return P.Ze()
            case S.Su(a):
                return P.Su(g(a, n, vs, cs))
            case S.IfZe(s, z, succ):
                return P.IfZe(g(s, n, vs, cs), g(z, n, vs, cs), under(succ))
            case S.Sup(m1, b):
                return P.Sup(g(m1, n, vs, cs), under(b))
            case S.WRec(m1, body):
                return P.WRec(g(m1, n, vs, cs), under(body, 3))
            case S.Pi(a, b):
                return P.Pi(g(a, n, vs, cs), under(b))
            case S.Sg(a, b):
                return P.Sg(g(a, n, vs, cs), under(b))
            case S.WTy(a, b):
                return P.WTy(g(a, n, vs, cs), under(b))
            case S.Eq(a, m1, m2):
                return P.Eq(g(a, n, vs, cs), g(m1, n, vs, cs), g(m2, n, vs, cs))
            case S.ClkProd(body):
                return P.KProd(*under_clock(body))
            case S.Isect(body):
                return P.Isect(*under_clock(body))
            case S.Later(c, a):
                return P.Later(self.clock(c, cs), g(a, n, vs, cs))
            case S.Void():
                return P.Void()
            case S.UnitTy():
                return P.Unit()
            case S.BoolTy():
                return P.Bool()
            case S.NatTy():
                return P.Nat()
            case S.Univ(i):
                return P.Univ(i)
        raise ElabError(f"cannot elaborate {t!r}")


def elab_ctx(clocks: Sequence[str], ctx: Sequence[tuple[str, S.Term]],
             rho: Mapping[str, P.ClockName]) -> list[P.Program]:
    """Elaborate a typing context to a telescope; entry ``i`` is in scope ``i``."""
    names: list[str] = []
    out: list[P.Program] = []
    supply = P.NameSupply(rho.values())
    for x, a in ctx:
        if x in names:
            raise ElabError(f"duplicate variable {x}")
        out.append(elab_term(clocks, names, a, rho, supply))
        names.append(x)
    return out
