"""Term generators shared by the property tests and the acceptance suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from gctt import program as P
from gctt import syntax as S
from gctt.program import ClockName

CLOCKS = (ClockName("k1"), ClockName("k2"))
_ATOMS = [P.Star(), P.Tt(), P.Ff(), P.Ze(), P.Void(), P.Unit(), P.Bool(), P.Nat(), P.Univ(0)]


def random_program(rng: random.Random, n: int = 0, depth: int = 4,
                   clocks=CLOCKS, bound=()) -> P.Program:
    """A program in scope ``n``, biased towards redexes so that evaluation does work."""
    avail = tuple(clocks) + tuple(bound)
    if depth <= 0 or rng.random() < 0.15:
        leaves = list(_ATOMS) + [P.Var(i) for i in range(n)] * 3
        return rng.choice(leaves)
    d = depth - 1
    g = lambda n2=n, b=bound: random_program(rng, n2, d, clocks, b)
    fresh = ClockName(f"b{len(bound)}")
    choice = rng.randrange(24)
    if choice == 0:
        return P.Lam(g(n + 1))
    if choice == 1:
        return P.App(P.Lam(g(n + 1)), g())
    if choice == 2:
        return P.App(g(), g())
    if choice == 3:
        return P.Fix(g(n + 1))
    if choice == 4:
        return P.Pair(g(), g())
    if choice == 5:
        return P.Fst(rng.choice([P.Pair(g(), g()), g()]))
    if choice == 6:
        return P.Snd(rng.choice([P.Pair(g(), g()), g()]))
    if choice == 7:
        return P.If(rng.choice([P.Tt(), P.Ff(), g()]), g(), g())
    if choice == 8:
        return P.Su(g())
    if choice == 9:
        return P.IfZe(rng.choice([P.Ze(), P.Su(g()), g()]), g(), g(n + 1))
    if choice == 10:
        return P.Sup(g(), g(n + 1))
    if choice == 11:
        return P.WRec(rng.choice([P.Sup(g(), g(n + 1)), g()]), g(n + 3))
    if choice == 12:
        return P.KLam(fresh, g(n, bound + (fresh,)))
    if choice == 13 and avail:
        return P.CApp(rng.choice([P.KLam(fresh, g(n, bound + (fresh,))), g()]), rng.choice(avail))
    if choice == 14:
        return P.Pi(g(), g(n + 1))
    if choice == 15:
        return P.Sg(g(), g(n + 1))
    if choice == 16 and avail:
        return P.Later(rng.choice(avail), g())
    if choice == 17:
        return P.Isect(fresh, g(n, bound + (fresh,)))
    if choice == 18:
        return P.KProd(fresh, g(n, bound + (fresh,)))
    if choice == 19:
        return P.Eq(g(), g(), g())
    if choice == 20:
        return P.WTy(g(), g(n + 1))
    if choice == 21:
        return P.Fst(P.Fix(P.Pair(g(n + 1), P.Var(n))))
    return rng.choice(_ATOMS)


@st.composite
def programs(draw, n: int = 0, max_depth: int = 4, clocks=CLOCKS):
    seed = draw(st.integers(0, 2**32 - 1))
    depth = draw(st.integers(0, max_depth))
    return random_program(random.Random(seed), n, depth, clocks)


# -- formal terms ------------------------------------------------------------

_HINTS = ("x", "y", "z", "f")
_CHINTS = ("k", "j")


def random_term(rng: random.Random, depth: int, variables=(), clocks=(),
                nb: int = 0, ncb: int = 0) -> S.Term:
    """A locally closed formal term over the given free variables and clocks."""
    def g(nb2=nb, ncb2=ncb, d=depth - 1):
        return random_term(rng, d, variables, clocks, nb2, ncb2)

    def clock():
        opts = [S.Clk(c) for c in clocks] + [S.ClkBound(i) for i in range(ncb)]
        return rng.choice(opts) if opts else None

    leaves = [S.Tt(), S.Ff(), S.Star(), S.Ze(), S.BoolTy(), S.NatTy(), S.UnitTy(), S.Void(),
              S.Univ(rng.randrange(3))]
    leaves += [S.Ident(v) for v in variables] + [S.Bound(i) for i in range(nb)] * 2
    if depth <= 0:
        return rng.choice(leaves)
    h = rng.choice(_HINTS)
    ch = rng.choice(_CHINTS)
    c = rng.randrange(22)
    if c == 0:
        return S.Lam(g(nb + 1), h)
    if c == 1:
        return S.App(g(), g())
    if c == 2:
        return S.Pair(g(), g())
    if c == 3:
        return S.Fst(g())
    if c == 4:
        return S.Snd(g())
    if c == 5:
        return S.Fix(g(nb + 1), h)
    if c == 6:
        return S.If(g(), g(), g())
    if c == 7:
        return S.Su(g())
    if c == 8:
        return S.IfZe(g(), g(), g(nb + 1), h)
    if c == 9:
        return S.Sup(g(), g(nb + 1), h)
    if c == 10:
        return S.WRec(g(), g(nb + 3), tuple(rng.choice(_HINTS) for _ in range(3)))
    if c == 11:
        return S.Pi(g(), g(nb + 1), h)
    if c == 12:
        return S.Sg(g(), g(nb + 1), h)
    if c == 13:
        return S.WTy(g(), g(nb + 1), h)
    if c == 14:
        return S.Eq(g(), g(), g())
    if c == 15:
        return S.KLam(g(nb, ncb + 1), ch)
    if c == 16:
        return S.ClkProd(g(nb, ncb + 1), ch)
    if c == 17:
        return S.Isect(g(nb, ncb + 1), ch)
    if c == 18 and clock() is not None:
        return S.Later(clock(), g())
    if c == 19 and clock() is not None:
        return S.CApp(g(), clock())
    return rng.choice(leaves)


@st.composite
def terms(draw, variables=(), clocks=(), max_depth: int = 5):
    seed = draw(st.integers(0, 2**32 - 1))
    depth = draw(st.integers(0, max_depth))
    return random_term(random.Random(seed), depth, tuple(variables), tuple(clocks))


# -- closed types and candidate elements for the oracle ------------------------

def random_type(rng: random.Random, depth: int = 3, clocks=CLOCKS, n: int = 0, bound=()) -> P.Program:
    """A closed type program over finitary formers (n > 0 allows dependency on variables)."""
    avail = tuple(clocks) + tuple(bound)
    base = [P.Bool(), P.Unit(), P.Void(), P.Nat(), P.Bool()]
    if depth <= 0:
        return rng.choice(base)
    d = depth - 1
    c = rng.randrange(9)
    if c == 0:
        return P.Sg(random_type(rng, d, clocks, n, bound), random_type(rng, d, clocks, n + 1, bound))
    if c == 1:
        return P.Pi(rng.choice([P.Bool(), P.Unit(), P.Void()]), random_type(rng, d, clocks, n + 1, bound))
    if c == 2 and avail:
        return P.Later(rng.choice(avail), random_type(rng, d, clocks, n, bound))
    if c == 3:
        b = ClockName(f"b{len(bound)}")
        return P.Isect(b, random_type(rng, d, clocks, n, bound + (b,)))
    if c == 4:
        return P.Eq(P.Bool(), rng.choice([P.Tt(), P.Ff()]), rng.choice([P.Tt(), P.Ff()]))
    if c == 5:
        return P.App(P.Lam(P.Var(n)), random_type(rng, d, clocks, n, bound))
    return rng.choice(base)


_ELEMS = [P.Tt(), P.Ff(), P.Star(), P.Ze(), P.Su(P.Ze()), P.Pair(P.Tt(), P.Star()),
          P.Pair(P.Ff(), P.Tt()), P.Lam(P.Var(0)), P.Lam(P.Tt()), P.Fix(P.Pair(P.Tt(), P.Var(0))),
          P.Fst(P.Pair(P.Tt(), P.Ff())), P.Fix(P.Var(0)), P.Fst(P.Tt())]


def random_element(rng: random.Random) -> P.Program:
    if rng.random() < 0.6:
        return rng.choice(_ELEMS)
    return random_program(rng, 0, 3)


@st.composite
def oracle_queries(draw, max_depth: int = 3):
    """(world, m0, m1, type) with a world over the generator clocks."""
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    from gctt.semantics import World
    w = World.of({CLOCKS[0]: draw(st.integers(0, 3)), CLOCKS[1]: draw(st.integers(0, 3))})
    a = random_type(rng, draw(st.integers(0, max_depth)))
    m0 = random_element(rng)
    m1 = m0 if rng.random() < 0.5 else random_element(rng)
    return w, m0, m1, a
