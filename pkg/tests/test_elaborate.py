import pytest
from hypothesis import given, settings

from gctt import program as P
from gctt import syntax as S
from gctt.elaborate import ElabError, elab_ctx, elab_term, generic_env
from gctt.program import ClockName

from gen import terms

K1, K2, K3 = ClockName("k1"), ClockName("k2"), ClockName("k3")
STREAM = "isect k. fix A. bool * later k A"


def test_variable_lookup():
    assert elab_term([], ["x", "y"], S.Ident("x"), {}) == P.Var(0)
    assert elab_term([], ["x", "y"], S.parse("lam z. y", variables=["y"]), {}) == P.Lam(P.Var(1))


def test_later_uses_environment():
    t = S.parse("later k bool", clocks=["k"])
    assert elab_term(["k"], [], t, {"k": K3}) == P.Later(K3, P.Bool())


def test_binder_gets_fresh_clock():
    out = elab_term([], [], S.parse(STREAM), {})
    assert isinstance(out, P.Isect)
    assert out.bound not in P.free_clocks(out)
    assert P.free_clocks(out) == set()
    out2 = elab_term(["j"], [], S.parse(STREAM), {"j": ClockName("_k0")})
    assert out2.bound != ClockName("_k0")


def test_instantiating_elaborated_klam():
    out = elab_term([], [], S.parse("clk-lam k. later k bool"), {})
    assert P.instantiate_clock(out.body, out.bound, K2) == P.Later(K2, P.Bool())


def test_elaboration_is_reproducible():
    t = S.parse("all k. isect j. later k (later j bool)")
    assert elab_term([], [], t, {}) == elab_term([], [], t, {})


def test_contexts():
    assert elab_ctx([], [], {}) == []
    assert elab_ctx([], [("x", S.BoolTy())], {}) == [P.Bool()]
    ctx = [("x", S.BoolTy()), ("y", S.parse("later k bool", clocks=["k"]))]
    assert elab_ctx(["k"], ctx, {"k": K1}) == [P.Bool(), P.Later(K1, P.Bool())]


def test_dependent_context_entry_scope():
    ctx = [("x", S.BoolTy()), ("e", S.parse("Eq bool x tt", variables=["x"]))]
    tel = elab_ctx([], ctx, {})
    assert tel[1] == P.Eq(P.Bool(), P.Var(0), P.Tt())


def test_errors():
    with pytest.raises(ElabError, match="does not cover"):
        elab_term(["k"], [], S.parse("later k bool", clocks=["k"]), {})
    with pytest.raises(ElabError):
        elab_term([], [], S.Ident("x"), {})
    with pytest.raises(ElabError, match="duplicate"):
        elab_ctx([], [("x", S.BoolTy()), ("x", S.BoolTy())], {})


@settings(max_examples=200, deadline=None)
@given(terms(variables=("x", "y"), clocks=("k",)), terms(variables=("y",), clocks=("k",)))
def test_compositionality(m, n):
    rho = {"k": K1}
    lhs = elab_term(["k"], ["x", "y"], S.subst_formal(m, "x", n), rho)
    em = elab_term(["k"], ["x", "y"], m, rho)
    en = elab_term(["k"], ["y"], n, rho)
    en_xy = P.subst([P.Var(1)], en, 2)   # y sits at position 1 in [x, y]
    assert P.alpha_eq(lhs, P.subst([en_xy, P.Var(1)], em, 2))


@settings(max_examples=200, deadline=None)
@given(terms(variables=("x",), clocks=("k", "j")))
def test_clock_naturality(m):
    rho = {"k": K1, "j": K2}
    inj = {K1: ClockName("m1"), K2: ClockName("m2")}
    a = elab_term(["k", "j"], ["x"], m, {c: inj[v] for c, v in rho.items()})
    b = P.rename_clocks(elab_term(["k", "j"], ["x"], m, rho), inj)
    assert P.alpha_eq(a, b)


@settings(max_examples=200, deadline=None)
@given(terms(variables=("x",), clocks=("k", "j")))
def test_free_clocks_within_range(m):
    rho = generic_env(["k", "j"])
    out = elab_term(["k", "j"], ["x"], m, rho)
    assert P.free_clocks(out) <= set(rho.values())
    P.check_scope(out, 1)
