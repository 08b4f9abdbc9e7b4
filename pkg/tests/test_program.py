import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gctt import program as P
from gctt.program import ClockName

from gen import CLOCKS, programs, random_program

K1, K2, K3 = ClockName("k1"), ClockName("k2"), ClockName("k3")
ONES = P.Fix(P.Pair(P.Tt(), P.Var(0)))


def test_subst_examples():
    assert P.subst([P.Tt()], P.Var(0)) == P.Tt()
    assert P.subst([ONES], P.Fst(P.Var(0))) == P.Fst(ONES)
    rng = random.Random(7)
    for _ in range(50):
        m = random_program(rng, 3)
        assert P.subst(P.identity(3), m) == m


def test_subst_under_binder_keeps_bound_variable():
    body = P.Lam(P.App(P.Var(1), P.Var(0)))        # scope 1: lam y. y x ... with levels
    out = P.subst([P.Tt()], body)
    assert out == P.Lam(P.App(P.Var(0), P.Tt()))


def test_substitution_length_checked():
    with pytest.raises(P.ScopeMismatch):
        P.subst([P.Tt()], P.Var(1))
    with pytest.raises(P.ScopeMismatch):
        P.Substitution((P.Var(2),), 1)


def test_instantiate_clock_examples():
    assert P.instantiate_clock(P.Later(K1, P.Bool()), K1, K2) == P.Later(K2, P.Bool())
    b = ClockName("b")
    shadow = P.Isect(b, P.Later(b, P.Bool()))
    assert P.instantiate_clock(shadow, b, K2) == shadow


def test_free_clocks_examples():
    assert P.free_clocks(P.Later(K1, P.Bool())) == {K1}
    assert P.free_clocks(P.Isect(K1, P.Later(K1, P.Bool()))) == set()
    assert P.free_clocks(P.Pair(P.Later(K1, P.Bool()), P.Later(K2, P.Nat()))) == {K1, K2}


def test_rename_avoids_capture():
    t = P.KLam(K2, P.Pair(P.Later(K1, P.Bool()), P.Later(K2, P.Bool())))
    out = P.rename_clocks(t, {K1: K2})
    assert P.free_clocks(out) == {K2}
    assert out.bound != K2


def test_scope_validator():
    P.check_scope(P.Lam(P.Var(0)), 0)
    with pytest.raises(P.ScopeMismatch):
        P.check_scope(P.Lam(P.Var(1)), 0)
    P.check_scope(P.WRec(P.Tt(), P.Var(2)), 0)
    with pytest.raises(P.ScopeMismatch):
        P.check_scope(P.WRec(P.Tt(), P.Var(3)), 0)


def test_fresh_names():
    assert P.fresh_clock([ClockName("k0"), ClockName("k1")]) == ClockName("k2")
    s = P.NameSupply([ClockName("_k0")])
    assert [s.fresh(), s.fresh()] == [ClockName("_k1"), ClockName("_k2")]


def test_show_and_json():
    t = P.App(P.Lam(P.Var(0)), P.Tt())
    assert P.show(t) == "app(lam(var 0), tt)"
    k = P.KLam(K1, P.Later(K1, P.Univ(2)))
    assert P.to_json(k) == {"tag": "klam", "bound": "k1",
                            "body": {"tag": "later", "clock": "k1", "ty": {"tag": "univ", "level": 2}}}


@settings(max_examples=300, deadline=None)
@given(programs(n=2))
def test_json_roundtrip(m):
    assert P.from_json(json.loads(json.dumps(P.to_json(m)))) == m


@settings(max_examples=300, deadline=None)
@given(programs(n=3))
def test_generated_programs_are_well_scoped(m):
    P.check_scope(m, 3)
    assert P.free_vars(m, 3) <= {0, 1, 2}


@settings(max_examples=200, deadline=None)
@given(programs(n=2), programs(n=1), programs(n=1), programs(n=0))
def test_substitution_composition(m, a, b, c):
    # (m[a, b])[c] == m[a[c], b[c]]
    lhs = P.subst([c], P.subst([a, b], m, 1))
    rhs = P.subst([P.subst([c], a), P.subst([c], b)], m)
    assert lhs == rhs


@settings(max_examples=200, deadline=None)
@given(programs(n=2))
def test_weakening_then_subst_is_identity(m):
    # weakening from 2 to 3 and substituting the identity plus an unused slot
    w = P.weaken(m, 2, 3)
    P.check_scope(w, 3)
    back = P.subst([P.Var(0), P.Var(1), P.Tt()], w, 2)
    assert back == m


@settings(max_examples=200, deadline=None)
@given(programs(n=0))
def test_instantiate_identity(m):
    b = ClockName("b0")
    assert P.alpha_eq(P.instantiate_clock(m, b, b), m)


@settings(max_examples=200, deadline=None)
@given(programs(n=1), programs(n=0), st.sampled_from(CLOCKS))
def test_subst_commutes_with_clock_instantiation(m, a, kappa):
    b = CLOCKS[0]
    lhs = P.instantiate_clock(P.subst([a], m), b, K3)
    rhs = P.subst([P.instantiate_clock(a, b, K3)], P.instantiate_clock(m, b, K3))
    assert P.alpha_eq(lhs, rhs)


@settings(max_examples=200, deadline=None)
@given(programs(n=0))
def test_alpha_eq_under_binder_renaming(m):
    renamed = _rename_binders(m)
    assert P.alpha_eq(m, renamed)
    assert P.canon(m) == P.canon(renamed)


def _rename_binders(t):
    shape = type(t)._shape
    if not shape:
        return t
    if shape[0][1] == "cb":
        nb = ClockName(t.bound.atom + "_r")
        return type(t)(nb, _rename_binders(P.instantiate_clock(t.body, t.bound, nb)))
    kw = {}
    for name, kind in shape:
        v = getattr(t, name)
        kw[name] = v if kind == "k" else _rename_binders(v)
    return type(t)(**kw)
