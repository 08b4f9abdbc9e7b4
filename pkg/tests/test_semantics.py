import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gctt import program as P
from gctt import syntax as S
from gctt.elaborate import elab_term
from gctt.opsem import Tri
from gctt.program import ClockName
from gctt.semantics import (CanonFail, CanonOk, Exhausted, NotAType, OracleBudget, TotalRel,
                            TypeRelApprox, World, canonicity_check, interp_type, member,
                            member_detail, parse_world, per_audit, tick)

from gen import CLOCKS, oracle_queries

K1, K2, K9 = ClockName("k1"), ClockName("k2"), ClockName("k9")
YES, NO, UNKNOWN = Tri.YES, Tri.NO, Tri.UNKNOWN
ONES = P.Fix(P.Pair(P.Tt(), P.Var(0)))
ID = P.Lam(P.Var(0))
B = OracleBudget()


def w(**times):
    return World.of(times)


def test_world_invariants():
    with pytest.raises(ValueError):
        World(())
    assert parse_world("k1=2,k2=0") == w(k1=2, k2=0)
    with pytest.raises(ValueError):
        parse_world("k1=x")


def test_tick_examples():
    assert tick(w(k1=2), K1) == w(k1=1)
    assert tick(w(k1=1, k2=0), K1) == w(k1=0, k2=0)
    with pytest.raises(ValueError):
        tick(w(k1=0), K1)


def test_interp_examples():
    assert interp_type(w(k1=1), P.Bool(), 1, B).test(P.Tt(), P.Tt()) is YES
    assert interp_type(w(k1=0), P.Later(K1, P.Void()), 1, B).test(P.Tt(), P.Ff()) is YES
    assert interp_type(w(k1=2), P.Later(K1, P.Bool()), 1, B).test(P.Tt(), P.Ff()) is NO


def test_member_examples():
    stream = elab_term(["k"], [], S.parse("(clk-lam k. fix A. bool * later k A) @k", clocks=["k"]),
                       {"k": K1})
    assert member(w(k1=3), ONES, ONES, stream, 1, B) is YES
    assert member(w(k1=1), P.Tt(), P.Ff(), P.Bool(), 1, B) is NO
    assert member(w(k1=1), ID, ID, P.Pi(P.Bool(), P.Bool()), 1, B) is YES


def test_stream_rejects_bad_head_only_within_time():
    stream = elab_term(["k"], [], S.parse("fix A. bool * later k A", clocks=["k"]), {"k": K1})
    bad = P.Pair(P.Tt(), P.Pair(P.Star(), P.Star()))
    assert member(w(k1=0), bad, bad, stream, 1, B) is YES
    assert member(w(k1=1), bad, bad, stream, 1, B) is NO


def test_not_a_type_and_universe_levels():
    assert isinstance(interp_type(w(k1=1), P.Tt(), 1, B), NotAType)
    assert isinstance(interp_type(w(k1=1), P.Univ(1), 1, B), NotAType)
    assert member(w(k1=1), P.Bool(), P.Bool(), P.Univ(0), 1, B) is YES
    assert member(w(k1=1), P.Univ(0), P.Univ(0), P.Univ(0), 1, B) is NO
    assert member(w(k1=1), P.Univ(0), P.Univ(0), P.Univ(1), 2, B) is YES


def test_nat_and_fuel():
    big = P.Su(P.Su(P.Su(P.Ze())))
    assert member(w(k1=0), big, big, P.Nat(), 1, B) is YES
    assert member(w(k1=0), big, big, P.Nat(), 1, dataclasses.replace(B, unfold_depth=1)) is UNKNOWN
    loop = P.Fix(P.Var(0))
    assert member(w(k1=0), loop, loop, P.Bool(), 1, OracleBudget(fuel=50)) is UNKNOWN


def test_eq_type():
    e = P.Eq(P.Bool(), P.Tt(), P.Tt())
    assert member(w(k1=0), P.Star(), P.Star(), e, 1, B) is YES
    assert member(w(k1=0), P.Star(), P.Star(), P.Eq(P.Bool(), P.Tt(), P.Ff()), 1, B) is NO


def test_isect_and_clock_product():
    seq = P.Isect(K9, P.Later(K9, P.Bool()))
    assert member(w(k1=1), P.Tt(), P.Tt(), seq, 1, B) is YES
    assert member(w(k1=1), P.Tt(), P.Ff(), seq, 1, B) is NO
    kp = P.KProd(K9, P.Bool())
    assert member(w(k1=1), P.KLam(K9, P.Tt()), P.KLam(K9, P.Tt()), kp, 1, B) is YES
    _, tag = member_detail(w(k1=1), P.Tt(), P.Tt(), seq, 1, B)
    assert tag


SEQ_TEXT = "isect k. fix A. bool * later k A"


def closed(text):
    return elab_term([], [], S.parse(text), {})


def test_sampled_clock_intersection_never_answers_no_by_witness():
    seq = closed(SEQ_TEXT)
    unfolded = closed(f"bool * ({SEQ_TEXT})")
    rel = interp_type(w(k1=1), seq, 2, B)
    assert rel.truncated
    assert not interp_type(w(k1=1), P.Isect(K9, P.Bool()), 2, B).truncated
    # equal in the limit, but every sampled depth differs by one
    assert member(w(k1=1), seq, unfolded, P.Univ(0), 2, B) is UNKNOWN
    assert member(w(k1=1), seq, P.Bool(), P.Univ(0), 2, B) is NO
    assert member(w(k1=1), ONES, ONES, seq, 2, B) is YES


def test_clocks_must_be_in_world():
    with pytest.raises(ValueError):
        member(w(k1=1), P.Tt(), P.Tt(), P.Later(K2, P.Bool()), 1, B)


def test_canonicity_examples():
    assert canonicity_check(P.If(P.Tt(), P.Tt(), P.Ff())) == CanonOk("tt", 1)
    r = canonicity_check(P.If(P.Fst(ONES), P.Ff(), P.Tt()))
    assert isinstance(r, CanonOk) and r.value == "ff"
    assert canonicity_check(P.Fix(P.Var(0)), 1000) == CanonFail("OutOfFuel")


class _Broken(TypeRelApprox):
    tag = "broken"

    def _test(self, m0, m1):
        return YES if (m0, m1) == (P.Tt(), P.Ff()) or m0 == m1 else NO


def test_per_audit():
    pairs = [(a, b) for a in (P.Tt(), P.Ff()) for b in (P.Tt(), P.Ff())]
    assert per_audit(interp_type(w(k1=1), P.Bool(), 1, B), pairs).ok
    anything = [(P.Tt(), P.Star()), (P.Fix(P.Var(0)), ID), (P.Star(), P.Star())]
    assert per_audit(TotalRel(), anything).ok
    rep = per_audit(_Broken(), pairs)
    assert {v[0] for v in rep.violations} == {"symmetry", "approximation"}


# -- properties

@settings(max_examples=200, deadline=None)
@given(oracle_queries(), st.sampled_from(["unfold_depth", "enum_depth", "fuel", "fresh_clock_times"]))
def test_budget_monotonicity(q, field):
    world, m0, m1, a = q
    small = OracleBudget(unfold_depth=3, enum_depth=2, fuel=500, fresh_clock_times=1)
    big = dataclasses.replace(small, **{field: getattr(small, field) * 3})
    r0 = member(world, m0, m1, a, 2, small)
    r1 = member(world, m0, m1, a, 2, big)
    if r0 is not UNKNOWN:
        assert r1 is r0


@settings(max_examples=200, deadline=None)
@given(oracle_queries(), st.integers(0, 3))
def test_world_extension(q, t):
    world, m0, m1, a = q
    assert member(world, m0, m1, a, 2, B) is member(world.extend(K9, t), m0, m1, a, 2, B)


@settings(max_examples=200, deadline=None)
@given(oracle_queries(), st.sampled_from(CLOCKS))
def test_later_is_antitone_in_time(q, kappa):
    world, m0, m1, a = q
    la = P.Later(kappa, a)
    if member(world, m0, m1, la, 2, B) is YES:
        for t in range(world[kappa]):
            assert member(world.with_time(kappa, t), m0, m1, la, 2, B) is YES


@settings(max_examples=200, deadline=None)
@given(oracle_queries())
def test_type_computationality(q):
    world, m0, m1, a = q
    redex = P.App(ID, a)
    assert member(world, m0, m1, a, 2, B) is member(world, m0, m1, redex, 2, B)
    assert member(world, m0, m1, a, 2, B) is member(world, m0, m1, P.Fst(P.Pair(a, P.Tt())), 2, B)


@settings(max_examples=150, deadline=None)
@given(oracle_queries())
def test_yes_answers_are_symmetric(q):
    world, m0, m1, a = q
    if member(world, m0, m1, a, 2, B) is YES:
        assert member(world, m1, m0, a, 2, B) is YES
        assert member(world, m0, m0, a, 2, B) is YES


@settings(max_examples=100, deadline=None)
@given(oracle_queries(max_depth=2))
def test_per_audit_on_generated_types(q):
    world, m0, m1, a = q
    rel = interp_type(world, a, 2, B)
    if isinstance(rel, (NotAType, Exhausted)):
        return
    sample = [(m0, m1), (m1, m0), (m0, m0), (P.Tt(), P.Tt()), (P.Star(), P.Star())]
    assert per_audit(rel, sample).ok
