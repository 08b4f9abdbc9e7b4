from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gctt import rules as R
from gctt import syntax as S
from gctt.rules import Derivation, EqMem, check, check_script, load_script, mem

BOOL = S.BoolTy()
STREAM_DEFS = """
def Stream := clk-lam k. fix A. bool * later k A ;
def ones := fix x. <tt, x> ;
"""


def library(name: str) -> str:
    return resources.files("gctt").joinpath("library", name).read_text()


def only(text: str) -> R.LemmaReport:
    reps = check_script(text)
    assert len(reps) == 1
    return reps[0]


def test_rule_set_is_the_validated_enumeration():
    assert len(R.RULE_NAMES) == 32
    families = {n.split(".")[0] for n in R.RULE_NAMES}
    assert families == {"Conversion", "General", "Unit", "Bool", "Prod", "Arr", "KArr", "Isect", "Later"}


def test_tt_equality():
    assert check(Derivation("Bool.tt_equality", conclusion=mem((), (), S.Tt(), BOOL))) is None


def test_unknown_rule_is_rejected():
    err = check(Derivation("Bool.magic", conclusion=mem((), (), S.Tt(), BOOL)))
    assert err is not None and "unknown rule" in err.explanation


def test_arity_is_checked():
    d = Derivation("Bool.tt_equality", [Derivation("Bool.tt_equality")],
                   conclusion=mem((), (), S.Tt(), BOOL))
    err = check(d)
    assert "premise" in err.explanation


def test_isect_irrelevance_side_condition():
    r = only("lemma bad : k ; . |- bool = isect k. bool : U<0> by { Isect.irrelevance { Bool.univ_eq } } ;")
    assert not r.ok
    assert r.error.kind == "side"
    assert r.error.path == "Isect.irrelevance"
    assert "∉ Δ" in r.error.explanation


def test_isect_irrelevance_fresh_clock():
    r = only("lemma ok : j ; . |- bool = isect k. bool : U<0> by { Isect.irrelevance { Bool.univ_eq } } ;")
    assert r.ok, r.error


def test_prod_intro_mismatched_premise_path():
    text = """lemma bad : . ; . |- <tt, ff> in bool * bool by {
      Prod.intro { Bool.univ_eq ; Bool.univ_eq ; Bool.tt_equality ;
                   show . ; . |- tt in bool by Bool.tt_equality }
    } ;"""
    r = only(text)
    assert not r.ok
    assert r.error.path == "Prod.intro [3] > Bool.tt_equality"
    assert r.error.explanation.startswith("premise mismatch")


def test_univ_formation_needs_smaller_level():
    r = only("lemma bad : . ; . |- U<1> in U<1> by { General.univ_formation } ;")
    assert not r.ok and r.error.kind == "side" and "i < j" in r.error.explanation
    assert only("lemma ok : . ; . |- U<0> in U<1> by { General.univ_formation } ;").ok


def test_later_induction_proves_ones_guarded():
    reps = check_script(library("streams.gctt"))
    by_name = {r.name: r for r in reps}
    assert by_name["Ones_wf_guarded"].ok


def test_stream_lemmas():
    reps = check_script(library("streams.gctt"))
    assert [r.name for r in reps] == ["BitStream_wf", "BitSeq_wf", "BitStream_unfold",
                                      "BitSeq_unfold", "Ones_wf_guarded", "Ones_wf_infinite"]
    assert all(r.ok for r in reps), [str(r.error) for r in reps if not r.ok]


def test_reports_keep_source_text():
    reps = check_script(library("streams.gctt"))
    assert reps[0].judgment == ". ; . |- Stream in all k. U<0>"


def test_unknown_lemma():
    r = only("lemma a : . ; . |- tt in bool by { cite nope } ;")
    assert not r.ok and "unknown lemma nope" in r.error.explanation


def test_cited_lemma_must_match():
    reps = check_script("""
      lemma a : . ; . |- tt in bool by { Bool.tt_equality } ;
      lemma b : . ; . |- ff in bool by { cite a } ;
      lemma c : j ; . |- tt in bool by { cite a } ;
    """)
    assert [r.ok for r in reps] == [True, False, False]


def test_empty_script():
    assert check_script("") == []
    assert check_script("-- only a comment\n") == []


def test_unused_binding_is_an_error():
    r = only("lemma a : . ; . |- tt in bool by { Bool.tt_equality(i=1) } ;")
    assert not r.ok and "unused binding" in r.error.explanation


def test_ill_scoped_judgment():
    with pytest.raises(S.ParseError, match="unbound clock"):
        load_script("lemma a : . ; . |- later k bool in U<0> by { Bool.univ_eq } ;")
    j = mem((), (), S.Later(S.Clk("k"), BOOL), S.Univ(0))
    err = check(Derivation("Later.univ_eq", conclusion=j))
    assert err.kind == "scope" and "ill-scoped" in err.explanation


def test_conversion_fuel_limits():
    text = STREAM_DEFS + """
    lemma u : k ; . |- Stream @k = bool * later k (fix A. bool * later k A) : U<0> by {
      General.conv_mem(M01 = bool * later k (fix A. bool * later k A)) {
        Prod.univ_eq { Bool.univ_eq ; Later.univ_eq { Later.intro(i=1) {
          General.eq_symm { General.conv_mem(M01 = fix A. bool * later k A) {
            Later.induction { Prod.univ_eq { Bool.univ_eq ;
              Later.univ_eq { General.weakening { General.hypothesis } } } } ; conv } } ;
          General.univ_formation } } } ;
        conv(fuel=0)
      }
    } ;"""
    r = only(text)
    assert not r.ok and "within fuel 0" in r.error.explanation
    assert only(text.replace("conv(fuel=0)", "conv")).ok


def test_explicit_step_trace():
    text = STREAM_DEFS + """
    lemma s : k ; . |- Stream @k ~ fix A. bool * later k A by {
      steps { Stream @k ; fix A. bool * later k A }
    } ;"""
    assert only(text).ok, only(text).error
    bad = text.replace("steps { Stream @k ;", "steps { Stream @k ; bool ;")
    assert not only(bad).ok


def test_json_report_shape():
    r = only("lemma a : . ; . |- tt in bool by { Bool.tt_equality } ;")
    j = r.to_json()
    assert j == {"lemma": "a", "judgment": ". ; . |- tt in bool", "status": "ok", "error": None,
                 "derivation": {"rule": "Bool.tt_equality", "judgment": ". ; . |- tt in bool",
                                "status": "ok", "message": "", "premises": []}}


def test_script_parse_errors_have_positions():
    with pytest.raises(S.ParseError) as e:
        load_script("lemma a : . ; . |- tt in bool by { Bool.tt_equality ;")
    assert e.value.line == 1


def test_canonical_renames_contexts():
    a = EqMem(("k",), (("x", BOOL),), S.Ident("x"), S.Ident("x"), S.Later(S.Clk("k"), BOOL))
    b = EqMem(("j",), (("y", BOOL),), S.Ident("y"), S.Ident("y"), S.Later(S.Clk("j"), BOOL))
    assert R.same_judgment(a, b)


# -- weakening admissibility over every shipped lemma

def _library_lemmas():
    out = []
    for name in ("streams.gctt", "canonicity.gctt"):
        script = load_script(library(name))
        out += [(name, lem) for lem in script.lemmas]
    return out


_LEMMAS = _library_lemmas()
_ENV = {}
for _file in ("streams.gctt", "canonicity.gctt"):
    for _lem in load_script(library(_file)).lemmas:
        _ENV[_lem.name] = _lem.judgment


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(_LEMMAS), st.sampled_from(["bool", "unit", "U<0>", "bool * bool"]))
def test_weakening_admissible(item, hyp_text):
    _, lem = item
    j = lem.judgment
    x = S.fresh_name("w", {n for n, _ in j.ctx} | set(j.clocks))
    hyp = S.parse(hyp_text)
    weak = EqMem(j.clocks, j.ctx + ((x, hyp),), j.lhs, j.rhs, j.ty)
    env = {k: v for k, v in _ENV.items() if k != lem.name}
    assert check(lem.proof, env, goal=j) is None
    d = Derivation("General.weakening", [lem.proof], conclusion=weak)
    assert check(d, env) is None
