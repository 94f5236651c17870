import pytest

import oracles
from hilbertsem.errors import ParseError
from hilbertsem.logic import Iota, Signature, parse_formula
from hilbertsem.models import (
    UNDEFINED,
    CounterModel,
    FiniteModel,
    NoneFoundUpTo,
    NotEvaluable,
    SearchSpaceTooLarge,
    SignatureMismatch,
    admissible_choices,
    count_admissible_choices,
    entails_finite,
    enumerate_models,
    eval_formula,
    eval_term,
    format_model,
    parse_model,
)

DOM = ("a", "b")


def model_ab(p_ext, choice=None, **more):
    preds = {"P": frozenset((a,) for a in p_ext), **more}
    return FiniteModel({"e": DOM}, preds=preds, choice={"e": choice} if choice else {})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_choice_count_matches_closed_form_and_enumeration(n):
    dom = tuple("abc"[:n])
    listed = list(admissible_choices(dom))
    assert len(listed) == count_admissible_choices(n) == oracles.admissible_choice_count(n)
    assert len(listed) == sum(1 for _ in oracles.naive_choices(dom))


def test_choice_count_frozen_values():
    assert [count_admissible_choices(n) for n in (1, 2, 3)] == [1, 4, 72]


@pytest.mark.parametrize("p_ext,expected", [({"a"}, {True}), (set(), {False})])
def test_epsilon_witness_over_all_choices(p_ext, expected):
    assert oracles.eps_self_truth(DOM, p_ext) == expected
    f = parse_formula("P(eps x. P(x))")
    seen = {eval_formula(model_ab(p_ext, choice), f) for choice in admissible_choices(DOM)}
    assert seen == expected


def test_iota_defined_only_for_unique_witness():
    king = parse_formula("king(x)", variables={"x": "e"})
    iota = Iota("x", "e", king)
    born = parse_formula("born(iota x. king(x))")
    for ext in ({"a"}, {"a", "b"}, set()):
        m = FiniteModel(
            {"e": DOM},
            preds={"king": frozenset((a,) for a in ext), "born": frozenset({("a",), ("b",)})},
        )
        defined, truth = oracles.iota_status(DOM, ext, {"a", "b"})
        assert (eval_term(m, iota) is not UNDEFINED) == defined
        assert eval_formula(m, born) == truth
        # undefined atoms are false, so their negation holds
        assert eval_formula(m, parse_formula("~born(iota x. king(x))")) == (not defined)


def test_equality_with_undefined_is_false():
    m = FiniteModel({"e": DOM}, preds={"king": frozenset()})
    assert not eval_formula(m, parse_formula("(iota x. king(x)) = (iota x. king(x))"))


def test_inadmissible_choice_rejected():
    with pytest.raises(SignatureMismatch):
        FiniteModel({"e": DOM}, choice={"e": {frozenset({"a"}): "b"}})
    with pytest.raises(SignatureMismatch):
        FiniteModel({"e": ()})


def test_default_choice_is_least_element():
    m = FiniteModel({"e": ("b", "a")})
    assert m.choose("e", frozenset()) == "b"
    assert m.choose("e", frozenset({"a", "b"})) == "b"
    assert m.choose("e", frozenset({"a"})) == "a"


def test_signature_mismatch_on_evaluation():
    m = FiniteModel({"e": DOM})
    with pytest.raises(SignatureMismatch):
        eval_formula(m, parse_formula("P(a)"))
    with pytest.raises(SignatureMismatch):
        eval_formula(m, parse_formula("forall x:ani. P(x)"))


def test_generalized_quantifier_not_evaluable():
    f = parse_formula("P(gen most x. P(x))")
    with pytest.raises(NotEvaluable):
        eval_formula(model_ab({"a"}), f)


MODEL_TEXT = """\
# a small model
sort e = a b
const c : e = b
func f : e -> e = {a -> b; b -> a}
pred P : e = {a}
pred R : e e = {a b; b b}
pred p : = {()}
choice e {} -> b
choice e {a,b} -> b
"""


def test_parse_model_and_evaluate():
    m = parse_model(MODEL_TEXT)
    assert m.domain("e") == ("a", "b")
    assert eval_formula(m, parse_formula("P(f(c))"))
    assert eval_formula(m, parse_formula("R(a, c) /\\ p"))
    assert eval_term(m, parse_formula("P(eps x. R(x, x))").args[0]) == "b"
    assert eval_term(m, parse_formula("P(eps x. ~(x = x))").args[0]) == "b"


def test_format_parse_round_trip():
    m = parse_model(MODEL_TEXT)
    again = parse_model(format_model(m))
    assert again == m
    assert format_model(again) == format_model(m)


@pytest.mark.parametrize(
    "text,error",
    [
        ("sort e a b", ParseError),
        ("sort e = a\npred P : e = a", ParseError),
        ("sort e = a\nwhatever", ParseError),
        ("sort e = a\nchoice e {a} a", ParseError),
        ("sort e = a\npred P : e = {b}", SignatureMismatch),
        ("sort e = a\npred P : e = {a a}", SignatureMismatch),
    ],
)
def test_parse_model_errors(text, error):
    with pytest.raises(error):
        parse_model(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as info:
        parse_model("sort e = a\n\nbogus line")
    assert info.value.line == 3


# entailment ------------------------------------------------------------------

F = parse_formula("P(eps x. Q(x))")


def test_entailment_holds():
    assert entails_finite([F], parse_formula("P(eps x. P(x))"), 3) == NoneFoundUpTo(3)
    pair = [F, parse_formula("Q(eps x. Q(x))")]
    assert entails_finite(pair, parse_formula("exists x. (P(x) /\\ Q(x))"), 3) == NoneFoundUpTo(3)


def test_non_entailment_counter_model():
    result = entails_finite([F], parse_formula("Q(eps x. Q(x))"), 3)
    assert isinstance(result, CounterModel)
    m = result.model
    assert eval_formula(m, F) and not eval_formula(m, parse_formula("Q(eps x. Q(x))"))
    # the first model in enumeration order: one atom, Q empty, P full
    assert m.domain("e") == ("a",)
    assert m.preds["Q"] == frozenset() and m.preds["P"] == frozenset({("a",)})


def test_search_is_deterministic():
    a = entails_finite([F], parse_formula("Q(eps x. Q(x))"), 3)
    b = entails_finite([F], parse_formula("Q(eps x. Q(x))"), 3)
    assert format_model(a.model) == format_model(b.model)


def test_search_cap():
    with pytest.raises(SearchSpaceTooLarge):
        entails_finite([F], parse_formula("P(eps x. P(x))"), 3, cap=100)


def test_enumeration_counts():
    sig = Signature(("e",), preds={"P": ("e",)})
    # sizes 1..2 with P's extensions and all admissible choices
    assert sum(1 for _ in enumerate_models(sig, 2)) == 2 * 1 + 4 * 4
    assert sum(1 for _ in enumerate_models(sig, 2, choice_sorts=())) == 2 + 4
