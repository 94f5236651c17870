from pathlib import Path

import pytest

from hilbertsem.epsilon import epsilon_to_fo
from hilbertsem.errors import ParseError
from hilbertsem.lexicon import load_lexicon_file
from hilbertsem.logic import And, Epsilon, alpha_eq, parse_formula, pretty, show_term
from hilbertsem.models import CounterModel, NoneFoundUpTo, entails_finite
from hilbertsem.pipeline import (
    EPSILON_MODE,
    GQ,
    Leaf,
    NoAntecedent,
    Node,
    UnknownWord,
    compose,
    parse_discourse,
    parse_tree,
    resolve_anaphora,
    show_tree,
    tree_words,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="module")
def cats():
    return load_lexicon_file(DATA / "cat.lex")


@pytest.fixture(scope="module")
def keith():
    return load_lexicon_file(DATA / "keith.lex")


@pytest.fixture(scope="module")
def towns():
    return load_lexicon_file(DATA / "liverpool.lex")


@pytest.fixture(scope="module")
def talk():
    return load_lexicon_file(DATA / "discourse.lex")


# trees -----------------------------------------------------------------------


def test_parse_tree_shapes():
    assert parse_tree("((a cat) sleeps)") == Node(Node(Leaf("a"), Leaf("cat")), Leaf("sleeps"))
    keith = parse_tree("(Keith (sang (a song)))")
    assert keith == Node(Leaf("Keith"), Node(Leaf("sang"), Node(Leaf("a"), Leaf("song"))))
    assert tree_words(keith) == ["Keith", "sang", "a", "song"]
    assert show_tree(keith) == "(Keith (sang (a song)))"


@pytest.mark.parametrize("text", ["((a cat) sleeps", "(a cat))", "(a b c)", "()", ""])
def test_parse_tree_errors(text):
    with pytest.raises(ParseError):
        parse_tree(text)


# composition -------------------------------------------------------------------


def test_gq_keith(keith):
    d = compose(parse_tree("(Keith (sang (a song)))"), keith, GQ)
    assert d.ok
    assert pretty(d.logical_form) == r"exists y:e. (song(y) /\ sang(Keith, y))"
    assert d.presuppositions == []


def test_epsilon_cat(cats):
    d = compose(parse_tree("((a cat) sleeps)"), cats, EPSILON_MODE)
    assert pretty(d.logical_form) == "sleeps(eps x:ani. cat(x))"
    assert [pretty(p) for p in d.presuppositions] == ["cat(eps x:ani. cat(x))"]
    assert show_term(d.referents["a cat"]) == "eps x:ani. cat(x)"


def test_argument_may_come_first(cats):
    a = compose(parse_tree("((a cat) sleeps)"), cats)
    b = compose(parse_tree("(sleeps (a cat))"), cats)
    assert a.logical_form == b.logical_form


def test_liverpool(towns):
    one = compose(parse_tree("(Liverpool spread_out)"), towns)
    assert one.ok and pretty(one.logical_form) == "spread_out(t3(lpl))"
    assert [(w, a.names) for w, a in one.coercions] == [("Liverpool", ("t3",))]

    two = compose(parse_tree("(((and spread_out) voted) Liverpool)"), towns)
    assert two.ok and pretty(two.logical_form) == r"spread_out(t3(lpl)) /\ voted(t2(lpl))"

    three = compose(parse_tree("(((and voted) won) Liverpool)"), towns)
    assert three.status == "rejected"
    assert three.reason.startswith("rigid-exclusivity")
    assert "functor type" in three.reason and "argument type T" in three.reason


def test_type_clash_reason_names_both_types(cats):
    d = compose(parse_tree("((a cat) (a cat))"), cats, GQ)
    assert d.status == "rejected"
    assert "functor type (ani -> t) -> t" in d.reason and "argument type (ani -> t) -> t" in d.reason
    assert not compose(parse_tree("(a cat)"), cats).ok


def test_unknown_word(cats):
    with pytest.raises(UnknownWord):
        compose(parse_tree("((a dog) sleeps)"), cats)


def test_determinism(cats, towns):
    for lex, text in ((cats, "((the cat) sleeps)"), (towns, "(((and spread_out) voted) Liverpool)")):
        a = compose(parse_tree(text), lex, trace=True)
        b = compose(parse_tree(text), lex, trace=True)
        assert a.logical_form == b.logical_form
        assert a.trace.render() == b.trace.render()


@pytest.mark.parametrize(
    "text,count",
    [("((a cat) sleeps)", 1), ("((the cat) sleeps)", 1), ("((every cat) sleeps)", 0), ("(sleeps (a cat))", 1)],
)
def test_presupposition_counts(cats, text, count):
    assert len(compose(parse_tree(text), cats, EPSILON_MODE).presuppositions) == count
    assert compose(parse_tree(text), cats, GQ).presuppositions == []


def test_gq_mode_readings(cats):
    assert pretty(compose(parse_tree("((every cat) sleeps)"), cats, GQ).logical_form) == (
        "forall y:ani. (cat(y) -> sleeps(y))"
    )
    the = compose(parse_tree("((the cat) sleeps)"), cats, GQ).logical_form
    expected = parse_formula(r"exists y:ani. ((cat(y) /\ forall z:ani. (cat(z) -> z = y)) /\ sleeps(y))")
    assert alpha_eq(the, expected)


def test_epsilon_and_gq_readings_relate(cats):
    tree = parse_tree("((a cat) sleeps)")
    eps = compose(tree, cats, EPSILON_MODE)
    gq = compose(tree, cats, GQ)
    with_presup = And(eps.presuppositions[0], eps.logical_form)
    # the witness reading with its presupposition entails the quantifier reading
    assert entails_finite([with_presup], gq.logical_form, 3) == NoneFoundUpTo(3)
    # the converse fails, and the epsilon form has no first-order equivalent
    assert isinstance(entails_finite([gq.logical_form], with_presup, 3), CounterModel)
    assert epsilon_to_fo(eps.logical_form) is None


def test_trace_typing_lines(cats):
    d = compose(parse_tree("((a cat) sleeps)"), cats, trace=True)
    assert ("(a cat)", "ani") in d.typing
    assert ("((a cat) sleeps)", "t") in d.typing
    assert d.trace.render()


# discourse ---------------------------------------------------------------------


def _run(talk, name):
    return resolve_anaphora(parse_discourse((DATA / name).read_text()), talk)


def test_definite_reuses_indefinite(talk):
    out = _run(talk, "definite.trees")
    refs = out.referent_map()
    assert refs["a man"] == refs["the man"] == Epsilon("x", "e", parse_formula("man(x)", variables={"x": "e"}))
    assert pretty(out.derivations[1].logical_form) == "sat_by_window(eps x:e. man(x))"
    # the definite copies a term, so the second sentence adds no presupposition
    assert out.derivations[1].presuppositions == []


def test_repeated_indefinite_is_fresh(talk):
    out = _run(talk, "two_men.trees")
    refs = out.referent_map()
    assert refs["a man"] != refs["a man_2"]
    assert refs["a man_2"].index == 2
    assert refs["him"] == refs["a man"]
    assert pretty(out.derivations[1].logical_form) == "told(eps_2 x:e. man(x), eps x:e. man(x))"


def test_pronoun_copies_antecedent(talk):
    out = _run(talk, "pronoun.trees")
    refs = out.referent_map()
    assert refs["he"] == refs["a man"]
    assert [d.ok for d in out.derivations] == [True, True]


def test_no_antecedent(talk):
    with pytest.raises(NoAntecedent):
        resolve_anaphora(parse_discourse("(he sat)\n"), talk)


def test_definite_without_antecedent_gets_iota(talk):
    out = resolve_anaphora(parse_discourse("((the man) sat)\n"), talk)
    assert pretty(out.derivations[0].logical_form) == "sat_by_window(iota x:e. man(x))"
