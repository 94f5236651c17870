from pathlib import Path

import pytest

import oracles
from hilbertsem.errors import ParseError
from hilbertsem.lam import (
    App,
    ApplicationMismatch,
    Arrow,
    BaseSort,
    Const,
    EscapingTypeVar,
    Lam,
    NotAFunction,
    Pi,
    T,
    TyApp,
    TyLam,
    TypeMismatch,
    TypeVar,
    TypingContext,
    UnboundName,
    UnknownSort,
    Var,
    alpha_eq,
    arrows,
    parse_term,
    parse_type,
    show_term,
    show_type,
    substitute,
    substitute_term,
    substitute_type,
    type_eq,
    type_of,
)
from hilbertsem.lexicon import POLY_AND, load_lexicon, poly_and

GOLDEN = Path(__file__).parent / "golden"
E, ANI = BaseSort("e"), BaseSort("ani")


@pytest.fixture
def ctx():
    return TypingContext.standard(("e", "ani", "T", "P", "Pl"), {"c": E, "song": Arrow(E, T)})


def test_identity(ctx):
    assert show_type(type_of(ctx, parse_term(r"\x:e. x", ctx))) == "e -> e"


def test_polymorphic_identity(ctx):
    ty = type_of(ctx, parse_term(r"/\a. \x:a. x", ctx))
    assert type_eq(ty, Pi("a", Arrow(TypeVar("a"), TypeVar("a"))))


def test_generalized_quantifier_a():
    lex = load_lexicon((Path(__file__).parent.parent / "data" / "keith.lex").read_text())
    got = show_type(lex.entries["a"].type)
    assert got == (GOLDEN / "gq_a_type.txt").read_text().strip() == oracles.gq_a_type()


def test_poly_and_type_agrees_with_oracle(ctx):
    golden = (GOLDEN / "poly_and_type.txt").read_text().strip()
    assert oracles.poly_and_type() == golden
    assert show_type(type_of(ctx, poly_and(ctx))) == golden
    assert show_type(type_of(ctx, parse_term(POLY_AND, ctx))) == golden


@pytest.mark.parametrize(
    "term,error",
    [
        (Var("zz", E), UnboundName),
        (Const("nope", T), UnboundName),
        (Const("c", T), TypeMismatch),
        (App(Const("c", E), Const("c", E)), NotAFunction),
        (App(Lam("x", T, Var("x", T)), Const("c", E)), ApplicationMismatch),
        (Lam("x", TypeVar("a"), TyLam("a", Var("x", TypeVar("a")))), EscapingTypeVar),
    ],
)
def test_type_errors(ctx, term, error):
    with pytest.raises(error):
        type_of(ctx, term)


def test_application_mismatch_carries_types(ctx):
    with pytest.raises(ApplicationMismatch) as info:
        type_of(ctx, App(Const("song", Arrow(E, T)), Lam("x", E, Var("x", E))))
    assert info.value.expected == E


def test_vacuous_pi(ctx):
    ty = type_of(ctx, TyLam("a", Const("c", E)))
    assert type_eq(ty, Pi("a", E))


def test_substitution_examples():
    c = Const("c", E)
    assert substitute_term(Lam("y", E, Var("x", E)), "x", c) == Lam("y", E, c)
    ident = Lam("x", E, Var("x", E))
    assert substitute_term(ident, "x", c) == ident


def test_substitution_avoids_capture():
    fe = Arrow(E, E)
    body = Lam("y", E, App(Var("x", fe), Var("y", E)))
    out = substitute_term(body, "x", Var("y", fe))
    assert show_term(out) == r"\y':e. y y'"
    assert alpha_eq(out, Lam("w", E, App(Var("y", fe), Var("w", E))))


def test_substitution_type_mismatch(ctx):
    with pytest.raises(TypeMismatch):
        substitute_term(Var("x", T), "x", Const("c", E), ctx)


def test_substitute_type_examples():
    ident = parse_type("Pi a. a -> a", ["e"])
    assert substitute_type(ident, "b", E) == ident
    assert substitute_type(Arrow(TypeVar("a"), T), "a", ANI) == Arrow(ANI, T)


def test_substitute_type_poly_and_instantiation(ctx):
    body = type_of(ctx, poly_and(ctx))
    inner = substitute_type(substitute_type(body.body.body, "a", BaseSort("Pl")), "b", BaseSort("P"))
    assert show_type(inner) == "(Pl -> t) -> (P -> t) -> Pi c. c -> (c -> Pl) -> (c -> P) -> t"


def test_substitute_type_avoids_capture():
    ty = Pi("b", Arrow(TypeVar("a"), TypeVar("b")))
    out = substitute_type(ty, "a", TypeVar("b"))
    assert alpha_eq(out, Pi("z", Arrow(TypeVar("b"), TypeVar("z"))))


def test_substitute_type_in_term():
    term = Lam("x", TypeVar("a"), Var("x", TypeVar("a")))
    assert substitute(term, "a", E) == Lam("x", E, Var("x", E))


def test_alpha_eq():
    assert alpha_eq(Lam("x", E, Var("x", E)), Lam("y", E, Var("y", E)))
    assert alpha_eq(Pi("a", TypeVar("a")), Pi("b", TypeVar("b")))
    assert not alpha_eq(Lam("x", E, Var("x", E)), Lam("x", T, Var("x", T)))
    assert not alpha_eq(Lam("x", E, Var("y", E)), Lam("y", E, Var("y", E)))


def test_parse_and_show_round_trip(ctx):
    text = r"(/\a. \x:a. x) {e} c"
    term = parse_term(text, ctx)
    assert isinstance(term, App) and isinstance(term.fun, TyApp)
    assert parse_term(show_term(term), ctx) == term


def test_parse_errors(ctx):
    with pytest.raises(UnknownSort):
        parse_type("Pi a. q", ["e"])
    with pytest.raises(ParseError):
        parse_term(r"\x:e. (x", ctx)


def test_arrows_is_right_nested():
    assert arrows(E, E, T) == Arrow(E, Arrow(E, T))
