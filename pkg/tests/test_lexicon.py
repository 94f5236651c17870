import itertools
from pathlib import Path

import pytest

import oracles
from hilbertsem.errors import ParseError
from hilbertsem.lam import (
    App,
    Arrow,
    BaseSort,
    Const,
    Lam,
    Pi,
    T,
    TyApp,
    TypeVar,
    Var,
    alpha_eq,
    hilbert_type,
    parse_type,
    show_type,
    type_eq,
    type_of,
)
from hilbertsem.lexicon import (
    FLEXIBLE,
    RIGID,
    AmbiguousMatch,
    Coercion,
    LexEntry,
    NoMatch,
    NotAProperty,
    TypeErrorInEntry,
    apply_determiner,
    gq_term,
    infer_type_args,
    load_lexicon,
    load_lexicon_file,
    poly_and,
    resolve_coercions,
)
from hilbertsem.logic import free_vars, parse_formula, pretty, readback
from hilbertsem.models import eval_formula, parse_model
from hilbertsem.normalize import normalize

DATA = Path(__file__).resolve().parent.parent / "data"
TOWN, PEOPLE, PLACE, CLUB = (BaseSort(s) for s in ("T", "P", "Pl", "F"))


@pytest.fixture(scope="module")
def towns():
    return load_lexicon_file(DATA / "liverpool.lex")


def test_town_lexicon_loads(towns):
    assert len(towns) == 4
    assert set(towns.sorts) >= {"T", "P", "Pl", "F"}
    liverpool = towns.entries["Liverpool"]
    assert [c.name for c in liverpool.coercions] == ["Id_T", "t1", "t2", "t3"]
    assert [c.rigidity for c in liverpool.coercions] == [FLEXIBLE, RIGID, FLEXIBLE, FLEXIBLE]
    for c in liverpool.coercions:
        assert type_eq(type_of(towns.ctx, c.term), Arrow(BaseSort(c.source), BaseSort(c.target)))


def test_identity_added_first_when_missing():
    lex = load_lexicon('sort T "town"\nsort P\nconst lpl : T\nword L = lpl\n  coerce t2 : T -> P flexible\n')
    assert [c.name for c in lex.entries["L"].coercions] == ["Id_T", "t2"]
    assert lex.entries["L"].coercions[0].is_identity


def test_empty_lexicon():
    lex = load_lexicon("")
    assert len(lex) == 0 and lex.determiners == {}


def test_coercion_must_be_arrow():
    with pytest.raises(TypeErrorInEntry) as info:
        load_lexicon("sort T\nconst lpl : T\nword L = lpl\n  coerce bad : T flexible\n")
    assert info.value.word == "L"


def test_ill_typed_principal_term():
    with pytest.raises(TypeErrorInEntry):
        load_lexicon("sort e\nconst c : e\nword w = c c\n")


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        load_lexicon("sort e\nconst c : e\nword = c\n")
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        load_lexicon("sort e\n\nconst c : e -> )\n")
    assert info.value.line == 3 and info.value.column == 16
    with pytest.raises(TypeErrorInEntry):
        load_lexicon("sort e\nconst c : q\n")


def test_determiners_get_hilbert_constant(towns):
    lex = load_lexicon_file(DATA / "cat.lex")
    for word, op in (("a", "epsilon"), ("every", "tau"), ("the", "iota")):
        det = lex.determiners[word]
        assert det.operator == op
        assert type_eq(det.constant.type, hilbert_type())
        assert show_type(det.constant.type) == "Pi a. (a -> t) -> a"


def test_generalized_determiner_parses():
    lex = load_lexicon("sort e\ndet most = generalized most\n")
    assert lex.determiners["most"].generalized


# type-argument inference ------------------------------------------------------


def test_infer_epsilon_instance():
    ani = BaseSort("ani")
    assert infer_type_args(hilbert_type(), Arrow(Arrow(ani, T), ani)) == {"a": ani}


def test_infer_identity_instance():
    e = BaseSort("e")
    assert infer_type_args(Pi("a", Arrow(TypeVar("a"), TypeVar("a"))), Arrow(e, e)) == {"a": e}


def test_infer_poly_and_arguments(towns):
    poly = type_of(towns.ctx, poly_and(towns.ctx))
    instance = parse_type("(Pl -> t) -> (P -> t) -> Pi c. c -> (c -> Pl) -> (c -> P) -> t", towns.sorts)
    assert infer_type_args(poly, instance) == {"a": PLACE, "b": PEOPLE}
    # the conjunction's inner binder is fixed later by the argument
    inner = parse_type("Pi c. c -> (c -> Pl) -> (c -> P) -> t", towns.sorts)
    full = parse_type("T -> (T -> Pl) -> (T -> P) -> t", towns.sorts)
    assert infer_type_args(inner, full) == {"c": TOWN}


def test_infer_errors():
    e, ani = BaseSort("e"), BaseSort("ani")
    with pytest.raises(NoMatch):
        infer_type_args(hilbert_type(), Arrow(Arrow(ani, T), e))
    with pytest.raises(NoMatch):
        infer_type_args(Arrow(e, e), Arrow(e, e))
    with pytest.raises(AmbiguousMatch):
        infer_type_args(Pi("a", Pi("b", Arrow(TypeVar("a"), TypeVar("a")))), Arrow(e, e))


# coercion resolution ------------------------------------------------------------


def _candidates(lex, words, arity):
    liverpool = lex.entries["Liverpool"]
    preds = [lex.entries[w].principal for w in words]
    if arity == 1:
        fn = preds[0]
        return resolve_coercions(fn, type_of(lex.ctx, fn), liverpool.principal, "T", liverpool)
    targets = [type_of(lex.ctx, p).domain for p in preds]
    conj = App(App(TyApp(TyApp(poly_and(lex.ctx), targets[0]), targets[1]), preds[0]), preds[1])
    conj = TyApp(normalize(conj), TOWN)
    return resolve_coercions(conj, type_of(lex.ctx, conj), liverpool.principal, "T", liverpool, 2)


def test_single_coercion(towns):
    (cand,) = _candidates(towns, ["spread_out"], 1)
    assert cand.assignment.names == ("t3",)
    assert show(towns, cand.term) == "spread_out(t3(lpl))"


def test_copredication(towns):
    (cand,) = _candidates(towns, ["spread_out", "voted"], 2)
    assert cand.assignment.names == ("t3", "t2")
    assert show(towns, cand.term) == r"spread_out(t3(lpl)) /\ voted(t2(lpl))"


def test_rigid_exclusivity(towns):
    assert _candidates(towns, ["voted", "won"], 2) == []


def test_rigid_alone_is_fine(towns):
    (cand,) = _candidates(towns, ["won"], 1)
    assert cand.assignment.names == ("t1",)


def show(lex, term):
    return pretty(readback(lex.ctx, normalize(term)))


def test_candidates_always_type_check(towns):
    for a, b in itertools.product(["spread_out", "voted", "won"], repeat=2):
        for cand in _candidates(towns, [a, b], 2):
            assert type_eq(type_of(towns.ctx, cand.term), T)
            rigid = [c for c in cand.assignment.slots if c.rigid]
            assert not rigid or len({c.name for c in cand.assignment.slots}) == 1


@pytest.mark.parametrize("per_slot", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_flexible_candidate_count_is_product(per_slot):
    # synthetic lexicon: k flexible coercions from S to each of two targets
    lines = ["sort S", "sort A", "sort B", "const s : S", "const pa : A -> t", "const pb : B -> t", "word x = s"]
    for target, k in zip("AB", per_slot):
        lines += [f"  coerce c{target}{i} : S -> {target} flexible" for i in range(k)]
    lines += ["word pa = pa", "word pb = pb"]
    lex = load_lexicon("\n".join(lines) + "\n")
    entry = lex.entries["x"]
    conj = App(App(TyApp(TyApp(poly_and(lex.ctx), BaseSort("A")), BaseSort("B")), Const("pa", Arrow(BaseSort("A"), T))),
               Const("pb", Arrow(BaseSort("B"), T)))
    conj = TyApp(normalize(conj), BaseSort("S"))
    cands = resolve_coercions(conj, type_of(lex.ctx, conj), entry.principal, "S", entry, 2)
    assert len(cands) == per_slot[0] * per_slot[1]


def test_rigid_pruning_count():
    s = BaseSort("S")
    def co(name, target, rigidity):
        return Coercion(name, Lam("x", s, Const(f"k_{name}", BaseSort(target))), "S", target, rigidity)

    entry = LexEntry("x", Const("s", s), s, (co("r", "A", RIGID), co("f", "A", FLEXIBLE), co("g", "B", FLEXIBLE)))
    ftype = parse_type("S -> (S -> A) -> (S -> A) -> t", ["S", "A", "B"])
    cands = resolve_coercions(Var("F", ftype), ftype, Const("s", s), "S", entry, 2)
    # (r,r) and (f,f) survive; (r,f) and (f,r) mix a rigid coercion with another
    assert sorted(c.assignment.names for c in cands) == [("f", "f"), ("r", "r")]


# determiners ------------------------------------------------------------------


@pytest.fixture(scope="module")
def cats():
    return load_lexicon_file(DATA / "cat.lex")


def test_indefinite_presupposition(cats):
    res = apply_determiner(cats.determiners["a"], cats.entries["cat"].principal, cats.ctx)
    assert res.sort == "ani"
    assert pretty(res.presupposition) == "cat(eps x:ani. cat(x))"
    assert type_eq(type_of(cats.ctx, res.term), BaseSort("ani"))


def test_universal_has_no_presupposition(cats):
    res = apply_determiner(cats.determiners["every"], cats.entries["cat"].principal, cats.ctx)
    assert res.presupposition is None
    assert res.sort == "ani"


def test_definite_existence_and_uniqueness(cats):
    res = apply_determiner(cats.determiners["the"], cats.entries["cat"].principal, cats.ctx)
    assert pretty(res.presupposition) == r"exists x:ani. (cat(x) /\ (forall y:ani. (cat(y) -> y = x)))"


def test_uniqueness_formula_on_russell_models():
    presup = parse_formula(r"exists x:e. (P(x) /\ forall y:e. (P(y) -> y = x))")
    for name, pred in (("president", "president_of_france"), ("king", "king_of_france"), ("minister", "minister")):
        text = (DATA / "russell" / f"{name}.model").read_text()
        model = parse_model(text.replace(pred, "P"))
        ext = {tup[0] for tup in model.preds["P"]}
        assert eval_formula(model, presup) == oracles.unique_existence(model.domain("e"), ext)


def test_not_a_property(cats):
    with pytest.raises(NotAProperty):
        apply_determiner(cats.determiners["a"], Const("c", BaseSort("ani")), cats.ctx.with_constants({"c": BaseSort("ani")}))


def test_presuppositions_are_closed(cats):
    for word in ("a", "the"):
        res = apply_determiner(cats.determiners[word], cats.entries["cat"].principal, cats.ctx)
        assert not free_vars(res.presupposition)


def test_gq_terms_type_check(cats):
    for word in ("a", "every", "the"):
        term = gq_term(cats.determiners[word], "ani")
        assert show_type(type_of(cats.ctx, term)) == "(ani -> t) -> (ani -> t) -> t"
    lex = load_lexicon("sort e\ndet most = generalized most\n")
    with pytest.raises(NotAProperty):
        gq_term(lex.determiners["most"], "e")


def test_gq_a_matches_keith_entry():
    keith = load_lexicon_file(DATA / "keith.lex")
    cats = load_lexicon_file(DATA / "cat.lex")
    assert alpha_eq(gq_term(cats.determiners["a"], "e"), keith.entries["a"].principal)
