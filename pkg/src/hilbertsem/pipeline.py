"""From functor-argument trees to logical forms with presuppositions.

Composition is type driven. At each node, in order:

1. a determiner applied to a property (typed Hilbert operator, or a
   generalized-quantifier term in ``gq`` mode);
2. a polymorphic functor, whose type arguments are matched against the
   arguments, then coerced copredication when the instance has the shape
   ``S -> (S -> X1) -> ... -> (S -> Xn) -> t``;
3. forward application, then reverse application;
4. raising a relation over a quantified argument;
5. coerced application (forward, then reverse).

Anything else is a rejection carrying both types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import HilbertError, ParseError
from .lam import (
    App,
    Arrow,
    BaseSort,
    Const,
    Lam,
    Pi,
    Prop,
    SemTerm,
    SemType,
    T,
    TypingContext,
    Var,
    apply,
    fresh,
    hilbert_type,
    show_type,
    split_arrows,
    term_names,
    type_eq,
    type_of,
)
from .lexicon import (
    EPSILON,
    CoercionAssignment,
    DeterminerEntry,
    LexEntry,
    Lexicon,
    NoMatch,
    NotAProperty,
    apply_determiner,
    coercion_slots,
    gq_term,
    instantiate,
    match_type,
    poly_and,
    property_sort,
    resolve_coercions,
    slot_options,
    strip_pis,
)
from .logic import Formula, canonical, readback, readback_term
from .normalize import ReductionTrace, normalize, normalize_term

GQ = "gq"
EPSILON_MODE = "epsilon"
MODES = (GQ, EPSILON_MODE)
CONJUNCTION = "and"  # built in unless the lexicon defines the word


class UnknownWord(HilbertError):
    pass


class NoAntecedent(HilbertError):
    pass


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Leaf:
    word: str
    index: int | None = None  # subscript for a repeated indefinite


@dataclass(frozen=True)
class Node:
    functor: "Tree"
    argument: "Tree"


@dataclass(frozen=True)
class Referent:
    """An anaphor already resolved to its antecedent's term."""

    word: str
    key: str
    term: SemTerm
    sort: str


Tree = Leaf | Node | Referent

_TREE_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def parse_tree(text: str) -> Tree:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TREE_TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        tokens.append((m.group(1) or m.group(2) or m.group(3), m.start(m.lastindex)))
        pos = m.end()
    if not tokens:
        raise ParseError("empty tree", column=1)
    i = 0

    def parse() -> Tree:
        nonlocal i
        if i >= len(tokens):
            raise ParseError("unexpected end of tree", column=len(text) + 1)
        tok, at = tokens[i]
        i += 1
        if tok == ")":
            raise ParseError("unexpected ')'", column=at + 1)
        if tok != "(":
            return Leaf(tok)
        functor = parse()
        argument = parse()
        if i >= len(tokens) or tokens[i][0] != ")":
            where = tokens[i][1] + 1 if i < len(tokens) else len(text) + 1
            raise ParseError("expected ')' after two subtrees", column=where)
        i += 1
        return Node(functor, argument)

    tree = parse()
    if i != len(tokens):
        raise ParseError("trailing input after tree", column=tokens[i][1] + 1)
    return tree


def show_tree(tree: Tree) -> str:
    if isinstance(tree, Leaf):
        return tree.word if tree.index is None else f"{tree.word}_{tree.index}"
    if isinstance(tree, Referent):
        return tree.word
    return f"({show_tree(tree.functor)} {show_tree(tree.argument)})"


def tree_words(tree: Tree) -> list[str]:
    if isinstance(tree, (Leaf, Referent)):
        return [tree.word]
    return tree_words(tree.functor) + tree_words(tree.argument)


# ---------------------------------------------------------------------------
# derivations


@dataclass
class Derivation:
    tree: Tree
    mode: str
    status: str = "ok"  # "ok" or "rejected"
    reason: str | None = None
    term: SemTerm | None = None
    normal: SemTerm | None = None
    trace: ReductionTrace | None = None
    logical_form: Formula | None = None
    presuppositions: list[Formula] = field(default_factory=list)
    referents: dict[str, object] = field(default_factory=dict)
    referent_terms: dict[str, tuple[SemTerm, str]] = field(default_factory=dict)
    coercions: list[tuple[str, CoercionAssignment]] = field(default_factory=list)
    alternatives: list[tuple[str, CoercionAssignment]] = field(default_factory=list)
    typing: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class _Rejected(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class _Value:
    term: SemTerm
    type: SemType
    text: str
    entry: LexEntry | None = None


@dataclass(frozen=True)
class _Det:
    det: DeterminerEntry
    text: str


@dataclass(frozen=True)
class _Pending:
    """A polymorphic functor still collecting arguments to fix its type."""

    term: SemTerm
    poly: SemType
    unknowns: tuple[str, ...]
    body: SemType
    subst: dict
    args: tuple[_Value, ...]
    text: str


def _polymorphic(v) -> bool:
    return isinstance(v, _Pending) or isinstance(v.type, Pi)


def _indexed(det: DeterminerEntry, index: int | None) -> DeterminerEntry:
    if index is None:
        return det
    return replace(det, constant=Const(f"{det.constant.name}_{index}", hilbert_type()))


class _Composer:
    def __init__(self, lex: Lexicon, mode: str, derivation: Derivation):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.lex = lex
        self.ctx: TypingContext = lex.ctx
        self.mode = mode
        self.d = derivation
        self.presup_terms: list[Formula] = []
        self.referent_terms: list[tuple[str, SemTerm, str]] = []

    # leaves -------------------------------------------------------------

    def leaf(self, tree: Leaf | Referent):
        if isinstance(tree, Referent):
            value = _Value(tree.term, BaseSort(tree.sort), tree.word)
            self.referent_terms.append((tree.key, tree.term, tree.sort))
            return value
        word = tree.word
        if word in self.lex.determiners:
            return _Det(_indexed(self.lex.determiners[word], tree.index), word)
        if word in self.lex.entries:
            entry = self.lex.entries[word]
            return _Value(entry.principal, entry.type, word, entry)
        if word == CONJUNCTION:
            term = poly_and(self.ctx)
            return _Value(term, type_of(self.ctx, term), word)
        if self.lex.is_pronoun(word):
            raise NoAntecedent(f"pronoun {word!r} has no resolved antecedent")
        raise UnknownWord(f"{word!r} is not in the lexicon")

    # nodes --------------------------------------------------------------

    def value(self, tree: Tree):
        if isinstance(tree, (Leaf, Referent)):
            v = self.leaf(tree)
        else:
            v = self.combine(self.value(tree.functor), self.value(tree.argument), tree)
        if isinstance(v, _Value):
            self.d.typing.append((show_tree(tree), show_type(v.type)))
        return v

    def combine(self, f, a, tree: Node):
        text = show_tree(tree)
        if isinstance(a, _Det):
            raise _Rejected(f"type clash: argument {a.text} is incomplete")
        if isinstance(f, _Det):
            return self.determiner(f, a, text)
        if _polymorphic(f):
            if isinstance(a, _Pending):
                raise _Rejected(f"type clash: argument {a.text} is incomplete")
            return self.polymorphic(f, a, text)
        if _polymorphic(a):
            # the subject may precede a polymorphic predicate, as in (x (and P Q))
            ft = f.type
            if isinstance(a, _Value) and isinstance(ft, Arrow) and type_eq(ft.domain, a.type):
                return _Value(App(f.term, a.term), ft.codomain, text)
            return self.polymorphic(a, f, text)
        return self.monomorphic(f, a, text)

    def determiner(self, f: _Det, a: _Value, text: str):
        try:
            sort = property_sort(self.ctx, a.term)
        except NotAProperty as exc:
            raise _Rejected(f"type clash: {f.text} needs a property S -> t, got {show_type(a.type)}") from exc
        if self.mode == GQ:
            try:
                term = App(gq_term(f.det, sort), a.term)
            except NotAProperty as exc:
                raise _Rejected(str(exc)) from exc
            pred = Arrow(BaseSort(sort), T)
            return _Value(term, Arrow(pred, T), text)
        result = apply_determiner(f.det, a.term, self.ctx)
        if result.presupposition is not None:
            self.presup_terms.append(result.presupposition)
        key = referent_key(f.det.word, a.text, _constant_index(f.det.constant.name))
        self.referent_terms.append((key, result.term, sort))
        return _Value(result.term, BaseSort(sort), text)

    def polymorphic(self, f, a: _Value, text: str):
        if isinstance(f, _Value):
            unknowns, body = strip_pis(f.type)
            f = _Pending(f.term, f.type, tuple(unknowns), body, {}, (), f.text)
        body = f.body
        for _ in f.args:
            body = body.codomain
        if not isinstance(body, Arrow):
            raise _Rejected(f"type clash: {f.text} of type {show_type(f.poly)} takes no argument {a.text}")
        try:
            subst = match_type(body.domain, a.type, set(f.unknowns), f.subst)
        except NoMatch as exc:
            raise _Rejected(
                f"type clash: functor type {show_type(f.poly)}, argument type {show_type(a.type)} ({exc})"
            ) from exc
        args = f.args + (a,)
        if any(u not in subst for u in f.unknowns):
            return _Pending(f.term, f.poly, f.unknowns, f.body, subst, args, text)
        term, ty = instantiate(f.term, f.poly, subst)
        for prev in args[:-1]:
            term, ty = App(term, prev.term), ty.codomain
        last = args[-1]
        n = len(split_arrows(ty)[0]) - 1
        if isinstance(last.type, BaseSort) and n >= 2 and coercion_slots(ty, last.type.name, n) is not None:
            return self.coerce(term, ty, last, n, text)
        return _Value(App(term, last.term), ty.codomain, text)

    def monomorphic(self, f: _Value, a: _Value, text: str):
        ft, at = f.type, a.type
        if isinstance(ft, Arrow) and type_eq(ft.domain, at):
            return _Value(App(f.term, a.term), ft.codomain, text)
        if isinstance(at, Arrow) and type_eq(at.domain, ft):
            return _Value(App(a.term, f.term), at.codomain, text)
        raised = self.raise_quantifier(f, a, text) or self.raise_quantifier(a, f, text)
        if raised is not None:
            return raised
        if isinstance(ft, Arrow) and isinstance(ft.domain, BaseSort) and isinstance(at, BaseSort):
            return self.coerce(f.term, ft, a, 1, text)
        if isinstance(at, Arrow) and isinstance(at.domain, BaseSort) and isinstance(ft, BaseSort):
            return self.coerce(a.term, at, f, 1, text)
        raise _Rejected(f"type clash: functor type {show_type(ft)}, argument type {show_type(at)}")

    def raise_quantifier(self, rel: _Value, gq: _Value, text: str):
        """``F : S -> R1 -> ... -> Rk -> t`` over ``A : (S -> t) -> t`` gives
        ``\\r1 ... rk. A (\\y:S. F y r1 ... rk)``."""
        gt = gq.type
        if not (isinstance(gt, Arrow) and isinstance(gt.codomain, Prop) and isinstance(gt.domain, Arrow)):
            return None
        pred = gt.domain
        if not (isinstance(pred.domain, BaseSort) and isinstance(pred.codomain, Prop)):
            return None
        args, result = split_arrows(rel.type)
        if len(args) < 2 or not isinstance(result, Prop) or not type_eq(args[0], pred.domain):
            return None
        avoid = term_names(rel.term) | term_names(gq.term)
        rest = []
        for ty in args[1:]:
            name = fresh("r", avoid)
            avoid.add(name)
            rest.append(Var(name, ty))
        y = fresh("y", avoid)
        scope = Lam(y, pred.domain, apply(rel.term, Var(y, pred.domain), *rest))
        term: SemTerm = App(gq.term, scope)
        for v in reversed(rest):
            term = Lam(v.name, v.type, term)
        ty: SemType = T
        for v in reversed(rest):
            ty = Arrow(v.type, ty)
        return _Value(term, ty, text)

    def coerce(self, functor: SemTerm, ftype: SemType, arg: _Value, arity: int, text: str):
        sort = arg.type.name
        candidates = resolve_coercions(functor, ftype, arg.term, sort, arg.entry, arity)
        if not candidates:
            options = slot_options(ftype, sort, arg.entry, arity)
            types = f"functor type {show_type(ftype)}, argument type {sort}"
            if options and all(options):
                rigid = sorted({c.name for slot in options for c in slot if c.rigid})
                raise _Rejected(
                    f"rigid-exclusivity: {', '.join(rigid)} on {arg.text} excludes every other coercion ({types})"
                )
            raise _Rejected(f"type clash: no coercion of {arg.text} fits ({types})")
        chosen = candidates[0]
        self.d.coercions.append((arg.text, chosen.assignment))
        self.d.alternatives.extend((arg.text, c.assignment) for c in candidates[1:])
        result = ftype
        for _ in range(arity + (1 if arity > 1 else 0)):
            result = result.codomain
        return _Value(chosen.term, result, text)


def referent_key(det_word: str, noun_text: str, index: int | None = None) -> str:
    """``"a man"``, or ``"a man_2"`` for the second indefinite."""
    noun = " ".join(w for w in re.split(r"[\s()]+", noun_text) if w)
    return f"{det_word} {noun}" + ("" if index is None else f"_{index}")


def _constant_index(name: str) -> int | None:
    m = re.search(r"_(\d+)$", name)
    return int(m.group(1)) if m else None


def compose(tree: Tree, lex: Lexicon, mode: str = EPSILON_MODE, trace: bool = False) -> Derivation:
    """Derive the logical form of ``tree``; rejection is reported in the result."""
    d = Derivation(tree, mode)
    c = _Composer(lex, mode, d)
    try:
        value = c.value(tree)
        if isinstance(value, (_Det, _Pending)):
            raise _Rejected(f"incomplete: {value.text} still expects arguments")
        if not isinstance(value.type, Prop):
            raise _Rejected(f"type clash: sentence has type {show_type(value.type)}, expected t")
    except _Rejected as rej:
        d.status, d.reason = "rejected", rej.reason
        return d
    d.term = value.term
    type_of(lex.ctx, d.term)  # every assembled term is checked before reduction
    d.normal, record = normalize_term(d.term, trace=trace)
    d.trace = record if trace else None
    d.logical_form = canonical(readback(lex.ctx, d.normal))
    d.presuppositions = [canonical(p) for p in c.presup_terms]
    for key, term, sort in c.referent_terms:
        d.referents[key] = canonical(readback_term(lex.ctx, normalize(term)))
        d.referent_terms[key] = (term, sort)
    return d


# ---------------------------------------------------------------------------
# discourse


@dataclass(frozen=True)
class StoredReferent:
    key: str
    logic: object
    term: SemTerm
    sort: str


@dataclass
class Discourse:
    sentences: list[Tree]
    referents: list[StoredReferent] = field(default_factory=list)
    derivations: list[Derivation] = field(default_factory=list)

    def referent_map(self) -> dict[str, object]:
        return {r.key: r.logic for r in self.referents}


def parse_discourse(text: str) -> Discourse:
    """One fully bracketed sentence per line; ``#`` starts a comment."""
    trees = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            trees.append(parse_tree(line))
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[-1], line=lineno, column=exc.column) from None
    return Discourse(trees)


def _fresh_key(base: str, taken: set[str]) -> str:
    key, n = base, 1
    while key in taken:
        n += 1
        key = f"{base}_{n}"
    return key


def resolve_anaphora(discourse: Discourse, lex: Lexicon, mode: str = EPSILON_MODE) -> Discourse:
    """Resolve pronouns and definites sentence by sentence, then compose.

    A pronoun copies the most recent earlier referent of a compatible sort.
    ``the N`` reuses the most recent ``a N`` referent when there is one and
    otherwise keeps its own iota reading. A repeated indefinite gets the next
    operator index, so it denotes a new referent.
    """
    store: list[StoredReferent] = []
    resolved: list[Tree] = []
    derivations: list[Derivation] = []

    for tree in discourse.sentences:
        earlier = list(store)
        taken = {r.key for r in store}

        def rewrite(t: Tree) -> Tree:
            if isinstance(t, Leaf) and lex.is_pronoun(t.word):
                want = lex.pronoun_sort(t.word)
                for r in reversed(earlier):
                    if want is None or want == r.sort:
                        key = _fresh_key(t.word, taken)
                        taken.add(key)
                        return Referent(t.word, key, r.term, r.sort)
                raise NoAntecedent(f"no earlier referent for {t.word!r}")
            if not isinstance(t, Node):
                return t
            f = t.functor
            if isinstance(f, Leaf) and f.word in lex.determiners:
                det = lex.determiners[f.word]
                noun = show_tree(t.argument)
                if det.operator == "iota":
                    for r in reversed(earlier):
                        if _is_indefinite_of(r.key, noun, lex):
                            key = _fresh_key(referent_key(det.word, noun), taken)
                            taken.add(key)
                            return Referent(show_tree(t), key, r.term, r.sort)
                if det.operator == EPSILON:
                    key = _fresh_key(referent_key(det.word, noun), taken)
                    taken.add(key)
                    index = _constant_index(key) if key != referent_key(det.word, noun) else None
                    return Node(Leaf(f.word, index), rewrite(t.argument))
            return Node(rewrite(t.functor), rewrite(t.argument))

        new_tree = rewrite(tree)
        resolved.append(new_tree)
        d = compose(new_tree, lex, mode)
        derivations.append(d)
        if d.ok:
            known = {r.key for r in store}
            for key, logic in d.referents.items():
                if key not in known:
                    term, sort = d.referent_terms[key]
                    store.append(StoredReferent(key, logic, term, sort))
    return Discourse(resolved, store, derivations)


def _is_indefinite_of(key: str, noun: str, lex: Lexicon) -> bool:
    for word, det in lex.determiners.items():
        if det.operator != EPSILON:
            continue
        base = referent_key(word, noun)
        if key == base or re.fullmatch(re.escape(base) + r"_\d+", key):
            return True
    return False
