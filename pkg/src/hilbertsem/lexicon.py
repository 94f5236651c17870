"""Generative lexicon: principal terms, flexible/rigid coercions, determiners.

Lexicon file grammar, one declaration per line (``#`` starts a comment)::

    sort T "town"
    const lpl : T
    word Liverpool = lpl
      coerce t2 : T -> P flexible
      coerce t1 : T -> F rigid
    det a = epsilon
    det most = generalized most
    pron he : e

Indented ``coerce`` lines attach to the preceding ``word``. Every word whose
principal term has a base sort ``S`` gets the flexible identity ``Id_S``
unless the file declares it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

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
    TyApp,
    TypeVar,
    TypingContext,
    TypingError,
    Var,
    apply,
    arrows,
    free_type_vars,
    free_vars,
    hilbert_type,
    parse_term,
    parse_type,
    show_type,
    split_arrows,
    substitute_type,
    type_eq,
    type_of,
)
from .logic import Formula, readback
from .normalize import normalize

FLEXIBLE = "flexible"
RIGID = "rigid"

EPSILON = "epsilon"
TAU = "tau"
IOTA = "iota"
GENERALIZED = "generalized"
_OPERATOR_CONSTANT = {EPSILON: "eps", TAU: "tau", IOTA: "iota"}

# polymorphic conjunction for copredication; available as the word "and"
POLY_AND = "/\\a. /\\b. \\P:a->t. \\Q:b->t. /\\c. \\x:c. \\f:c->a. \\g:c->b. and (P (f x)) (Q (g x))"

# pronouns understood without a declaration; they match a referent of any sort
DEFAULT_PRONOUNS = ("he", "she", "it", "him", "her")


class TypeErrorInEntry(HilbertError):
    def __init__(self, word: str, detail: str):
        self.word = word
        super().__init__(f"entry {word!r}: {detail}")


class NoMatch(HilbertError):
    pass


class AmbiguousMatch(HilbertError):
    pass


class NotAProperty(HilbertError):
    pass


@dataclass(frozen=True)
class Coercion:
    name: str
    term: SemTerm
    source: str
    target: str
    rigidity: str = FLEXIBLE

    @property
    def rigid(self) -> bool:
        return self.rigidity == RIGID

    @property
    def is_identity(self) -> bool:
        return self.name == identity_name(self.source) and self.source == self.target


@dataclass(frozen=True)
class LexEntry:
    word: str
    principal: SemTerm
    type: SemType
    coercions: tuple[Coercion, ...] = ()


@dataclass(frozen=True)
class DeterminerEntry:
    word: str
    operator: str  # epsilon, tau, iota or generalized
    constant: Const

    @property
    def generalized(self) -> bool:
        return self.operator == GENERALIZED


@dataclass(frozen=True)
class Lexicon:
    ctx: TypingContext
    entries: dict[str, LexEntry] = field(default_factory=dict)
    determiners: dict[str, DeterminerEntry] = field(default_factory=dict)
    pronouns: dict[str, str | None] = field(default_factory=dict)
    glosses: dict[str, str] = field(default_factory=dict)

    @property
    def sorts(self) -> tuple[str, ...]:
        return self.ctx.sorts

    def pronoun_sort(self, word: str) -> str | None:
        return self.pronouns[word]

    def is_pronoun(self, word: str) -> bool:
        return word in self.pronouns and word not in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def poly_and(ctx: TypingContext) -> SemTerm:
    return parse_term(POLY_AND, ctx)


def identity_name(sort: str) -> str:
    return f"Id_{sort}"


def identity_coercion(sort: str) -> Coercion:
    return Coercion(identity_name(sort), Lam("x", BaseSort(sort), Var("x", BaseSort(sort))), sort, sort, FLEXIBLE)


# ---------------------------------------------------------------------------
# loading


def _gloss(rest: str, lineno: int, col: int) -> tuple[str, str]:
    name, _, gloss = rest.strip().partition(" ")
    gloss = gloss.strip()
    if gloss and not (gloss.startswith('"') and gloss.endswith('"') and len(gloss) >= 2):
        raise ParseError("gloss must be a double-quoted string", line=lineno, column=col)
    return name, gloss[1:-1] if gloss else ""


def _relocate(exc: ParseError, lineno: int, start: int) -> ParseError:
    """Re-anchor an error from a fragment that begins at column ``start``."""
    message = str(exc).split(": ", 1)[-1] if exc.column is not None else str(exc)
    column = start + (exc.column or 1) - 1
    return ParseError(message, line=lineno, column=column)


def load_lexicon(text: str) -> Lexicon:
    sorts: list[str] = []
    glosses: dict[str, str] = {}
    constants: dict[str, SemType] = {}
    generalized: list[str] = []
    pending_words: list[tuple[int, int, str, str]] = []  # lineno, column, word, term text
    coercions: dict[str, list[tuple[int, str, str, str, str]]] = {}
    det_lines: list[tuple[int, str, str, str | None]] = []
    pronouns: dict[str, str | None] = {w: None for w in DEFAULT_PRONOUNS}
    current_word: str | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0].isspace()
        stripped = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        keyword, _, rest = stripped.partition(" ")
        rest_col = col + len(keyword) + 1

        if keyword == "coerce":
            if not indented or current_word is None:
                raise ParseError("coerce must be indented under a word", line=lineno, column=col)
            head, _, rigidity = rest.rpartition(" ")
            name, colon, ty = head.partition(":")
            if not colon or rigidity not in (FLEXIBLE, RIGID):
                raise ParseError("expected 'coerce NAME : S -> T flexible|rigid'", line=lineno, column=rest_col)
            coercions[current_word].append((lineno, name.strip(), ty.strip(), rigidity, current_word))
            continue
        if indented:
            raise ParseError(f"unexpected indented {keyword!r}", line=lineno, column=col)
        current_word = None
        if keyword == "sort":
            name, gloss = _gloss(rest, lineno, rest_col)
            if not name.isidentifier():
                raise ParseError(f"bad sort name {name!r}", line=lineno, column=rest_col)
            if name in sorts or name == "t":
                raise ParseError(f"sort {name} declared twice", line=lineno, column=rest_col)
            sorts.append(name)
            glosses[name] = gloss
        elif keyword == "const":
            name, colon, ty = rest.partition(":")
            name = name.strip()
            if not colon or not name:
                raise ParseError("expected 'const NAME : TYPE'", line=lineno, column=rest_col)
            if name in constants:
                raise ParseError(f"constant {name} declared twice", line=lineno, column=rest_col)
            try:
                constants[name] = parse_type(ty, sorts)
            except ParseError as exc:
                raise _relocate(exc, lineno, rest_col + rest.index(":") + 1) from None
            except TypingError as exc:
                raise TypeErrorInEntry(name, str(exc)) from None
        elif keyword == "word":
            word, eq, term_text = rest.partition("=")
            word = word.strip()
            if not eq or not word:
                raise ParseError("expected 'word SURFACE = TERM'", line=lineno, column=rest_col)
            if any(w == word for _, _, w, _ in pending_words):
                raise ParseError(f"word {word} declared twice", line=lineno, column=rest_col)
            offset = rest_col + rest.index("=") + 1
            pending_words.append((lineno, offset, word, term_text))
            coercions[word] = []
            current_word = word
        elif keyword == "det":
            word, eq, spec = rest.partition("=")
            parts = spec.split()
            if not eq or not parts or parts[0] not in (EPSILON, TAU, IOTA, GENERALIZED):
                raise ParseError("expected 'det WORD = epsilon|tau|iota|generalized NAME'",
                                 line=lineno, column=rest_col)
            if parts[0] == GENERALIZED:
                if len(parts) != 2:
                    raise ParseError("generalized determiner needs a name", line=lineno, column=rest_col)
                generalized.append(parts[1])
            elif len(parts) != 1:
                raise ParseError("trailing text after operator", line=lineno, column=rest_col)
            det_lines.append((lineno, word.strip(), parts[0], parts[1] if len(parts) > 1 else None))
        elif keyword == "pron":
            word, colon, sort = rest.partition(":")
            word, sort = word.strip(), sort.strip() or None
            if sort is not None and sort not in sorts:
                raise ParseError(f"undeclared sort {sort}", line=lineno, column=rest_col)
            pronouns[word] = sort
        else:
            raise ParseError(f"unknown declaration {keyword!r}", line=lineno, column=col)

    # coercion constants join the signature
    parsed_coercions: dict[str, list[tuple[str, str, str, str]]] = {}
    for word, items in coercions.items():
        parsed_coercions[word] = []
        for lineno, name, ty_text, rigidity, _ in items:
            try:
                ty = parse_type(ty_text, sorts)
            except ParseError as exc:
                raise _relocate(exc, lineno, 1) from None
            except TypingError as exc:
                raise TypeErrorInEntry(word, str(exc)) from None
            if not (isinstance(ty, Arrow) and isinstance(ty.domain, BaseSort) and isinstance(ty.codomain, BaseSort)):
                raise TypeErrorInEntry(word, f"coercion {name} has type {show_type(ty)}, not S -> T over base sorts")
            src, dst = ty.domain.name, ty.codomain.name
            if not (name == identity_name(src) and src == dst):
                if name in constants and not type_eq(constants[name], ty):
                    raise TypeErrorInEntry(word, f"coercion {name} redeclared with another type")
                constants[name] = ty
            parsed_coercions[word].append((name, src, dst, rigidity))

    try:
        ctx = TypingContext.standard(sorts, constants, generalized)
    except TypingError as exc:
        raise TypeErrorInEntry("<signature>", str(exc)) from None

    entries: dict[str, LexEntry] = {}
    for lineno, offset, word, term_text in pending_words:
        try:
            term = parse_term(term_text, ctx)
            ty = type_of(ctx, term)
        except ParseError as exc:
            raise _relocate(exc, lineno, offset) from None
        except TypingError as exc:
            raise TypeErrorInEntry(word, str(exc)) from None
        if free_vars(term):
            raise TypeErrorInEntry(word, "principal term is not closed")
        entry_coercions: list[Coercion] = []
        for name, src, dst, rigidity in parsed_coercions[word]:
            if not (isinstance(ty, BaseSort) and ty.name == src):
                raise TypeErrorInEntry(word, f"coercion {name} expects {src}, entry has type {show_type(ty)}")
            if name == identity_name(src) and src == dst:
                entry_coercions.append(Coercion(name, identity_coercion(src).term, src, dst, rigidity))
            else:
                entry_coercions.append(Coercion(name, Const(name, ctx.constants[name]), src, dst, rigidity))
        if isinstance(ty, BaseSort) and not any(c.is_identity for c in entry_coercions):
            entry_coercions.insert(0, identity_coercion(ty.name))
        # identity competes first, then declaration order
        entry_coercions.sort(key=lambda c: not c.is_identity)
        entries[word] = LexEntry(word, term, ty, tuple(entry_coercions))

    determiners: dict[str, DeterminerEntry] = {}
    for lineno, word, op, name in det_lines:
        if word in entries or word in determiners:
            raise ParseError(f"word {word} declared twice", line=lineno, column=1)
        const_name = name if op == GENERALIZED else _OPERATOR_CONSTANT[op]
        determiners[word] = DeterminerEntry(word, op, Const(const_name, hilbert_type()))

    return Lexicon(ctx, entries, determiners, pronouns, glosses)


def load_lexicon_file(path) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh.read())


# ---------------------------------------------------------------------------
# type-argument inference


def strip_pis(ty: SemType) -> tuple[list[str], SemType]:
    names = []
    while isinstance(ty, Pi):
        names.append(ty.var)
        ty = ty.body
    return names, ty


def match_type(pattern: SemType, instance: SemType, unknowns, subst: dict[str, SemType] | None = None,
               _renaming: dict[str, str] | None = None) -> dict[str, SemType]:
    """Extend ``subst`` so that ``pattern[subst]`` equals ``instance``.

    Only names in ``unknowns`` may be bound; inner Pi binders are matched up to
    renaming. Raises :class:`NoMatch`.
    """
    subst = dict(subst or {})
    renaming = _renaming or {}
    if isinstance(pattern, TypeVar):
        if pattern.name in renaming:
            if isinstance(instance, TypeVar) and instance.name == renaming[pattern.name]:
                return subst
            raise NoMatch(f"bound variable {pattern.name} cannot match {show_type(instance)}")
        if pattern.name in unknowns:
            if free_type_vars(instance) & set(renaming.values()):
                raise NoMatch(f"{pattern.name} would capture a bound type variable")
            if pattern.name in subst:
                if not type_eq(subst[pattern.name], instance):
                    raise NoMatch(
                        f"{pattern.name} needs both {show_type(subst[pattern.name])} and {show_type(instance)}"
                    )
                return subst
            subst[pattern.name] = instance
            return subst
        if isinstance(instance, TypeVar) and instance.name == pattern.name:
            return subst
        raise NoMatch(f"{show_type(pattern)} does not match {show_type(instance)}")
    if isinstance(pattern, (BaseSort, Prop)):
        if pattern == instance:
            return subst
        raise NoMatch(f"{show_type(pattern)} does not match {show_type(instance)}")
    if isinstance(pattern, Arrow):
        if not isinstance(instance, Arrow):
            raise NoMatch(f"{show_type(pattern)} does not match {show_type(instance)}")
        subst = match_type(pattern.domain, instance.domain, unknowns, subst, renaming)
        return match_type(pattern.codomain, instance.codomain, unknowns, subst, renaming)
    if isinstance(pattern, Pi):
        if not isinstance(instance, Pi):
            raise NoMatch(f"{show_type(pattern)} does not match {show_type(instance)}")
        inner_unknowns = set(unknowns) - {pattern.var}
        return match_type(pattern.body, instance.body, inner_unknowns, subst, {**renaming, pattern.var: instance.var})
    raise TypeError(f"not a type: {pattern!r}")


def infer_type_args(poly: SemType, instance: SemType) -> dict[str, SemType]:
    """Instantiate the leading Pi binders of ``poly`` so that it equals ``instance``."""
    unknowns, body = strip_pis(poly)
    if not unknowns:
        raise NoMatch(f"{show_type(poly)} is not polymorphic")
    clash = free_type_vars(instance) & set(unknowns)
    if clash:
        raise NoMatch(f"instance mentions the bound variable {sorted(clash)[0]}")
    subst = match_type(body, instance, set(unknowns))
    missing = [u for u in unknowns if u not in subst]
    if missing:
        raise AmbiguousMatch(f"nothing determines {missing[0]}")
    return {u: subst[u] for u in unknowns}


def instantiate(term: SemTerm, ty: SemType, subst: dict[str, SemType]) -> tuple[SemTerm, SemType]:
    """Apply ``term`` to the type arguments of its leading Pi binders."""
    unknowns, _ = strip_pis(ty)
    for u in unknowns:
        assert isinstance(ty, Pi)
        term = TyApp(term, subst[u])
        ty = substitute_type(ty.body, ty.var, subst[u])
    return term, ty


# ---------------------------------------------------------------------------
# coercion resolution


@dataclass(frozen=True)
class CoercionAssignment:
    word: str | None
    slots: tuple[Coercion, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.slots)


@dataclass(frozen=True)
class Candidate:
    term: SemTerm
    assignment: CoercionAssignment


def coercions_for(entry: LexEntry | None, sort: str) -> tuple[Coercion, ...]:
    if entry is None or not entry.coercions:
        return (identity_coercion(sort),)
    return entry.coercions


def coercion_slots(functor_type: SemType, arg_sort: str, arity: int) -> list[str] | None:
    """Target sorts of the predication slots, or ``None`` if the shape is wrong.

    Arity 1 expects ``D -> R``; arity n >= 2 expects the instantiated
    conjunction shape ``S -> (S -> X1) -> ... -> (S -> Xn) -> t``.
    """
    if arity == 1:
        if isinstance(functor_type, Arrow) and isinstance(functor_type.domain, BaseSort):
            return [functor_type.domain.name]
        return None
    args, result = split_arrows(functor_type)
    if len(args) != arity + 1 or not isinstance(result, Prop) or args[0] != BaseSort(arg_sort):
        return None
    targets = []
    for a in args[1:]:
        if not (isinstance(a, Arrow) and a.domain == BaseSort(arg_sort) and isinstance(a.codomain, BaseSort)):
            return None
        targets.append(a.codomain.name)
    return targets


def slot_options(functor_type: SemType, arg_sort: str, entry: LexEntry | None, arity: int) -> list[list[Coercion]]:
    targets = coercion_slots(functor_type, arg_sort, arity)
    if targets is None:
        return []
    available = coercions_for(entry, arg_sort)
    return [[c for c in available if c.source == arg_sort and c.target == dst] for dst in targets]


def rigid_exclusive(slots: tuple[Coercion, ...]) -> bool:
    """A rigid coercion on the argument leaves no room for any other one."""
    rigid = [c for c in slots if c.rigid]
    return not rigid or all(c.name == rigid[0].name for c in slots)


def resolve_coercions(functor: SemTerm, functor_type: SemType, argument: SemTerm, arg_sort: str,
                      entry: LexEntry | None, arity: int = 1) -> list[Candidate]:
    """All well-typed coerced applications of ``functor`` to ``argument``.

    Order: per slot, identity first and then declaration order; slots vary
    left-major. Candidates violating rigid exclusivity are dropped, so an
    empty list means no reading exists.
    """
    word = entry.word if entry else None
    out = []
    for slots in itertools.product(*slot_options(functor_type, arg_sort, entry, arity)):
        if not rigid_exclusive(slots):
            continue
        if arity == 1:
            term = App(functor, App(slots[0].term, argument))
        else:
            term = apply(functor, argument, *(c.term for c in slots))
        out.append(Candidate(term, CoercionAssignment(word, slots)))
    return out


# ---------------------------------------------------------------------------
# determiners


@dataclass(frozen=True)
class DeterminerResult:
    term: SemTerm
    sort: str
    presupposition: Formula | None


def property_sort(ctx: TypingContext, restriction: SemTerm) -> str:
    try:
        ty = type_of(ctx, restriction)
    except TypingError as exc:
        raise NotAProperty(str(exc)) from None
    if not (isinstance(ty, Arrow) and isinstance(ty.domain, BaseSort) and isinstance(ty.codomain, Prop)):
        raise NotAProperty(f"restriction has type {show_type(ty)}, expected S -> t")
    return ty.domain.name


def uniqueness_term(sort: str, prop: SemTerm) -> SemTerm:
    """``exists x:S. (P(x) /\\ forall y:S. (P(y) -> y = x))`` as a lambda term."""
    s = BaseSort(sort)
    x, y = Var("x", s), Var("y", s)
    pred = Arrow(s, T)
    forall = Const(f"forall_{sort}", Arrow(pred, T))
    exists = Const(f"exists_{sort}", Arrow(pred, T))
    implies = Const("implies", arrows(T, T, T))
    conj = Const("and", arrows(T, T, T))
    eq = Const(f"eq_{sort}", arrows(s, s, T))
    unique = App(forall, Lam("y", s, apply(implies, App(prop, y), apply(eq, y, x))))
    return App(exists, Lam("x", s, apply(conj, App(prop, x), unique)))


def apply_determiner(det: DeterminerEntry, restriction: SemTerm, ctx: TypingContext) -> DeterminerResult:
    """Typed Hilbert reading of ``det restriction``.

    ``epsilon`` presupposes ``P(eps P)``; ``iota`` presupposes existence and
    uniqueness as a single formula; ``tau`` and generalized determiners add
    nothing.
    """
    sort = property_sort(ctx, restriction)
    term = App(TyApp(det.constant, BaseSort(sort)), restriction)
    presup = None
    if det.operator == EPSILON:
        presup = readback(ctx, normalize(App(restriction, term)))
    elif det.operator == IOTA:
        presup = readback(ctx, normalize(uniqueness_term(sort, restriction)))
    return DeterminerResult(term, sort, presup)


def gq_term(det: DeterminerEntry, sort: str) -> SemTerm:
    """Generalized-quantifier term ``(S -> t) -> (S -> t) -> t`` for ``det``."""
    s = BaseSort(sort)
    pred = Arrow(s, T)
    P, Q, z = Var("P", pred), Var("Q", pred), Var("z", s)
    conj = Const("and", arrows(T, T, T))
    if det.operator == EPSILON:
        body = App(Const(f"exists_{sort}", Arrow(pred, T)), Lam("z", s, apply(conj, App(P, z), App(Q, z))))
    elif det.operator == TAU:
        implies = Const("implies", arrows(T, T, T))
        body = App(Const(f"forall_{sort}", Arrow(pred, T)), Lam("z", s, apply(implies, App(P, z), App(Q, z))))
    elif det.operator == IOTA:
        w = Var("w", s)
        implies = Const("implies", arrows(T, T, T))
        eq = Const(f"eq_{sort}", arrows(s, s, T))
        unique = App(Const(f"forall_{sort}", Arrow(pred, T)), Lam("w", s, apply(implies, App(P, w), apply(eq, w, z))))
        body = App(Const(f"exists_{sort}", Arrow(pred, T)),
                   Lam("z", s, apply(conj, apply(conj, App(P, z), unique), App(Q, z))))
    else:
        raise NotAProperty(f"{det.word}: a generalized determiner has no quantifier term")
    return Lam("P", pred, Lam("Q", pred, body))
