"""Many-sorted first-order formulas with Hilbert binding terms.

Besides the formula syntax itself this module owns the bridge to the lambda
calculus: ``readback`` turns a closed normal term of type ``t`` into a
formula and ``formula_to_term`` goes the other way.

Formula text::

    forall x:S. F    exists x:S. F    eps x:S. F    tau x:S. F    iota x:S. F
    F /\\ G    F \\/ G    F -> G    ~F    s = t    P(t1, ..., tn)

A missing ``:S`` annotation means the default sort ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar, Iterable, Iterator, Mapping, Union

from .errors import HilbertError, ParseError
from .lam import (
    App,
    Arrow,
    BaseSort,
    Const,
    Lam,
    Prop,
    SemTerm,
    SemType,
    TyApp,
    TypingContext,
    Var,
    apply,
    arrows,
    fresh,
    hilbert_name,
    hilbert_type,
    show_type,
    spine,
    split_arrows,
    term_names,
    type_of,
    T,
)
from .lam import free_vars as term_free_vars
from .normalize import is_normal
from .syntax import TokenStream

DEFAULT_SORT = "e"


class LogicError(HilbertError):
    pass


class NotNormal(LogicError):
    pass


class NotProp(LogicError):
    pass


class NotClosed(LogicError):
    pass


class UnknownConstantShape(LogicError):
    pass


class NotFirstOrder(LogicError):
    pass


class VagueQuantifier(LogicError):
    """Percentage and vague quantifiers have no first-order reading."""


class IllSorted(LogicError):
    pass


class GuardArityMismatch(LogicError):
    pass


# ---------------------------------------------------------------------------
# syntax trees


@dataclass(frozen=True)
class LConst:
    name: str
    sort: str = DEFAULT_SORT


@dataclass(frozen=True)
class LVar:
    name: str
    sort: str = DEFAULT_SORT


@dataclass(frozen=True)
class FunApp:
    fn: str
    args: tuple["LogicTerm", ...]
    sort: str = DEFAULT_SORT


@dataclass(frozen=True)
class HilbertTerm:
    var: str
    sort: str
    body: "Formula"
    index: int | None = None
    op: ClassVar[str] = ""

    @property
    def operator(self) -> str:
        return self.op if self.index is None else f"{self.op}_{self.index}"


@dataclass(frozen=True)
class Epsilon(HilbertTerm):
    op: ClassVar[str] = "eps"


@dataclass(frozen=True)
class Tau(HilbertTerm):
    op: ClassVar[str] = "tau"


@dataclass(frozen=True)
class Iota(HilbertTerm):
    op: ClassVar[str] = "iota"


@dataclass(frozen=True)
class GenTerm(HilbertTerm):
    """Hilbert-style term for a generalized quantifier such as "most"; not evaluable."""

    name: str = "most"
    op: ClassVar[str] = "gen"

    @property
    def operator(self) -> str:
        return f"gen {self.name}"


HILBERT_CLASSES = {"eps": Epsilon, "tau": Tau, "iota": Iota}

LogicTerm = Union[LConst, LVar, FunApp, HilbertTerm]


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple[LogicTerm, ...] = ()


@dataclass(frozen=True)
class Equal:
    left: LogicTerm
    right: LogicTerm


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"


Formula = Union[Pred, Equal, Not, And, Or, Implies, ForAll, Exists]
Binary = (And, Or, Implies)
Quantifier = (ForAll, Exists)


def term_sort(term: LogicTerm) -> str:
    return term.sort


def with_body(node, body):
    """Copy a binder (quantifier or Hilbert term) with a new body."""
    return _rebind(node, node.var, node.sort, body)


def _rebind(node, var, sort, body):
    if isinstance(node, GenTerm):
        return GenTerm(var, sort, body, node.index, node.name)
    return type(node)(var, sort, body, *((node.index,) if isinstance(node, HilbertTerm) else ()))


# ---------------------------------------------------------------------------
# traversal, free variables, substitution


def free_vars(obj) -> frozenset[str]:
    if isinstance(obj, LVar):
        return frozenset([obj.name])
    if isinstance(obj, LConst):
        return frozenset()
    if isinstance(obj, (FunApp, Pred)):
        out = frozenset()
        for a in obj.args:
            out |= free_vars(a)
        return out
    if isinstance(obj, (HilbertTerm, ForAll, Exists)):
        return free_vars(obj.body) - {obj.var}
    if isinstance(obj, Equal):
        return free_vars(obj.left) | free_vars(obj.right)
    if isinstance(obj, Not):
        return free_vars(obj.body)
    if isinstance(obj, Binary):
        return free_vars(obj.left) | free_vars(obj.right)
    raise TypeError(f"not a formula or term: {obj!r}")


def free_var_sorts(obj) -> dict[str, str]:
    out: dict[str, str] = {}

    def walk(o, bound):
        if isinstance(o, LVar):
            if o.name not in bound:
                out.setdefault(o.name, o.sort)
        elif isinstance(o, (FunApp, Pred)):
            for a in o.args:
                walk(a, bound)
        elif isinstance(o, (HilbertTerm, ForAll, Exists)):
            walk(o.body, bound | {o.var})
        elif isinstance(o, Equal):
            walk(o.left, bound)
            walk(o.right, bound)
        elif isinstance(o, Not):
            walk(o.body, bound)
        elif isinstance(o, Binary):
            walk(o.left, bound)
            walk(o.right, bound)

    walk(obj, frozenset())
    return out


def all_names(obj) -> set[str]:
    """Every variable name, bound or free, occurring in ``obj``."""
    if isinstance(obj, LVar):
        return {obj.name}
    if isinstance(obj, LConst):
        return set()
    if isinstance(obj, (FunApp, Pred)):
        return set().union(*(all_names(a) for a in obj.args)) if obj.args else set()
    if isinstance(obj, (HilbertTerm, ForAll, Exists)):
        return all_names(obj.body) | {obj.var}
    if isinstance(obj, Equal):
        return all_names(obj.left) | all_names(obj.right)
    if isinstance(obj, Not):
        return all_names(obj.body)
    if isinstance(obj, Binary):
        return all_names(obj.left) | all_names(obj.right)
    raise TypeError(f"not a formula or term: {obj!r}")


def is_closed(obj) -> bool:
    return not free_vars(obj)


def substitute(obj, var: str, replacement: LogicTerm):
    """Capture-avoiding ``obj[replacement/var]`` on a formula or a term."""
    return _subst(obj, var, replacement, free_vars(replacement))


def _subst(obj, var, repl, repl_fv):
    if isinstance(obj, LVar):
        return repl if obj.name == var else obj
    if isinstance(obj, LConst):
        return obj
    if isinstance(obj, FunApp):
        return FunApp(obj.fn, tuple(_subst(a, var, repl, repl_fv) for a in obj.args), obj.sort)
    if isinstance(obj, Pred):
        return Pred(obj.name, tuple(_subst(a, var, repl, repl_fv) for a in obj.args))
    if isinstance(obj, Equal):
        return Equal(_subst(obj.left, var, repl, repl_fv), _subst(obj.right, var, repl, repl_fv))
    if isinstance(obj, Not):
        return Not(_subst(obj.body, var, repl, repl_fv))
    if isinstance(obj, Binary):
        return type(obj)(_subst(obj.left, var, repl, repl_fv), _subst(obj.right, var, repl, repl_fv))
    if isinstance(obj, (HilbertTerm, ForAll, Exists)):
        if obj.var == var or var not in free_vars(obj.body):
            return obj
        bound, body = obj.var, obj.body
        if bound in repl_fv:
            new = fresh(bound, repl_fv | all_names(body) | {var})
            body = _subst(body, bound, LVar(new, obj.sort), frozenset([new]))
            bound = new
        return _rebind(obj, bound, obj.sort, _subst(body, var, repl, repl_fv))
    raise TypeError(f"not a formula or term: {obj!r}")


def resort_var(obj, var: str, sort: str):
    """Change the sort carried by the free occurrences of ``var``."""
    return substitute(obj, var, LVar(var, sort))


def subterms(obj) -> Iterator[LogicTerm]:
    """All term occurrences in pre-order, including terms inside Hilbert bodies."""
    if isinstance(obj, (LVar, LConst)):
        yield obj
    elif isinstance(obj, FunApp):
        yield obj
        for a in obj.args:
            yield from subterms(a)
    elif isinstance(obj, HilbertTerm):
        yield obj
        yield from subterms(obj.body)
    elif isinstance(obj, Pred):
        for a in obj.args:
            yield from subterms(a)
    elif isinstance(obj, Equal):
        yield from subterms(obj.left)
        yield from subterms(obj.right)
    elif isinstance(obj, (Not, ForAll, Exists)):
        yield from subterms(obj.body)
    elif isinstance(obj, Binary):
        yield from subterms(obj.left)
        yield from subterms(obj.right)


def has_hilbert(obj) -> bool:
    return any(isinstance(t, HilbertTerm) for t in subterms(obj))


def has_quantifier(f) -> bool:
    if isinstance(f, Quantifier):
        return True
    if isinstance(f, Not):
        return has_quantifier(f.body)
    if isinstance(f, Binary):
        return has_quantifier(f.left) or has_quantifier(f.right)
    if isinstance(f, (Pred, Equal)):
        return any(isinstance(t, HilbertTerm) and has_quantifier(t.body) for t in subterms(f))
    return False


def _key(obj, env: tuple[str, ...]):
    if isinstance(obj, LVar):
        for depth, name in enumerate(reversed(env)):
            if name == obj.name:
                return ("b", depth, obj.sort)
        return ("v", obj.name, obj.sort)
    if isinstance(obj, LConst):
        return ("c", obj.name, obj.sort)
    if isinstance(obj, FunApp):
        return ("f", obj.fn, obj.sort, tuple(_key(a, env) for a in obj.args))
    if isinstance(obj, HilbertTerm):
        return ("h", obj.operator, obj.sort, _key(obj.body, env + (obj.var,)))
    if isinstance(obj, Pred):
        return ("p", obj.name, tuple(_key(a, env) for a in obj.args))
    if isinstance(obj, Equal):
        return ("=", _key(obj.left, env), _key(obj.right, env))
    if isinstance(obj, Not):
        return ("~", _key(obj.body, env))
    if isinstance(obj, Binary):
        return (type(obj).__name__, _key(obj.left, env), _key(obj.right, env))
    if isinstance(obj, Quantifier):
        return (type(obj).__name__, obj.sort, _key(obj.body, env + (obj.var,)))
    raise TypeError(f"not a formula or term: {obj!r}")


def alpha_key(obj):
    return _key(obj, ())


def alpha_eq(a, b) -> bool:
    return _key(a, ()) == _key(b, ())


# ---------------------------------------------------------------------------
# canonical bound-variable names

HILBERT_POOL = ("x", "u", "v")
QUANTIFIER_POOL = ("y", "z", "w")


def _pool(names: tuple[str, ...]) -> Iterator[str]:
    yield from names
    n = 1
    while True:
        yield f"{names[0]}{n}"
        n += 1


def canonical(obj):
    """Rename bound variables to a fixed naming scheme.

    Hilbert binders draw from ``x, u, v, x1, ...`` and quantifiers from
    ``y, z, w, y1, ...``; each binder takes the first name not already in
    scope. Alpha-equivalent inputs give identical outputs.
    """
    return _canon(obj, {}, frozenset(free_vars(obj)))


def _canon(obj, ren: dict[str, str], taken: frozenset[str]):
    if isinstance(obj, LVar):
        return LVar(ren.get(obj.name, obj.name), obj.sort)
    if isinstance(obj, LConst):
        return obj
    if isinstance(obj, FunApp):
        return FunApp(obj.fn, tuple(_canon(a, ren, taken) for a in obj.args), obj.sort)
    if isinstance(obj, Pred):
        return Pred(obj.name, tuple(_canon(a, ren, taken) for a in obj.args))
    if isinstance(obj, Equal):
        return Equal(_canon(obj.left, ren, taken), _canon(obj.right, ren, taken))
    if isinstance(obj, Not):
        return Not(_canon(obj.body, ren, taken))
    if isinstance(obj, Binary):
        return type(obj)(_canon(obj.left, ren, taken), _canon(obj.right, ren, taken))
    if isinstance(obj, (HilbertTerm, ForAll, Exists)):
        pool = HILBERT_POOL if isinstance(obj, HilbertTerm) else QUANTIFIER_POOL
        name = next(n for n in _pool(pool) if n not in taken)
        body = _canon(obj.body, {**ren, obj.var: name}, taken | {name})
        return _rebind(obj, name, obj.sort, body)
    raise TypeError(f"not a formula or term: {obj!r}")


# ---------------------------------------------------------------------------
# printing

_ASCII = {"forall": "forall ", "exists": "exists ", "and": "/\\", "or": "\\/", "implies": "->", "not": "~"}
_UNICODE = {"forall": "∀", "exists": "∃", "and": "∧", "or": "∨", "implies": "⇒", "not": "¬"}
_HILBERT_UNICODE = {"eps": "ε", "tau": "τ", "iota": "ι"}


def _open_right(f) -> bool:
    if isinstance(f, Quantifier):
        return True
    if isinstance(f, Not):
        return _open_right(f.body)
    return False


def show_term(term: LogicTerm, style: str = "ascii") -> str:
    if isinstance(term, (LVar, LConst)):
        return term.name
    if isinstance(term, FunApp):
        return f"{term.fn}({', '.join(show_term(a, style) for a in term.args)})"
    if isinstance(term, HilbertTerm):
        body = pretty(term.body, style)
        if style == "unicode" and term.op in _HILBERT_UNICODE:
            sym = _HILBERT_UNICODE[term.op]
            if term.index is None:
                return f"{sym}{term.var}:{term.sort}. {body}"
            return f"{sym}_{term.index} {term.var}:{term.sort}. {body}"
        return f"{term.operator} {term.var}:{term.sort}. {body}"
    raise TypeError(f"not a term: {term!r}")


def pretty(f, style: str = "ascii") -> str:
    """Deterministic, re-parseable rendering of a formula (or term)."""
    if not isinstance(f, (Pred, Equal, Not, And, Or, Implies, ForAll, Exists)):
        return show_term(f, style)
    sym = _UNICODE if style == "unicode" else _ASCII
    if isinstance(f, Pred):
        if not f.args:
            return f.name
        return f"{f.name}({', '.join(show_term(a, style) for a in f.args)})"
    if isinstance(f, Equal):
        def side(t):
            s = show_term(t, style)
            return f"({s})" if isinstance(t, HilbertTerm) else s
        return f"{side(f.left)} = {side(f.right)}"
    if isinstance(f, Not):
        inner = pretty(f.body, style)
        if isinstance(f.body, Binary):
            inner = f"({inner})"
        return f"{sym['not']}{inner}"
    if isinstance(f, Binary):
        op = {And: "and", Or: "or", Implies: "implies"}[type(f)]

        def operand(g):
            s = pretty(g, style)
            return f"({s})" if isinstance(g, Binary) or _open_right(g) else s

        return f"{operand(f.left)} {sym[op]} {operand(f.right)}"
    if isinstance(f, Quantifier):
        q = "forall" if isinstance(f, ForAll) else "exists"
        body = pretty(f.body, style)
        if isinstance(f.body, Binary):
            body = f"({body})"
        return f"{sym[q]}{f.var}:{f.sort}. {body}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# parsing

_HILBERT_WORDS = {"eps", "tau", "iota"}


class _FormulaParser:
    def __init__(self, text: str, sig: "Signature | None", default_sort: str):
        self.ts = TokenStream(text)
        self.sig = sig
        self.default_sort = default_sort

    def _is_binder_word(self) -> bool:
        tok = self.ts.peek
        if tok.kind != "id":
            return False
        if tok.value == "gen":
            return self.ts.peek_at(1).kind == "id" and self.ts.peek_at(2).kind == "id"
        h = hilbert_name(tok.value)
        return h is not None and self.ts.peek_at(1).kind == "id"

    def binder_head(self) -> tuple[str, str]:
        var = self.ts.ident()
        sort = self.default_sort
        if self.ts.accept(":"):
            sort = self.ts.ident()
            if self.sig is not None and self.sig.sorts and sort not in self.sig.sorts:
                self.ts.fail(f"undeclared sort {sort}")
        self.ts.expect(".")
        return var, sort

    def formula(self, env: dict[str, str]):
        left = self.disjunction(env)
        if self.ts.accept("->"):
            return Implies(left, self.formula(env))
        return left

    def disjunction(self, env):
        left = self.conjunction(env)
        while self.ts.accept("\\/"):
            left = Or(left, self.conjunction(env))
        return left

    def conjunction(self, env):
        left = self.unary(env)
        while self.ts.accept("/\\"):
            left = And(left, self.unary(env))
        return left

    def unary(self, env):
        if self.ts.accept("~"):
            return Not(self.unary(env))
        if self.ts.at("forall") or self.ts.at("exists"):
            cls = ForAll if self.ts.next().value == "forall" else Exists
            var, sort = self.binder_head()
            return cls(var, sort, self.formula({**env, var: sort}))
        return self.atom(env)

    def atom(self, env):
        if self.ts.at("("):
            mark = self.ts.i
            try:
                self.ts.next()
                left = self.term(env)
                self.ts.expect(")")
                if self.ts.at("="):
                    self.ts.next()
                    return Equal(left, self.term(env))
            except (ParseError, LogicError):
                pass
            self.ts.i = mark
            self.ts.next()
            f = self.formula(env)
            self.ts.expect(")")
            return f
        pos = self.ts.peek.pos
        left = self.term(env)
        if self.ts.accept("="):
            return Equal(left, self.term(env))
        if isinstance(left, LConst):
            return Pred(left.name)
        if isinstance(left, FunApp):
            return Pred(left.fn, left.args)
        raise ParseError("expected a formula", column=pos + 1)

    def term(self, env):
        if self.ts.accept("("):
            t = self.term(env)
            self.ts.expect(")")
            return t
        if self._is_binder_word():
            word = self.ts.ident()
            if word == "gen":
                name = self.ts.ident()
                var, sort = self.binder_head()
                return GenTerm(var, sort, self.formula({**env, var: sort}), None, name)
            op, index = hilbert_name(word)
            var, sort = self.binder_head()
            return HILBERT_CLASSES[op](var, sort, self.formula({**env, var: sort}), index)
        name = self.ts.ident()
        if self.ts.accept("("):
            args = []
            if not self.ts.at(")"):
                args.append(self.term(env))
                while self.ts.accept(","):
                    args.append(self.term(env))
            self.ts.expect(")")
            sort = self.default_sort
            if self.sig is not None and name in self.sig.funcs:
                sort = self.sig.funcs[name][1]
            return FunApp(name, tuple(args), sort)
        if name in env:
            return LVar(name, env[name])
        sort = self.default_sort
        if self.sig is not None and name in self.sig.consts:
            sort = self.sig.consts[name]
        return LConst(name, sort)


def parse_formula(text: str, sig: "Signature | None" = None, default_sort: str = DEFAULT_SORT,
                  variables: dict[str, str] | None = None):
    """Parse a formula. Names in ``variables`` (name -> sort) read as free variables."""
    p = _FormulaParser(text, sig, default_sort)
    f = p.formula(dict(variables or {}))
    p.ts.expect_eof()
    return f


def parse_logic_term(text: str, sig: "Signature | None" = None, default_sort: str = DEFAULT_SORT,
                     variables: dict[str, str] | None = None) -> LogicTerm:
    p = _FormulaParser(text, sig, default_sort)
    t = p.term(dict(variables or {}))
    p.ts.expect_eof()
    return t


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...] = ()
    preds: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    funcs: Mapping[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    consts: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        kinds = [set(self.preds), set(self.funcs), set(self.consts)]
        for i in range(3):
            for j in range(i + 1, 3):
                clash = kinds[i] & kinds[j]
                if clash:
                    raise IllSorted(f"symbol {sorted(clash)[0]} declared twice")

    @classmethod
    def from_context(cls, ctx: TypingContext) -> "Signature":
        """First-order part of a typing context (logical constants excluded)."""
        preds, funcs, consts = {}, {}, {}
        for name, ty in ctx.constants.items():
            if _is_logical(name, ctx) or not _first_order(ty):
                continue
            args, result = split_arrows(ty)
            arg_sorts = tuple(a.name for a in args)
            if isinstance(result, Prop):
                preds[name] = arg_sorts
            elif args:
                funcs[name] = (arg_sorts, result.name)
            else:
                consts[name] = result.name
        return cls(tuple(ctx.sorts), preds, funcs, consts)

    @classmethod
    def infer(cls, formulas: Iterable, extra_sorts: Iterable[str] = ()) -> "Signature":
        """Smallest signature that makes ``formulas`` well-sorted."""
        sorts: list[str] = list(extra_sorts)
        preds: dict[str, tuple[str, ...]] = {}
        funcs: dict[str, tuple[tuple[str, ...], str]] = {}
        consts: dict[str, str] = {}

        def note_sort(s):
            if s not in sorts:
                sorts.append(s)

        def walk(o):
            if isinstance(o, (ForAll, Exists, HilbertTerm)):
                note_sort(o.sort)
                walk(o.body)
            elif isinstance(o, LVar):
                note_sort(o.sort)
            elif isinstance(o, LConst):
                note_sort(o.sort)
                consts.setdefault(o.name, o.sort)
            elif isinstance(o, FunApp):
                note_sort(o.sort)
                funcs.setdefault(o.fn, (tuple(a.sort for a in o.args), o.sort))
                for a in o.args:
                    walk(a)
            elif isinstance(o, Pred):
                preds.setdefault(o.name, tuple(a.sort for a in o.args))
                for a in o.args:
                    walk(a)
            elif isinstance(o, Equal):
                walk(o.left)
                walk(o.right)
            elif isinstance(o, Not):
                walk(o.body)
            elif isinstance(o, Binary):
                walk(o.left)
                walk(o.right)

        for f in formulas:
            walk(f)
        return cls(tuple(sorts), preds, funcs, consts)

    def constant_types(self) -> dict[str, SemType]:
        table: dict[str, SemType] = {}
        for name, args in self.preds.items():
            table[name] = arrows(*[BaseSort(s) for s in args], T)
        for name, (args, res) in self.funcs.items():
            table[name] = arrows(*[BaseSort(s) for s in args], BaseSort(res))
        for name, s in self.consts.items():
            table[name] = BaseSort(s)
        return table

    def to_context(self) -> TypingContext:
        return TypingContext.standard(self.sorts, self.constant_types())


def _is_logical(name: str, ctx: TypingContext) -> bool:
    if name in ("not", "and", "or", "implies") or hilbert_name(name) or name in ctx.generalized:
        return True
    for prefix in ("exists_", "forall_", "eq_"):
        if name.startswith(prefix) and name[len(prefix):] in ctx.sorts:
            return True
    return False


def _first_order(ty: SemType) -> bool:
    args, result = split_arrows(ty)
    return all(isinstance(a, BaseSort) for a in args) and isinstance(result, (BaseSort, Prop))


def check_formula(sig: Signature, f) -> None:
    """Raise ``IllSorted`` unless every symbol is declared and used at its sorts."""

    def check_term(t):
        if isinstance(t, LVar):
            if sig.sorts and t.sort not in sig.sorts:
                raise IllSorted(f"variable {t.name} has undeclared sort {t.sort}")
        elif isinstance(t, LConst):
            if sig.consts.get(t.name) != t.sort:
                raise IllSorted(f"constant {t.name} : {t.sort} is not declared")
        elif isinstance(t, FunApp):
            decl = sig.funcs.get(t.fn)
            if decl is None:
                raise IllSorted(f"function {t.fn} is not declared")
            args, res = decl
            got = tuple(a.sort for a in t.args)
            if got != args or res != t.sort:
                raise IllSorted(f"{t.fn} expects {args} -> {res}, used at {got} -> {t.sort}")
            for a in t.args:
                check_term(a)
        elif isinstance(t, HilbertTerm):
            if sig.sorts and t.sort not in sig.sorts:
                raise IllSorted(f"undeclared sort {t.sort}")
            check(t.body)

    def check(g):
        if isinstance(g, Pred):
            decl = sig.preds.get(g.name)
            if decl is None:
                raise IllSorted(f"predicate {g.name} is not declared")
            got = tuple(a.sort for a in g.args)
            if got != decl:
                raise IllSorted(f"{g.name} expects {decl}, used at {got}")
            for a in g.args:
                check_term(a)
        elif isinstance(g, Equal):
            check_term(g.left)
            check_term(g.right)
            if g.left.sort != g.right.sort:
                raise IllSorted(f"equality between sorts {g.left.sort} and {g.right.sort}")
        elif isinstance(g, Not):
            check(g.body)
        elif isinstance(g, Binary):
            check(g.left)
            check(g.right)
        elif isinstance(g, Quantifier):
            if sig.sorts and g.sort not in sig.sorts:
                raise IllSorted(f"undeclared sort {g.sort}")
            check(g.body)
        else:
            raise IllSorted(f"not a formula: {g!r}")

    check(f)


# ---------------------------------------------------------------------------
# lambda terms <-> formulas

_BINARY_CONSTS = {"and": And, "or": Or, "implies": Implies}


def _sort_name(ty: SemType, what: str) -> str:
    if not isinstance(ty, BaseSort):
        raise NotFirstOrder(f"{what} has non-individual type")
    return ty.name


def _quantifier_head(name: str, ctx: TypingContext) -> tuple[type, str] | None:
    for prefix, cls in (("exists_", Exists), ("forall_", ForAll)):
        if name.startswith(prefix) and name[len(prefix):] in ctx.sorts:
            return cls, name[len(prefix):]
    return None


def readback(ctx: TypingContext, term: SemTerm):
    """The formula encoded by a closed normal term of type ``t``."""
    ty = type_of(ctx, term)
    if not isinstance(ty, Prop):
        raise NotProp("term does not have type t")
    if not is_normal(term):
        raise NotNormal("term is not in normal form")
    if term_free_vars(term):
        raise NotClosed(f"free variables {sorted(term_free_vars(term))}")
    return _rb_formula(ctx, term)


def readback_term(ctx: TypingContext, term: SemTerm) -> LogicTerm:
    """The logic term encoded by a closed normal term of a base sort."""
    ty = type_of(ctx, term)
    if not isinstance(ty, BaseSort):
        raise LogicError(f"term has type {show_type(ty)}, not a base sort")
    if not is_normal(term):
        raise NotNormal("term is not in normal form")
    if term_free_vars(term):
        raise NotClosed(f"free variables {sorted(term_free_vars(term))}")
    return _rb_term(ctx, term)


def _rb_formula(ctx: TypingContext, term: SemTerm):
    head, args = spine(term)
    if not isinstance(head, Const):
        raise NotFirstOrder("formula headed by a variable or a binder")
    name = head.name
    if name == "not" and len(args) == 1:
        return Not(_rb_formula(ctx, args[0]))
    if name in _BINARY_CONSTS and len(args) == 2:
        return _BINARY_CONSTS[name](_rb_formula(ctx, args[0]), _rb_formula(ctx, args[1]))
    quant = _quantifier_head(name, ctx)
    if quant is not None:
        cls, sort = quant
        if len(args) != 1 or not isinstance(args[0], Lam):
            raise UnknownConstantShape(f"{name} must be applied to a lambda abstraction")
        lam = args[0]
        return cls(lam.var, sort, _rb_formula(ctx, lam.body))
    if name.startswith("eq_") and name[3:] in ctx.sorts and len(args) == 2:
        return Equal(_rb_term(ctx, args[0]), _rb_term(ctx, args[1]))
    arg_types, result = split_arrows(head.type)
    if any(isinstance(a, Arrow) and isinstance(split_arrows(a)[1], Prop) for a in arg_types):
        raise VagueQuantifier(f"{name} quantifies over properties; no first-order reading")
    if not _first_order(head.type) or len(args) != len(arg_types):
        raise NotFirstOrder(f"{name} is not a first-order predicate")
    return Pred(name, tuple(_rb_term(ctx, a) for a in args))


def _rb_term(ctx: TypingContext, term: SemTerm) -> LogicTerm:
    head, args = spine(term)
    if isinstance(head, Var) and not args:
        return LVar(head.name, _sort_name(head.type, head.name))
    if isinstance(head, Const):
        arg_types, result = split_arrows(head.type)
        if not _first_order(head.type) or len(args) != len(arg_types):
            raise NotFirstOrder(f"{head.name} is not a first-order function")
        sort = _sort_name(result, head.name)
        if not args:
            return LConst(head.name, sort)
        return FunApp(head.name, tuple(_rb_term(ctx, a) for a in args), sort)
    if isinstance(head, TyApp) and isinstance(head.fun, Const) and len(args) == 1:
        op_name = head.fun.name
        sort = _sort_name(head.type_arg, op_name)
        prop = args[0]
        if isinstance(prop, Lam):
            var, body = prop.var, _rb_formula(ctx, prop.body)
        else:
            var = fresh("x", term_names(prop))
            body = _rb_formula(ctx, App(prop, Var(var, BaseSort(sort))))
        if op_name in ctx.generalized:
            return GenTerm(var, sort, body, None, op_name)
        parsed = hilbert_name(op_name)
        if parsed is not None:
            op, index = parsed
            return HILBERT_CLASSES[op](var, sort, body, index)
    raise UnknownConstantShape("term is not built from first-order symbols")


def formula_to_term(sig: Signature | None, f) -> SemTerm:
    """Encode a formula as a closed normal lambda term of type ``t``."""
    if sig is not None:
        check_formula(sig, f)
    return _ft(f)


def _ft(f) -> SemTerm:
    if isinstance(f, Pred):
        ty = arrows(*[BaseSort(a.sort) for a in f.args], T)
        return apply(Const(f.name, ty), *[_tt(a) for a in f.args])
    if isinstance(f, Equal):
        s = f.left.sort
        if f.right.sort != s:
            raise IllSorted(f"equality between sorts {s} and {f.right.sort}")
        return apply(Const(f"eq_{s}", arrows(BaseSort(s), BaseSort(s), T)), _tt(f.left), _tt(f.right))
    if isinstance(f, Not):
        return App(Const("not", Arrow(T, T)), _ft(f.body))
    if isinstance(f, Binary):
        name = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        return apply(Const(name, arrows(T, T, T)), _ft(f.left), _ft(f.right))
    if isinstance(f, Quantifier):
        q = "forall" if isinstance(f, ForAll) else "exists"
        s = BaseSort(f.sort)
        return App(Const(f"{q}_{f.sort}", Arrow(Arrow(s, T), T)), Lam(f.var, s, _ft(f.body)))
    raise TypeError(f"not a formula: {f!r}")


def _tt(t: LogicTerm) -> SemTerm:
    if isinstance(t, LVar):
        return Var(t.name, BaseSort(t.sort))
    if isinstance(t, LConst):
        return Const(t.name, BaseSort(t.sort))
    if isinstance(t, FunApp):
        ty = arrows(*[BaseSort(a.sort) for a in t.args], BaseSort(t.sort))
        return apply(Const(t.fn, ty), *[_tt(a) for a in t.args])
    if isinstance(t, HilbertTerm):
        s = BaseSort(t.sort)
        name = t.name if isinstance(t, GenTerm) else t.operator
        return App(TyApp(Const(name, hilbert_type()), s), Lam(t.var, s, _ft(t.body)))
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# relativization


def _check_guard(f, guard: str, sig: Signature | None) -> None:
    if sig is not None and guard in sig.preds and len(sig.preds[guard]) != 1:
        raise GuardArityMismatch(f"guard {guard} has arity {len(sig.preds[guard])}")

    def walk(g):
        if isinstance(g, Pred):
            if g.name == guard and len(g.args) != 1:
                raise GuardArityMismatch(f"guard {guard} used with {len(g.args)} arguments")
        elif isinstance(g, Not) or isinstance(g, Quantifier):
            walk(g.body)
        elif isinstance(g, Binary):
            walk(g.left)
            walk(g.right)

    walk(f)


def relativize(f, guard: str, parent_sort: str | None = None, sig: Signature | None = None):
    """Rewrite quantifiers over the subdomain sort ``guard`` as guarded quantifiers.

    ``forall x:M. P(x)`` becomes ``forall x:S. (M(x) -> P(x))`` and
    ``exists x:M. P(x)`` becomes ``exists x:S. (M(x) /\\ P(x))`` where ``S``
    is the parent sort (the argument sort of the guard predicate).
    """
    _check_guard(f, guard, sig)
    if parent_sort is None:
        parent_sort = sig.preds[guard][0] if sig is not None and guard in sig.preds else DEFAULT_SORT
    return _relativize(f, guard, parent_sort)


def _relativize(f, guard, parent):
    if isinstance(f, (Pred, Equal)):
        return f
    if isinstance(f, Not):
        return Not(_relativize(f.body, guard, parent))
    if isinstance(f, Binary):
        return type(f)(_relativize(f.left, guard, parent), _relativize(f.right, guard, parent))
    if isinstance(f, Quantifier):
        body = _relativize(f.body, guard, parent)
        if f.sort != guard:
            return type(f)(f.var, f.sort, body)
        body = resort_var(body, f.var, parent)
        test = Pred(guard, (LVar(f.var, parent),))
        if isinstance(f, ForAll):
            return ForAll(f.var, parent, Implies(test, body))
        return Exists(f.var, parent, And(test, body))
    raise TypeError(f"not a formula: {f!r}")


def unrelativize(f, guard: str, sig: Signature | None = None):
    """Partial inverse of ``relativize``: only the exact guard patterns are folded."""
    _check_guard(f, guard, sig)
    return _unrelativize(f, guard)


def _guard_match(f, guard) -> bool:
    return (
        isinstance(f.body, Implies if isinstance(f, ForAll) else And)
        and f.body.left == Pred(guard, (LVar(f.var, f.sort),))
    )


def _unrelativize(f, guard):
    if isinstance(f, (Pred, Equal)):
        return f
    if isinstance(f, Not):
        return Not(_unrelativize(f.body, guard))
    if isinstance(f, Binary):
        return type(f)(_unrelativize(f.left, guard), _unrelativize(f.right, guard))
    if isinstance(f, Quantifier):
        if _guard_match(f, guard):
            body = resort_var(_unrelativize(f.body.right, guard), f.var, guard)
            return type(f)(f.var, guard, body)
        return type(f)(f.var, f.sort, _unrelativize(f.body, guard))
    raise TypeError(f"not a formula: {f!r}")
