"""Second-order typed lambda calculus over many base sorts.

Types are base sorts, the proposition type ``t``, type variables, arrows and
Pi-quantified types. Terms are Church-style: every binder carries its type and
every variable occurrence carries the type of its binder, so type checking is
a single syntax-directed pass.

Text syntax::

    types   e    t    a -> b    Pi a. a -> a
    terms   \\x:e. x    /\\a. \\x:a. x    f {e}    f x y
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import HilbertError
from .syntax import TokenStream

# ---------------------------------------------------------------------------
# errors


class TypingError(HilbertError):
    pass


class UnboundName(TypingError):
    pass


class UnknownSort(TypingError):
    pass


class ApplicationMismatch(TypingError):
    def __init__(self, expected: "SemType", actual: "SemType", where: str = ""):
        self.expected = expected
        self.actual = actual
        msg = f"expected {show_type(expected)}, got {show_type(actual)}"
        super().__init__(f"{msg} in {where}" if where else msg)


class NotAFunction(TypingError):
    pass


class EscapingTypeVar(TypingError):
    pass


class TypeMismatch(TypingError):
    pass


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class BaseSort:
    name: str


@dataclass(frozen=True)
class Prop:
    pass


@dataclass(frozen=True)
class TypeVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    domain: "SemType"
    codomain: "SemType"


@dataclass(frozen=True)
class Pi:
    var: str
    body: "SemType"


SemType = Union[BaseSort, Prop, TypeVar, Arrow, Pi]

T = Prop()


def arrows(*types: SemType) -> SemType:
    """Right-nested arrow: ``arrows(a, b, c)`` is ``a -> (b -> c)``."""
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


def split_arrows(ty: SemType) -> tuple[list[SemType], SemType]:
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.domain)
        ty = ty.codomain
    return args, ty


def free_type_vars(ty: SemType) -> frozenset[str]:
    if isinstance(ty, TypeVar):
        return frozenset([ty.name])
    if isinstance(ty, Arrow):
        return free_type_vars(ty.domain) | free_type_vars(ty.codomain)
    if isinstance(ty, Pi):
        return free_type_vars(ty.body) - {ty.var}
    return frozenset()


def type_names(ty: SemType) -> set[str]:
    """All type-variable names occurring in ``ty``, bound or free."""
    if isinstance(ty, TypeVar):
        return {ty.name}
    if isinstance(ty, Arrow):
        return type_names(ty.domain) | type_names(ty.codomain)
    if isinstance(ty, Pi):
        return type_names(ty.body) | {ty.var}
    return set()


def fresh(name: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    candidate = name
    while candidate in avoid:
        candidate += "'"
    return candidate


def substitute_type(ty: SemType, var: str, replacement: SemType) -> SemType:
    """Capture-avoiding ``ty[replacement/var]``."""
    if isinstance(ty, TypeVar):
        return replacement if ty.name == var else ty
    if isinstance(ty, Arrow):
        return Arrow(
            substitute_type(ty.domain, var, replacement),
            substitute_type(ty.codomain, var, replacement),
        )
    if isinstance(ty, Pi):
        if ty.var == var or var not in free_type_vars(ty.body):
            return ty
        bound, body = ty.var, ty.body
        repl_free = free_type_vars(replacement)
        if bound in repl_free:
            new = fresh(bound, repl_free | type_names(body) | {var})
            body = substitute_type(body, bound, TypeVar(new))
            bound = new
        return Pi(bound, substitute_type(body, var, replacement))
    return ty


def _type_key(ty: SemType, env: tuple[str, ...]):
    if isinstance(ty, BaseSort):
        return ("s", ty.name)
    if isinstance(ty, Prop):
        return ("t",)
    if isinstance(ty, TypeVar):
        for depth, name in enumerate(reversed(env)):
            if name == ty.name:
                return ("b", depth)
        return ("v", ty.name)
    if isinstance(ty, Arrow):
        return ("->", _type_key(ty.domain, env), _type_key(ty.codomain, env))
    if isinstance(ty, Pi):
        return ("pi", _type_key(ty.body, env + (ty.var,)))
    raise TypeError(f"not a type: {ty!r}")


def type_eq(a: SemType, b: SemType) -> bool:
    """Equality up to renaming of Pi binders."""
    return _type_key(a, ()) == _type_key(b, ())


def base_sorts_of(ty: SemType) -> set[str]:
    if isinstance(ty, BaseSort):
        return {ty.name}
    if isinstance(ty, Arrow):
        return base_sorts_of(ty.domain) | base_sorts_of(ty.codomain)
    if isinstance(ty, Pi):
        return base_sorts_of(ty.body)
    return set()


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    type: SemType


@dataclass(frozen=True)
class Const:
    name: str
    type: SemType


@dataclass(frozen=True)
class App:
    fun: "SemTerm"
    arg: "SemTerm"


@dataclass(frozen=True)
class Lam:
    var: str
    var_type: SemType
    body: "SemTerm"


@dataclass(frozen=True)
class TyApp:
    fun: "SemTerm"
    type_arg: SemType


@dataclass(frozen=True)
class TyLam:
    var: str
    body: "SemTerm"


SemTerm = Union[Var, Const, App, Lam, TyApp, TyLam]


def apply(fun: SemTerm, *args: SemTerm) -> SemTerm:
    for arg in args:
        fun = App(fun, arg)
    return fun


def spine(term: SemTerm) -> tuple[SemTerm, list[SemTerm]]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])`` (term applications only)."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


def free_vars(term: SemTerm) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, Const):
        return frozenset()
    if isinstance(term, App):
        return free_vars(term.fun) | free_vars(term.arg)
    if isinstance(term, Lam):
        return free_vars(term.body) - {term.var}
    if isinstance(term, (TyApp, TyLam)):
        return free_vars(term.fun if isinstance(term, TyApp) else term.body)
    raise TypeError(f"not a term: {term!r}")


def free_var_types(term: SemTerm) -> dict[str, SemType]:
    """Free term variables with the type annotated on their occurrences."""
    out: dict[str, SemType] = {}

    def walk(t: SemTerm, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound:
                out.setdefault(t.name, t.type)
        elif isinstance(t, App):
            walk(t.fun, bound)
            walk(t.arg, bound)
        elif isinstance(t, Lam):
            walk(t.body, bound | {t.var})
        elif isinstance(t, TyApp):
            walk(t.fun, bound)
        elif isinstance(t, TyLam):
            walk(t.body, bound)

    walk(term, frozenset())
    return out


def term_names(term: SemTerm) -> set[str]:
    """Every term-variable name occurring in ``term``."""
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, App):
        return term_names(term.fun) | term_names(term.arg)
    if isinstance(term, Lam):
        return term_names(term.body) | {term.var}
    if isinstance(term, TyApp):
        return term_names(term.fun)
    if isinstance(term, TyLam):
        return term_names(term.body)
    return set()


def term_free_type_vars(term: SemTerm) -> frozenset[str]:
    if isinstance(term, (Var, Const)):
        return free_type_vars(term.type)
    if isinstance(term, App):
        return term_free_type_vars(term.fun) | term_free_type_vars(term.arg)
    if isinstance(term, Lam):
        return free_type_vars(term.var_type) | term_free_type_vars(term.body)
    if isinstance(term, TyApp):
        return term_free_type_vars(term.fun) | free_type_vars(term.type_arg)
    if isinstance(term, TyLam):
        return term_free_type_vars(term.body) - {term.var}
    raise TypeError(f"not a term: {term!r}")


def term_type_names(term: SemTerm) -> set[str]:
    if isinstance(term, (Var, Const)):
        return type_names(term.type)
    if isinstance(term, App):
        return term_type_names(term.fun) | term_type_names(term.arg)
    if isinstance(term, Lam):
        return type_names(term.var_type) | term_type_names(term.body)
    if isinstance(term, TyApp):
        return term_type_names(term.fun) | type_names(term.type_arg)
    if isinstance(term, TyLam):
        return term_type_names(term.body) | {term.var}
    return set()


def substitute_type_in_term(term: SemTerm, var: str, replacement: SemType) -> SemTerm:
    """Capture-avoiding ``term[replacement/var]`` at the type level."""
    if var not in term_free_type_vars(term):
        return term
    sub = lambda ty: substitute_type(ty, var, replacement)  # noqa: E731
    if isinstance(term, Var):
        return Var(term.name, sub(term.type))
    if isinstance(term, Const):
        return Const(term.name, sub(term.type))
    if isinstance(term, App):
        return App(
            substitute_type_in_term(term.fun, var, replacement),
            substitute_type_in_term(term.arg, var, replacement),
        )
    if isinstance(term, Lam):
        return Lam(term.var, sub(term.var_type), substitute_type_in_term(term.body, var, replacement))
    if isinstance(term, TyApp):
        return TyApp(substitute_type_in_term(term.fun, var, replacement), sub(term.type_arg))
    if isinstance(term, TyLam):
        bound, body = term.var, term.body
        repl_free = free_type_vars(replacement)
        if bound in repl_free:
            new = fresh(bound, repl_free | term_type_names(body) | {var})
            body = substitute_type_in_term(body, bound, TypeVar(new))
            bound = new
        return TyLam(bound, substitute_type_in_term(body, var, replacement))
    raise TypeError(f"not a term: {term!r}")


def substitute(obj, var: str, replacement):
    """Type-level substitution on either a type or a term."""
    if isinstance(obj, (BaseSort, Prop, TypeVar, Arrow, Pi)):
        return substitute_type(obj, var, replacement)
    return substitute_type_in_term(obj, var, replacement)


def _subst(term: SemTerm, var: str, repl: SemTerm, repl_fv: frozenset[str], repl_ftv: frozenset[str]) -> SemTerm:
    if isinstance(term, Var):
        return repl if term.name == var else term
    if isinstance(term, Const):
        return term
    if isinstance(term, App):
        return App(_subst(term.fun, var, repl, repl_fv, repl_ftv), _subst(term.arg, var, repl, repl_fv, repl_ftv))
    if isinstance(term, Lam):
        if term.var == var or var not in free_vars(term.body):
            return term
        bound, body = term.var, term.body
        if bound in repl_fv:
            new = fresh(bound, repl_fv | term_names(body) | {var})
            body = _subst(body, bound, Var(new, term.var_type), frozenset([new]), frozenset())
            bound = new
        return Lam(bound, term.var_type, _subst(body, var, repl, repl_fv, repl_ftv))
    if isinstance(term, TyApp):
        return TyApp(_subst(term.fun, var, repl, repl_fv, repl_ftv), term.type_arg)
    if isinstance(term, TyLam):
        if var not in free_vars(term.body):
            return term
        bound, body = term.var, term.body
        if bound in repl_ftv:
            new = fresh(bound, repl_ftv | term_type_names(body))
            body = substitute_type_in_term(body, bound, TypeVar(new))
            bound = new
        return TyLam(bound, _subst(body, var, repl, repl_fv, repl_ftv))
    raise TypeError(f"not a term: {term!r}")


def substitute_term(term: SemTerm, var: str, replacement: SemTerm, ctx: "TypingContext | None" = None) -> SemTerm:
    """Capture-avoiding ``term[replacement/var]``.

    With a context, the replacement's type is checked against the type
    annotated on the free occurrences of ``var``.
    """
    if ctx is not None:
        declared = free_var_types(term).get(var)
        if declared is not None:
            actual = type_of(ctx, replacement)
            if not type_eq(declared, actual):
                raise TypeMismatch(
                    f"cannot substitute {show_type(actual)} for {var} : {show_type(declared)}"
                )
    return _subst(term, var, replacement, free_vars(replacement), term_free_type_vars(replacement))


def _term_key(term: SemTerm, env: tuple[str, ...], tenv: tuple[str, ...]):
    if isinstance(term, Var):
        for depth, name in enumerate(reversed(env)):
            if name == term.name:
                return ("b", depth, _type_key(term.type, tenv))
        return ("v", term.name, _type_key(term.type, tenv))
    if isinstance(term, Const):
        return ("c", term.name, _type_key(term.type, tenv))
    if isinstance(term, App):
        return ("@", _term_key(term.fun, env, tenv), _term_key(term.arg, env, tenv))
    if isinstance(term, Lam):
        return ("lam", _type_key(term.var_type, tenv), _term_key(term.body, env + (term.var,), tenv))
    if isinstance(term, TyApp):
        return ("@t", _term_key(term.fun, env, tenv), _type_key(term.type_arg, tenv))
    if isinstance(term, TyLam):
        return ("tlam", _term_key(term.body, env, tenv + (term.var,)))
    raise TypeError(f"not a term: {term!r}")


def alpha_eq(a, b) -> bool:
    """Equality up to consistent renaming of bound term and type variables."""
    a_is_type = isinstance(a, (BaseSort, Prop, TypeVar, Arrow, Pi))
    b_is_type = isinstance(b, (BaseSort, Prop, TypeVar, Arrow, Pi))
    if a_is_type != b_is_type:
        return False
    if a_is_type:
        return type_eq(a, b)
    return _term_key(a, (), ()) == _term_key(b, (), ())


def alpha_key(term: SemTerm):
    """Hashable key that is equal for exactly the alpha-equivalent terms."""
    return _term_key(term, (), ())


# ---------------------------------------------------------------------------
# typing context

HILBERT_OPERATORS = ("eps", "tau", "iota")
_INDEXED_HILBERT = re.compile(r"^(eps|tau|iota)_(\d+)$")
CONNECTIVES = ("not", "and", "or", "implies")
QUANTIFIERS = ("exists", "forall")


def hilbert_type() -> SemType:
    """``Pi a. (a -> t) -> a``, the type of every Hilbert operator."""
    return Pi("a", Arrow(Arrow(TypeVar("a"), T), TypeVar("a")))


def hilbert_name(name: str) -> tuple[str, int | None] | None:
    """Split ``eps`` / ``eps_2`` into ``("eps", None)`` / ``("eps", 2)``."""
    if name in HILBERT_OPERATORS:
        return name, None
    m = _INDEXED_HILBERT.match(name)
    if m:
        return m.group(1), int(m.group(2))
    return None


def logical_constants(sorts: Iterable[str]) -> dict[str, SemType]:
    """Connectives, sort-indexed quantifiers and equality, and the Hilbert operators."""
    table: dict[str, SemType] = {
        "not": Arrow(T, T),
        "and": arrows(T, T, T),
        "or": arrows(T, T, T),
        "implies": arrows(T, T, T),
    }
    for s in sorts:
        pred = Arrow(BaseSort(s), T)
        table[f"exists_{s}"] = Arrow(pred, T)
        table[f"forall_{s}"] = Arrow(pred, T)
        table[f"eq_{s}"] = arrows(BaseSort(s), BaseSort(s), T)
    for op in HILBERT_OPERATORS:
        table[op] = hilbert_type()
    return table


@dataclass(frozen=True)
class TypingContext:
    """Declared sorts, the constant signature and free term-variable bindings.

    ``generalized`` names polymorphic constants that behave like Hilbert
    operators syntactically but carry no semantics ("most", "few", ...).
    """

    sorts: tuple[str, ...] = ()
    constants: Mapping[str, SemType] = field(default_factory=dict)
    variables: Mapping[str, SemType] = field(default_factory=dict)
    generalized: frozenset[str] = frozenset()

    @classmethod
    def standard(cls, sorts: Iterable[str], constants: Mapping[str, SemType] | None = None,
                 generalized: Iterable[str] = ()) -> "TypingContext":
        sorts = tuple(sorts)
        table = logical_constants(sorts)
        for name, ty in (constants or {}).items():
            if name in table and not type_eq(table[name], ty):
                raise TypingError(f"constant {name} is already declared")
            table[name] = ty
        for name in generalized:
            table[name] = hilbert_type()
        ctx = cls(sorts, table, {}, frozenset(generalized))
        for ty in table.values():
            ctx.check_type(ty)
        return ctx

    def constant_type(self, name: str) -> SemType:
        if name in self.constants:
            return self.constants[name]
        if hilbert_name(name) is not None:
            return hilbert_type()
        raise UnboundName(f"unknown constant {name}")

    def has_constant(self, name: str) -> bool:
        return name in self.constants or hilbert_name(name) is not None

    def with_constants(self, extra: Mapping[str, SemType]) -> "TypingContext":
        table = dict(self.constants)
        for name, ty in extra.items():
            if name in table and not type_eq(table[name], ty):
                raise TypingError(f"constant {name} is already declared")
            self.check_type(ty)
            table[name] = ty
        return TypingContext(self.sorts, table, self.variables, self.generalized)

    def with_variables(self, extra: Mapping[str, SemType]) -> "TypingContext":
        return TypingContext(self.sorts, self.constants, {**self.variables, **extra}, self.generalized)

    def check_type(self, ty: SemType) -> None:
        missing = base_sorts_of(ty) - set(self.sorts)
        if missing:
            raise UnknownSort(f"undeclared sort {sorted(missing)[0]}")


def type_of(ctx: TypingContext, term: SemTerm) -> SemType:
    """The unique type of ``term`` or a ``TypingError``."""
    return _type_of(ctx, term, {})


def _type_of(ctx: TypingContext, term: SemTerm, env: dict[str, SemType]) -> SemType:
    if isinstance(term, Var):
        if term.name in env:
            declared = env[term.name]
        elif term.name in ctx.variables:
            declared = ctx.variables[term.name]
        else:
            raise UnboundName(f"unbound variable {term.name}")
        if not type_eq(declared, term.type):
            raise TypeMismatch(
                f"occurrence {term.name} : {show_type(term.type)} disagrees with binder type {show_type(declared)}"
            )
        return declared
    if isinstance(term, Const):
        declared = ctx.constant_type(term.name)
        if not type_eq(declared, term.type):
            raise TypeMismatch(
                f"constant {term.name} : {show_type(term.type)} disagrees with signature {show_type(declared)}"
            )
        return declared
    if isinstance(term, App):
        fun_ty = _type_of(ctx, term.fun, env)
        arg_ty = _type_of(ctx, term.arg, env)
        if not isinstance(fun_ty, Arrow):
            raise NotAFunction(f"{show_term(term.fun)} : {show_type(fun_ty)} is not a function")
        if not type_eq(fun_ty.domain, arg_ty):
            raise ApplicationMismatch(fun_ty.domain, arg_ty, show_term(term))
        return fun_ty.codomain
    if isinstance(term, Lam):
        ctx.check_type(term.var_type)
        inner = dict(env)
        inner[term.var] = term.var_type
        return Arrow(term.var_type, _type_of(ctx, term.body, inner))
    if isinstance(term, TyApp):
        fun_ty = _type_of(ctx, term.fun, env)
        ctx.check_type(term.type_arg)
        if not isinstance(fun_ty, Pi):
            raise NotAFunction(f"{show_term(term.fun)} : {show_type(fun_ty)} is not polymorphic")
        return substitute_type(fun_ty.body, fun_ty.var, term.type_arg)
    if isinstance(term, TyLam):
        for name in free_vars(term.body):
            ty = env.get(name, ctx.variables.get(name))
            if ty is not None and term.var in free_type_vars(ty):
                raise EscapingTypeVar(
                    f"type variable {term.var} occurs free in the type of free variable {name}"
                )
        return Pi(term.var, _type_of(ctx, term.body, env))
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# printing


def show_type(ty: SemType) -> str:
    if isinstance(ty, BaseSort):
        return ty.name
    if isinstance(ty, Prop):
        return "t"
    if isinstance(ty, TypeVar):
        return ty.name
    if isinstance(ty, Arrow):
        dom = show_type(ty.domain)
        if isinstance(ty.domain, (Arrow, Pi)):
            dom = f"({dom})"
        return f"{dom} -> {show_type(ty.codomain)}"
    if isinstance(ty, Pi):
        return f"Pi {ty.var}. {show_type(ty.body)}"
    raise TypeError(f"not a type: {ty!r}")


def _atom_type(ty: SemType) -> str:
    s = show_type(ty)
    return f"({s})" if isinstance(ty, (Arrow, Pi)) else s


def show_term(term: SemTerm) -> str:
    if isinstance(term, (Var, Const)):
        return term.name
    if isinstance(term, Lam):
        return f"\\{term.var}:{show_type(term.var_type)}. {show_term(term.body)}"
    if isinstance(term, TyLam):
        return f"/\\{term.var}. {show_term(term.body)}"
    if isinstance(term, App):
        fun = show_term(term.fun)
        if isinstance(term.fun, (Lam, TyLam)):
            fun = f"({fun})"
        arg = show_term(term.arg)
        if isinstance(term.arg, (App, TyApp, Lam, TyLam)):
            arg = f"({arg})"
        return f"{fun} {arg}"
    if isinstance(term, TyApp):
        fun = show_term(term.fun)
        if isinstance(term.fun, (Lam, TyLam)):
            fun = f"({fun})"
        return f"{fun} {{{show_type(term.type_arg)}}}"
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# parsing


def _parse_type(ts: TokenStream, sorts: frozenset[str] | None, tvars: frozenset[str]) -> SemType:
    left = _parse_type_atom(ts, sorts, tvars)
    if ts.accept("->"):
        return Arrow(left, _parse_type(ts, sorts, tvars))
    return left


def _parse_type_atom(ts: TokenStream, sorts: frozenset[str] | None, tvars: frozenset[str]) -> SemType:
    if ts.accept("("):
        ty = _parse_type(ts, sorts, tvars)
        ts.expect(")")
        return ty
    if ts.at("Pi"):
        ts.next()
        var = ts.ident()
        ts.expect(".")
        return Pi(var, _parse_type(ts, sorts, tvars | {var}))
    pos = ts.peek.pos
    name = ts.ident()
    if name in tvars:
        return TypeVar(name)
    if name == "t":
        return T
    if sorts is None or name in sorts:
        return BaseSort(name)
    raise UnknownSort(f"column {pos + 1}: undeclared sort {name}")


def parse_type(text: str, sorts: Iterable[str] | None = None, type_vars: Iterable[str] = ()) -> SemType:
    """Read a type. With ``sorts`` given, other identifiers must be bound type variables."""
    ts = TokenStream(text)
    ty = _parse_type(ts, None if sorts is None else frozenset(sorts), frozenset(type_vars))
    ts.expect_eof()
    return ty


_TERM_STOP = {")", "}", ".", ":", ",", "=", ";", "->", "]"}


def _parse_term(ts: TokenStream, ctx: TypingContext, env: dict[str, SemType], tvars: frozenset[str]) -> SemTerm:
    if ts.at("\\"):
        ts.next()
        var = ts.ident()
        ts.expect(":")
        ty = _parse_type(ts, frozenset(ctx.sorts), tvars)
        ts.expect(".")
        return Lam(var, ty, _parse_term(ts, ctx, {**env, var: ty}, tvars))
    if ts.at("/\\"):
        ts.next()
        var = ts.ident()
        ts.expect(".")
        return TyLam(var, _parse_term(ts, ctx, env, tvars | {var}))
    head = _parse_term_atom(ts, ctx, env, tvars)
    while True:
        tok = ts.peek
        if tok.kind == "eof" or tok.value in _TERM_STOP:
            return head
        if ts.accept("{"):
            ty = _parse_type(ts, frozenset(ctx.sorts), tvars)
            ts.expect("}")
            head = TyApp(head, ty)
        elif tok.value in ("\\", "/\\"):
            head = App(head, _parse_term(ts, ctx, env, tvars))
        else:
            head = App(head, _parse_term_atom(ts, ctx, env, tvars))


def _parse_term_atom(ts: TokenStream, ctx: TypingContext, env: dict[str, SemType], tvars: frozenset[str]) -> SemTerm:
    if ts.accept("("):
        term = _parse_term(ts, ctx, env, tvars)
        ts.expect(")")
        return term
    pos = ts.peek.pos
    name = ts.ident()
    if name in env:
        return Var(name, env[name])
    if name in ctx.variables:
        return Var(name, ctx.variables[name])
    if ctx.has_constant(name):
        return Const(name, ctx.constant_type(name))
    raise UnboundName(f"column {pos + 1}: unknown name {name}")


def parse_term(text: str, ctx: TypingContext) -> SemTerm:
    """Read a term; identifiers not bound by a lambda are looked up in ``ctx``."""
    ts = TokenStream(text)
    term = _parse_term(ts, ctx, {}, frozenset())
    ts.expect_eof()
    return term
