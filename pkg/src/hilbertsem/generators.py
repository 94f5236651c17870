"""Seeded random generators of well-typed terms and formulas.

Every generator takes a ``random.Random`` so a seed reproduces its output
exactly. Terms are well typed by construction and are rich in beta and
type-beta redexes (polymorphic identity, ``twice``, the Hilbert operators).
"""

from __future__ import annotations

import random

from .lam import (
    App,
    Arrow,
    BaseSort,
    Const,
    Lam,
    SemTerm,
    SemType,
    T,
    TyApp,
    TyLam,
    TypeVar,
    TypingContext,
    Var,
    arrows,
    hilbert_type,
)
from .logic import (
    And,
    Equal,
    Exists,
    ForAll,
    FunApp,
    Implies,
    LConst,
    LVar,
    Not,
    Or,
    Pred,
    Signature,
    alpha_key,
    free_vars,
)

E = BaseSort("e")
ANI = BaseSort("ani")

KERNEL_CONSTANTS: dict[str, SemType] = {
    "c": E,
    "d": ANI,
    "p": T,
    "P": Arrow(E, T),
    "Q": Arrow(ANI, T),
    "R": arrows(E, E, T),
    "f": Arrow(E, E),
    "h": Arrow(ANI, E),
}


def kernel_context() -> TypingContext:
    return TypingContext.standard(("e", "ani"), KERNEL_CONSTANTS)


_ARG_TYPES = (E, ANI, T, Arrow(E, T), Arrow(E, E))


def _poly_id() -> SemTerm:
    a = TypeVar("a")
    return TyLam("a", Lam("x", a, Var("x", a)))


def _twice() -> SemTerm:
    a = TypeVar("a")
    f = Var("f", Arrow(a, a))
    return TyLam("a", Lam("f", Arrow(a, a), Lam("x", a, App(f, App(f, Var("x", a))))))


class TermGenerator:
    """Random closed terms of a requested type over :data:`KERNEL_CONSTANTS`."""

    def __init__(self, rng: random.Random, max_depth: int = 4):
        self.rng = rng
        self.max_depth = max_depth
        self.counter = 0

    def fresh(self, base: str = "v") -> str:
        self.counter += 1
        # reuse a few names so capture avoidance is exercised
        return self.rng.choice([base, "x", "y", f"{base}{self.counter}"])

    def term(self, ty: SemType | None = None) -> SemTerm:
        ty = ty or self.rng.choice((T, E, Arrow(E, T)))
        return self.gen(ty, {}, self.max_depth)

    def leaf(self, ty: SemType, env: dict[str, SemType]) -> SemTerm | None:
        options = [Var(n, t) for n, t in env.items() if t == ty]
        options += [Const(n, t) for n, t in KERNEL_CONSTANTS.items() if t == ty]
        return self.rng.choice(options) if options else None

    def gen(self, ty: SemType, env: dict[str, SemType], depth: int) -> SemTerm:
        rng = self.rng
        if depth <= 0:
            leaf = self.leaf(ty, env)
            if leaf is not None:
                return leaf
            if isinstance(ty, Arrow):
                name = self.fresh()
                return Lam(name, ty.domain, self.gen(ty.codomain, {**env, name: ty.domain}, 0))
            return self.minimal(ty, env)

        choice = rng.random()
        if choice < 0.25:
            arg_ty = rng.choice(_ARG_TYPES)
            name = self.fresh()
            body = self.gen(ty, {**env, name: arg_ty}, depth - 1)
            return App(Lam(name, arg_ty, body), self.gen(arg_ty, env, depth - 1))
        if choice < 0.35:
            return App(TyApp(_poly_id(), ty), self.gen(ty, env, depth - 1))
        if choice < 0.42:
            return App(App(TyApp(_twice(), ty), self.gen(Arrow(ty, ty), env, depth - 1)), self.gen(ty, env, depth - 1))
        if isinstance(ty, Arrow):
            name = self.fresh()
            return Lam(name, ty.domain, self.gen(ty.codomain, {**env, name: ty.domain}, depth - 1))
        if ty == T:
            pick = rng.randrange(6)
            if pick == 0:
                return App(Const("not", Arrow(T, T)), self.gen(T, env, depth - 1))
            if pick == 1:
                op = rng.choice(("and", "or", "implies"))
                return App(App(Const(op, arrows(T, T, T)), self.gen(T, env, depth - 1)), self.gen(T, env, depth - 1))
            if pick == 2:
                sort = rng.choice(("e", "ani"))
                q = rng.choice(("exists", "forall"))
                pred = Arrow(BaseSort(sort), T)
                return App(Const(f"{q}_{sort}", Arrow(pred, T)), self.gen(pred, env, depth - 1))
            if pick == 3:
                return App(App(Const("R", arrows(E, E, T)), self.gen(E, env, depth - 1)), self.gen(E, env, depth - 1))
            if pick == 4:
                return App(Const("Q", Arrow(ANI, T)), self.gen(ANI, env, depth - 1))
            return App(Const("P", Arrow(E, T)), self.gen(E, env, depth - 1))
        if isinstance(ty, BaseSort):
            pick = rng.randrange(3)
            if pick == 0:
                return App(TyApp(Const("eps", hilbert_type()), ty), self.gen(Arrow(ty, T), env, depth - 1))
            if pick == 1 and ty == E:
                fn = rng.choice(("f", "h"))
                arg = E if fn == "f" else ANI
                return App(Const(fn, Arrow(arg, E)), self.gen(arg, env, depth - 1))
            leaf = self.leaf(ty, env)
            if leaf is not None:
                return leaf
        return self.gen(ty, env, 0)

    def minimal(self, ty: SemType, env: dict[str, SemType]) -> SemTerm:
        if ty == T:
            return Const("p", T)
        if isinstance(ty, BaseSort):
            return self.leaf(ty, env) or Const({"e": "c", "ani": "d"}[ty.name], ty)
        raise ValueError(f"no closed inhabitant for {ty!r}")


def random_term(seed: int, max_depth: int = 4, ty: SemType | None = None) -> SemTerm:
    return TermGenerator(random.Random(seed), max_depth).term(ty)


# ---------------------------------------------------------------------------
# formulas

FORMULA_SIGNATURE = Signature(
    ("e", "ani"),
    preds={"P": ("e",), "Q": ("ani",), "R": ("e", "e"), "S": ("e", "ani"), "p": ()},
    funcs={"f": (("e",), "e"), "h": (("ani",), "e")},
    consts={"c": "e", "d": "ani"},
)


class FormulaGenerator:
    """Random closed, well-sorted, Hilbert-free formulas over :data:`FORMULA_SIGNATURE`."""

    def __init__(self, rng: random.Random, max_depth: int = 4, sig: Signature = FORMULA_SIGNATURE):
        self.rng = rng
        self.max_depth = max_depth
        self.sig = sig

    def formula(self) -> object:
        return self.gen({}, self.max_depth)

    def term(self, sort: str, env: dict[str, str], depth: int):
        rng = self.rng
        vars_ = [LVar(n, s) for n, s in env.items() if s == sort]
        consts = [LConst(n, s) for n, s in self.sig.consts.items() if s == sort]
        funcs = [(n, a) for n, (a, r) in self.sig.funcs.items() if r == sort]
        if depth > 0 and funcs and rng.random() < 0.25:
            name, args = rng.choice(funcs)
            return FunApp(name, tuple(self.term(s, env, depth - 1) for s in args), sort)
        pool = vars_ * 2 + consts
        return rng.choice(pool)

    def atom(self, env: dict[str, str], depth: int):
        rng = self.rng
        if rng.random() < 0.15:
            sort = rng.choice(self.sig.sorts)
            return Equal(self.term(sort, env, depth), self.term(sort, env, depth))
        name = rng.choice(sorted(self.sig.preds))
        return Pred(name, tuple(self.term(s, env, depth) for s in self.sig.preds[name]))

    def gen(self, env: dict[str, str], depth: int):
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            return self.atom(env, 1)
        pick = rng.randrange(6)
        if pick == 0:
            return Not(self.gen(env, depth - 1))
        if pick in (1, 2):
            cls = rng.choice((And, Or, Implies))
            return cls(self.gen(env, depth - 1), self.gen(env, depth - 1))
        sort = rng.choice(self.sig.sorts)
        var = rng.choice(("x", "y", "z", "x"))
        cls = rng.choice((ForAll, Exists))
        return cls(var, sort, self.gen({**env, var: sort}, depth - 1))


def random_formula(seed: int, max_depth: int = 4) -> object:
    return FormulaGenerator(random.Random(seed), max_depth).formula()


# ---------------------------------------------------------------------------
# one-sorted open formulas for the epsilon axiom

UNARY_SIGNATURE = Signature(("e",), preds={"P": ("e",), "Q": ("e",)})


def random_open_formula(seed: int, var: str = "x", max_depth: int = 3) -> object:
    """A non-atomic formula over unary ``P``, ``Q`` in which ``var`` occurs free."""
    rng = random.Random(seed)
    while True:
        f = _open(rng, {var}, max_depth, top=True)
        if var in free_vars(f):
            return f


def epsilon_axiom_family(count: int = 20, seed: int = 0, var: str = "x") -> list:
    """``count`` pairwise non-alpha-equivalent open formulas, reproducibly."""
    out, keys = [], set()
    s = seed
    while len(out) < count:
        f = random_open_formula(s, var)
        s += 1
        if alpha_key(f) not in keys:
            keys.add(alpha_key(f))
            out.append(f)
    return out


def _open(rng: random.Random, env: set[str], depth: int, top: bool = False):
    if depth <= 0 or (not top and rng.random() < 0.25):
        name = rng.choice(("P", "Q"))
        return Pred(name, (LVar(rng.choice(sorted(env)), "e"),))
    pick = rng.randrange(5)
    if pick == 0:
        return Not(_open(rng, env, depth - 1))
    if pick in (1, 2):
        cls = rng.choice((And, Or, Implies))
        return cls(_open(rng, env, depth - 1), _open(rng, env, depth - 1))
    var = rng.choice(("y", "z"))
    cls = rng.choice((ForAll, Exists))
    return cls(var, "e", _open(rng, env | {var}, depth - 1))
