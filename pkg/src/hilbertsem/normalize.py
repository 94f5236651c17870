"""Beta and type-beta reduction with selectable redex strategies."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import HilbertError
from .lam import (
    App,
    Lam,
    SemTerm,
    TyApp,
    TyLam,
    TypingContext,
    TypingError,
    show_term,
    substitute_term,
    substitute_type_in_term,
    type_of,
)

LEFTMOST_OUTERMOST = "leftmost-outermost"
RIGHTMOST_INNERMOST = "rightmost-innermost"
DEFAULT_FUEL = 100_000


class IllTyped(HilbertError):
    pass


class FuelExhausted(HilbertError):
    """Normalization ran out of fuel; this indicates a kernel bug."""


@dataclass(frozen=True)
class RandomRedex:
    seed: int


Path = tuple[int, ...]


@dataclass(frozen=True)
class Step:
    path: Path
    rule: str  # "beta" or "typeBeta"
    result: SemTerm


@dataclass
class ReductionTrace:
    initial: SemTerm
    steps: list[Step] = field(default_factory=list)
    final: SemTerm | None = None
    count: int = 0

    def render(self) -> list[str]:
        return [
            f"[{n}] {step.rule} @ {render_path(step.path)} : {show_term(step.result)}"
            for n, step in enumerate(self.steps, 1)
        ]


def render_path(path: Path) -> str:
    return ".".join(str(i) for i in path) if path else "root"


def _children(term: SemTerm) -> list[SemTerm]:
    if isinstance(term, App):
        return [term.fun, term.arg]
    if isinstance(term, (Lam, TyLam)):
        return [term.body]
    if isinstance(term, TyApp):
        return [term.fun]
    return []


def _rebuild(term: SemTerm, index: int, child: SemTerm) -> SemTerm:
    if isinstance(term, App):
        return App(child, term.arg) if index == 0 else App(term.fun, child)
    if isinstance(term, Lam):
        return Lam(term.var, term.var_type, child)
    if isinstance(term, TyLam):
        return TyLam(term.var, child)
    if isinstance(term, TyApp):
        return TyApp(child, term.type_arg)
    raise ValueError("no children")


def redex_rule(term: SemTerm) -> str | None:
    if isinstance(term, App) and isinstance(term.fun, Lam):
        return "beta"
    if isinstance(term, TyApp) and isinstance(term.fun, TyLam):
        return "typeBeta"
    return None


def redexes(term: SemTerm) -> list[Path]:
    """Paths of all redexes, in pre-order (outermost, then left to right)."""
    out: list[Path] = []

    def walk(t: SemTerm, path: Path) -> None:
        if redex_rule(t):
            out.append(path)
        for i, child in enumerate(_children(t)):
            walk(child, path + (i,))

    walk(term, ())
    return out


def is_normal(term: SemTerm) -> bool:
    if redex_rule(term):
        return False
    return all(is_normal(child) for child in _children(term))


def contract(term: SemTerm) -> SemTerm:
    if isinstance(term, App) and isinstance(term.fun, Lam):
        return substitute_term(term.fun.body, term.fun.var, term.arg)
    if isinstance(term, TyApp) and isinstance(term.fun, TyLam):
        return substitute_type_in_term(term.fun.body, term.fun.var, term.type_arg)
    raise ValueError(f"not a redex: {show_term(term)}")


def subterm(term: SemTerm, path: Path) -> SemTerm:
    for i in path:
        term = _children(term)[i]
    return term


def replace_at(term: SemTerm, path: Path, new: SemTerm) -> SemTerm:
    if not path:
        return new
    child = _children(term)[path[0]]
    return _rebuild(term, path[0], replace_at(child, path[1:], new))


def _choose(paths: list[Path], strategy, rng: random.Random | None) -> Path:
    if strategy == LEFTMOST_OUTERMOST:
        return paths[0]
    if strategy == RIGHTMOST_INNERMOST:
        innermost = [p for p in paths if not any(q != p and q[: len(p)] == p for q in paths)]
        return innermost[-1]
    if isinstance(strategy, RandomRedex):
        return (rng or random.Random(strategy.seed)).choice(paths)
    raise ValueError(f"unknown strategy {strategy!r}")


def _check(ctx: TypingContext | None, term: SemTerm) -> None:
    if ctx is None:
        return
    try:
        type_of(ctx, term)
    except TypingError as exc:
        raise IllTyped(str(exc)) from exc


def step_once(term: SemTerm, strategy=LEFTMOST_OUTERMOST, ctx: TypingContext | None = None,
              rng: random.Random | None = None) -> Step | None:
    """Contract one redex chosen by ``strategy``; ``None`` when already normal.

    Passing ``ctx`` type-checks the term first. ``rng`` lets a caller keep one
    random stream across many steps of a ``RandomRedex`` strategy.
    """
    _check(ctx, term)
    paths = redexes(term)
    if not paths:
        return None
    path = _choose(paths, strategy, rng)
    redex = subterm(term, path)
    return Step(path, redex_rule(redex), replace_at(term, path, contract(redex)))


def normalize_term(term: SemTerm, fuel: int = DEFAULT_FUEL, strategy=LEFTMOST_OUTERMOST,
                   ctx: TypingContext | None = None, trace: bool = False) -> tuple[SemTerm, ReductionTrace]:
    """Reduce to normal form. Steps are recorded only when ``trace`` is set."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    _check(ctx, term)
    rng = random.Random(strategy.seed) if isinstance(strategy, RandomRedex) else None
    record = ReductionTrace(term)
    current = term
    while True:
        step = step_once(current, strategy, rng=rng)
        if step is None:
            record.final = current
            return current, record
        if record.count >= fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps")
        record.count += 1
        if trace:
            record.steps.append(step)
        current = step.result


def normalize(term: SemTerm) -> SemTerm:
    return normalize_term(term)[0]
