"""Hilbert epsilon/tau/iota operators: construction, duality, translations, rules.

Finite-model semantics lives in :mod:`hilbertsem.models`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HilbertError
from .lam import fresh
from .logic import (
    Binary,
    Epsilon,
    Equal,
    Exists,
    ForAll,
    FunApp,
    HilbertTerm,
    Iota,
    LConst,
    LVar,
    Not,
    Pred,
    Quantifier,
    Tau,
    alpha_eq,
    alpha_key,
    all_names,
    free_var_sorts,
    free_vars,
    has_hilbert,
    substitute,
    with_body,
)


class SortMismatch(HilbertError):
    pass


class NoFOEquivalent(HilbertError):
    """Raised by :func:`epsilon_to_fo_strict`; :func:`epsilon_to_fo` returns ``None`` instead."""


def _mk(cls, var: str, sort: str, body, index=None):
    declared = free_var_sorts(body).get(var)
    if declared is not None and declared != sort:
        raise SortMismatch(f"{var} occurs at sort {declared}, binder sort is {sort}")
    return cls(var, sort, body, index)


def mk_epsilon(var: str, sort: str, body, index: int | None = None) -> Epsilon:
    return _mk(Epsilon, var, sort, body, index)


def mk_tau(var: str, sort: str, body, index: int | None = None) -> Tau:
    return _mk(Tau, var, sort, body, index)


def mk_iota(var: str, sort: str, body, index: int | None = None) -> Iota:
    return _mk(Iota, var, sort, body, index)


# ---------------------------------------------------------------------------
# generic bottom-up rewriting


def _map(obj, term_fn, formula_fn=None):
    """Rebuild ``obj`` bottom-up, applying ``term_fn`` to every rebuilt term."""
    if isinstance(obj, (LVar, LConst)):
        return term_fn(obj)
    if isinstance(obj, FunApp):
        return term_fn(FunApp(obj.fn, tuple(_map(a, term_fn, formula_fn) for a in obj.args), obj.sort))
    if isinstance(obj, HilbertTerm):
        return term_fn(with_body(obj, _map(obj.body, term_fn, formula_fn)))
    if isinstance(obj, Pred):
        out = Pred(obj.name, tuple(_map(a, term_fn, formula_fn) for a in obj.args))
    elif isinstance(obj, Equal):
        out = Equal(_map(obj.left, term_fn, formula_fn), _map(obj.right, term_fn, formula_fn))
    elif isinstance(obj, Not):
        out = Not(_map(obj.body, term_fn, formula_fn))
    elif isinstance(obj, Binary):
        out = type(obj)(_map(obj.left, term_fn, formula_fn), _map(obj.right, term_fn, formula_fn))
    elif isinstance(obj, Quantifier):
        out = type(obj)(obj.var, obj.sort, _map(obj.body, term_fn, formula_fn))
    else:
        raise TypeError(f"not a formula or term: {obj!r}")
    return formula_fn(out) if formula_fn else out


def tau_free(f):
    """Replace every ``tau x. A`` by ``eps x. ~A``, innermost first."""

    def rewrite(t):
        if isinstance(t, Tau):
            return Epsilon(t.var, t.sort, Not(t.body), t.index)
        return t

    return _map(f, rewrite)


# ---------------------------------------------------------------------------
# first-order -> epsilon


def _strip_prefix(f) -> tuple[list, object]:
    prefix = []
    while isinstance(f, Quantifier):
        prefix.append(f)
        f = f.body
    return prefix, f


def fo_to_epsilon(f):
    """Quantifier-free epsilon translation of a first-order formula.

    A quantifier prefix ``Q1 x1 ... Qn xn. M`` is eliminated outermost first:
    with ``M0 = M``, each step builds the Hilbert term ``h = op xi. M(i-1)``
    (``tau`` for ``forall``, ``eps`` for ``exists``) over the current matrix
    and sets ``Mi = M(i-1)[xi := h]``. Quantifiers below connectives are
    translated first, so ``M`` is already quantifier-free.
    """
    if isinstance(f, (Pred, Equal)):
        return f
    if isinstance(f, Not):
        return Not(fo_to_epsilon(f.body))
    if isinstance(f, Binary):
        return type(f)(fo_to_epsilon(f.left), fo_to_epsilon(f.right))
    if isinstance(f, Quantifier):
        prefix, matrix = _strip_prefix(f)
        current = fo_to_epsilon(matrix)
        for q in prefix:
            cls = Tau if isinstance(q, ForAll) else Epsilon
            h = cls(q.var, q.sort, current)
            current = substitute(current, q.var, h)
        return current
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# epsilon -> first-order


def _hilbert_candidates(f) -> list[HilbertTerm]:
    """Distinct (up to alpha) Hilbert terms occurring in ``f`` at positions
    where none of their free variables is captured, in pre-order."""
    seen: dict = {}

    def walk(o, bound: frozenset[str]):
        if isinstance(o, HilbertTerm):
            if not (free_vars(o) & bound):
                seen.setdefault(alpha_key(o), o)
            walk(o.body, bound | {o.var})
        elif isinstance(o, FunApp) or isinstance(o, Pred):
            for a in o.args:
                walk(a, bound)
        elif isinstance(o, Equal):
            walk(o.left, bound)
            walk(o.right, bound)
        elif isinstance(o, Not):
            walk(o.body, bound)
        elif isinstance(o, Binary):
            walk(o.left, bound)
            walk(o.right, bound)
        elif isinstance(o, Quantifier):
            walk(o.body, bound | {o.var})

    walk(f, frozenset())
    return list(seen.values())


def _abstract(f, h: HilbertTerm, var: str):
    """Replace the capture-free occurrences of ``h`` in ``f`` by ``LVar(var)``."""
    key = alpha_key(h)
    h_fv = free_vars(h)

    def walk(o, bound):
        if isinstance(o, HilbertTerm):
            if not (h_fv & bound) and var not in bound and alpha_key(o) == key:
                return LVar(var, h.sort)
            return with_body(o, walk(o.body, bound | {o.var}))
        if isinstance(o, (LVar, LConst)):
            return o
        if isinstance(o, FunApp):
            return FunApp(o.fn, tuple(walk(a, bound) for a in o.args), o.sort)
        if isinstance(o, Pred):
            return Pred(o.name, tuple(walk(a, bound) for a in o.args))
        if isinstance(o, Equal):
            return Equal(walk(o.left, bound), walk(o.right, bound))
        if isinstance(o, Not):
            return Not(walk(o.body, bound))
        if isinstance(o, Binary):
            return type(o)(walk(o.left, bound), walk(o.right, bound))
        if isinstance(o, Quantifier):
            return type(o)(o.var, o.sort, walk(o.body, bound | {o.var}))
        raise TypeError(f"not a formula or term: {o!r}")

    return walk(f, frozenset())


def _peel(f):
    """All ways to read ``f`` as ``B[x := h]`` with ``h`` a Hilbert term over ``B``."""
    out = []
    for h in _hilbert_candidates(f):
        if not isinstance(h, (Epsilon, Tau)) or h.index is not None:
            continue
        var = h.var
        if var in free_vars(f) or var in all_names(f) - {h.var}:
            var = fresh(h.var, all_names(f) | free_vars(h))
        body = _abstract(f, h, var)
        if var not in free_vars(body):
            continue
        expected = with_body(h, substitute(h.body, h.var, LVar(var, h.sort))) if var != h.var else h
        if not alpha_eq(expected.body, body):
            continue
        cls = ForAll if isinstance(h, Tau) else Exists
        out.append((cls, var, h.sort, body))
    return out


def _chain(f):
    """``(prefix, core)`` with ``f`` read as ``prefix. core``, or ``None``.

    Consecutive peels undo one quantifier block of :func:`fo_to_epsilon`,
    whose last quantifier yields the outermost Hilbert term, so each peel
    goes innermost in the prefix.
    """
    if not has_hilbert(f):
        return [], f
    for cls, var, sort, body in _peel(f):
        found = _chain(body)
        if found is not None:
            prefix, core = found
            return prefix + [(cls, var, sort)], core
    if isinstance(f, Not):
        inner = _to_fo(f.body)
        return None if inner is None else ([], Not(inner))
    if isinstance(f, Binary):
        left = _to_fo(f.left)
        right = _to_fo(f.right) if left is not None else None
        return None if right is None else ([], type(f)(left, right))
    if isinstance(f, Quantifier):
        inner = _to_fo(f.body)
        return None if inner is None else ([], type(f)(f.var, f.sort, inner))
    return None


def _to_fo(f):
    found = _chain(f)
    if found is None:
        return None
    prefix, core = found
    for cls, var, sort in reversed(prefix):
        core = cls(var, sort, core)
    return core


def epsilon_to_fo(f):
    """First-order equivalent of an epsilon formula, or ``None``.

    Inverts :func:`fo_to_epsilon`: a Hilbert term ``op x. B`` is removed when
    the surrounding formula is exactly ``B[x := op x. B]``; search backtracks
    over the candidate terms. Shapes such as ``P(eps x. Q(x))`` have no
    first-order reading and give ``None``.
    """
    return _to_fo(f)


def epsilon_to_fo_strict(f):
    result = _to_fo(f)
    if result is None:
        raise NoFOEquivalent("no first-order formula corresponds to this epsilon formula")
    return result


# ---------------------------------------------------------------------------
# deduction rules

EPS_INTRO = "epsIntro"
TAU_INTRO = "tauIntro"
EPS_DUAL_INTRO = "epsDualIntro"
TAU_DUAL_INTRO = "tauDualIntro"
RULES = (EPS_INTRO, TAU_INTRO, EPS_DUAL_INTRO, TAU_DUAL_INTRO)

# rule -> (Hilbert class of the conclusion, negated body?, generic-variable rule?)
_SCHEMAS = {
    EPS_INTRO: (Epsilon, False, False),
    TAU_INTRO: (Tau, False, True),
    EPS_DUAL_INTRO: (Epsilon, True, True),
    TAU_DUAL_INTRO: (Tau, True, False),
}


@dataclass(frozen=True)
class InferenceStep:
    rule: str
    premise: object
    conclusion: object
    generic_var: str | None = None


def _diff_positions(p, c, out: list, path=()):
    """Collect (path, premise-term, conclusion-term) where the two trees differ."""
    if p == c:
        return True
    if isinstance(c, HilbertTerm) and not isinstance(p, HilbertTerm):
        out.append((path, p, c))
        return True
    if type(p) is not type(c):
        out.append((path, p, c))
        return True
    if isinstance(p, (FunApp, Pred)):
        if (getattr(p, "fn", None), getattr(p, "name", None)) != (getattr(c, "fn", None), getattr(c, "name", None)):
            return False
        if len(p.args) != len(c.args):
            return False
        return all(_diff_positions(a, b, out, path + (i,)) for i, (a, b) in enumerate(zip(p.args, c.args)))
    if isinstance(p, Equal):
        return _diff_positions(p.left, c.left, out, path + (0,)) and _diff_positions(p.right, c.right, out, path + (1,))
    if isinstance(p, Not):
        return _diff_positions(p.body, c.body, out, path + (0,))
    if isinstance(p, Binary):
        return _diff_positions(p.left, c.left, out, path + (0,)) and _diff_positions(p.right, c.right, out, path + (1,))
    if isinstance(p, (Quantifier, HilbertTerm)):
        if p.var != c.var or p.sort != c.sort:
            return False
        return _diff_positions(p.body, c.body, out, path + (0,))
    out.append((path, p, c))
    return True


def _replace_paths(obj, paths: set, new):
    def walk(o, path):
        if path in paths:
            return new
        if isinstance(o, FunApp):
            return FunApp(o.fn, tuple(walk(a, path + (i,)) for i, a in enumerate(o.args)), o.sort)
        if isinstance(o, Pred):
            return Pred(o.name, tuple(walk(a, path + (i,)) for i, a in enumerate(o.args)))
        if isinstance(o, Equal):
            return Equal(walk(o.left, path + (0,)), walk(o.right, path + (1,)))
        if isinstance(o, Not):
            return Not(walk(o.body, path + (0,)))
        if isinstance(o, Binary):
            return type(o)(walk(o.left, path + (0,)), walk(o.right, path + (1,)))
        if isinstance(o, (Quantifier, HilbertTerm)):
            return with_body(o, walk(o.body, path + (0,)))
        return o

    return walk(obj, ())


def check_inference(step: InferenceStep, hypotheses=()) -> bool:
    """Does ``step`` instantiate its rule schema correctly?

    Generic-variable rules (``tauIntro``, ``epsDualIntro``) replace every free
    occurrence of ``generic_var``, which must not occur free in any
    hypothesis. Constant rules (``epsIntro``, ``tauDualIntro``) replace a
    chosen set of occurrences of one closed term ``c`` by the Hilbert term
    built from the premise with those occurrences abstracted.
    """
    if step.rule not in _SCHEMAS:
        return False
    cls, negated, generic = _SCHEMAS[step.rule]
    premise, conclusion = step.premise, step.conclusion

    if generic:
        x = step.generic_var
        if x is None or x not in free_vars(premise):
            return False
        if any(x in free_vars(h) for h in hypotheses):
            return False
        sort = free_var_sorts(premise)[x]
        body = Not(premise) if negated else premise
        expected = substitute(premise, x, cls(x, sort, body))
        return alpha_eq(expected, conclusion)

    diffs: list = []
    if not _diff_positions(premise, conclusion, diffs) or not diffs:
        return False
    witnesses = {p for _, p, _ in diffs}
    hilberts = {alpha_key(c) for _, _, c in diffs}
    if len(witnesses) != 1 or len(hilberts) != 1:
        return False
    witness = diffs[0][1]
    h = diffs[0][2]
    if not isinstance(h, cls) or h.index is not None or free_vars(witness):
        return False
    if isinstance(witness, HilbertTerm) or getattr(witness, "sort", None) != h.sort:
        return False
    var = fresh(h.var, all_names(premise))
    abstracted = _replace_paths(premise, {path for path, _, _ in diffs}, LVar(var, h.sort))
    body = Not(abstracted) if negated else abstracted
    return alpha_eq(cls(var, h.sort, body), h)
