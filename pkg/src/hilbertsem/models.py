"""Finite many-sorted models with explicit choice functions.

Epsilon terms denote ``choice(S)`` of their satisfying set ``S``; tau terms
are evaluated as the epsilon term of the negated body; iota terms denote the
unique witness or :data:`UNDEFINED`. Any atom with an undefined argument is
false.
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import HilbertError, ParseError
from .logic import (
    And,
    Equal,
    Exists,
    ForAll,
    FunApp,
    GenTerm,
    HilbertTerm,
    Implies,
    Iota,
    LConst,
    LVar,
    Not,
    Or,
    Pred,
    Signature,
    Tau,
    has_hilbert,
    subterms,
)


class SignatureMismatch(HilbertError):
    pass


class NotEvaluable(HilbertError):
    """A generalized-quantifier term has no finite-model clause."""


class SearchSpaceTooLarge(HilbertError):
    pass


class _Undefined:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class FiniteModel:
    domains: Mapping[str, tuple[str, ...]]
    consts: Mapping[str, str] = field(default_factory=dict)
    funcs: Mapping[str, Mapping[tuple[str, ...], str]] = field(default_factory=dict)
    preds: Mapping[str, frozenset] = field(default_factory=dict)
    choice: Mapping[str, Mapping[frozenset, str]] = field(default_factory=dict)
    # declared argument sorts, used only for printing and validation
    pred_sorts: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    func_sorts: Mapping[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    const_sorts: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for sort, dom in self.domains.items():
            if not dom:
                raise SignatureMismatch(f"domain of sort {sort} is empty")
        for sort, table in self.choice.items():
            dom = self.domain(sort)
            for subset, elem in table.items():
                if elem not in dom or not subset <= set(dom):
                    raise SignatureMismatch(f"choice for {sort} mentions atoms outside its domain")
                if subset and elem not in subset:
                    raise SignatureMismatch(
                        f"inadmissible choice: {elem} is not in {{{','.join(sorted(subset))}}}"
                    )

    def domain(self, sort: str) -> tuple[str, ...]:
        try:
            return self.domains[sort]
        except KeyError:
            raise SignatureMismatch(f"model has no sort {sort}") from None

    def choose(self, sort: str, subset: frozenset) -> str:
        """``choice(subset)``; unlisted subsets pick their least member, and the
        empty set picks the least domain element."""
        dom = self.domain(sort)
        table = self.choice.get(sort, {})
        if subset in table:
            return table[subset]
        for a in dom:
            if not subset or a in subset:
                return a
        raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# evaluation


def eval_term(m: FiniteModel, t, env: Mapping[str, str] | None = None):
    env = env or {}
    if isinstance(t, LVar):
        if t.name not in env:
            raise SignatureMismatch(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, LConst):
        if t.name in m.consts:
            return m.consts[t.name]
        if t.name in m.domain(t.sort):
            return t.name
        raise SignatureMismatch(f"constant {t.name} is not interpreted")
    if isinstance(t, FunApp):
        args = tuple(eval_term(m, a, env) for a in t.args)
        if any(a is UNDEFINED for a in args):
            return UNDEFINED
        if t.fn not in m.funcs:
            raise SignatureMismatch(f"function {t.fn} is not interpreted")
        try:
            return m.funcs[t.fn][args]
        except KeyError:
            raise SignatureMismatch(f"function {t.fn} undefined on {args}") from None
    if isinstance(t, GenTerm):
        raise NotEvaluable(f"{t.operator} has no model-theoretic clause")
    if isinstance(t, Tau):
        # the choice applied to the counterexamples of the body
        counter = frozenset(a for a in m.domain(t.sort) if not eval_formula(m, t.body, {**env, t.var: a}))
        return m.choose(t.sort, counter)
    if isinstance(t, HilbertTerm):
        witnesses = frozenset(a for a in m.domain(t.sort) if eval_formula(m, t.body, {**env, t.var: a}))
        if isinstance(t, Iota):
            return next(iter(witnesses)) if len(witnesses) == 1 else UNDEFINED
        return m.choose(t.sort, witnesses)
    raise TypeError(f"not a term: {t!r}")


def eval_formula(m: FiniteModel, f, env: Mapping[str, str] | None = None) -> bool:
    env = env or {}
    if isinstance(f, Pred):
        args = tuple(eval_term(m, a, env) for a in f.args)
        if f.name not in m.preds:
            raise SignatureMismatch(f"predicate {f.name} is not interpreted")
        if any(a is UNDEFINED for a in args):
            return False
        return args in m.preds[f.name]
    if isinstance(f, Equal):
        left, right = eval_term(m, f.left, env), eval_term(m, f.right, env)
        if left is UNDEFINED or right is UNDEFINED:
            return False
        return left == right
    if isinstance(f, Not):
        return not eval_formula(m, f.body, env)
    if isinstance(f, And):
        return eval_formula(m, f.left, env) and eval_formula(m, f.right, env)
    if isinstance(f, Or):
        return eval_formula(m, f.left, env) or eval_formula(m, f.right, env)
    if isinstance(f, Implies):
        return not eval_formula(m, f.left, env) or eval_formula(m, f.right, env)
    if isinstance(f, ForAll):
        return all(eval_formula(m, f.body, {**env, f.var: a}) for a in m.domain(f.sort))
    if isinstance(f, Exists):
        return any(eval_formula(m, f.body, {**env, f.var: a}) for a in m.domain(f.sort))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# model files


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _braced(text: str, lineno: int) -> str:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError("expected {...}", line=lineno)
    return text[1:-1].strip()


def parse_model(text: str) -> FiniteModel:
    """Read the line-based model format (see :func:`format_model`)."""
    domains: dict[str, tuple[str, ...]] = {}
    consts: dict[str, str] = {}
    const_sorts: dict[str, str] = {}
    funcs: dict[str, dict] = {}
    func_sorts: dict[str, tuple] = {}
    preds: dict[str, frozenset] = {}
    pred_sorts: dict[str, tuple] = {}
    choice: dict[str, dict] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        keyword, _, rest = line.strip().partition(" ")
        try:
            if keyword == "sort":
                name, eq, atoms = rest.partition("=")
                if not eq:
                    raise ParseError("expected 'sort NAME = atoms'", line=lineno)
                domains[name.strip()] = tuple(atoms.split())
            elif keyword == "const":
                head, _, value = rest.partition("=")
                name, _, sort = head.partition(":")
                consts[name.strip()] = value.strip()
                const_sorts[name.strip()] = sort.strip()
            elif keyword == "pred":
                head, _, body = rest.partition("=")
                name, _, sorts = head.partition(":")
                inner = _braced(body, lineno)
                tuples = set()
                for item in inner.split(";") if inner else []:
                    item = item.strip()
                    tuples.add(() if item == "()" else tuple(item.split()))
                pred_sorts[name.strip()] = tuple(sorts.split())
                preds[name.strip()] = frozenset(tuples)
            elif keyword == "func":
                head, _, body = rest.partition("=")
                name, _, sig = head.partition(":")
                args, _, result = sig.rpartition("->")
                table = {}
                inner = _braced(body, lineno)
                for item in inner.split(";") if inner else []:
                    lhs, _, rhs = item.partition("->")
                    table[tuple(lhs.split())] = rhs.strip()
                funcs[name.strip()] = table
                func_sorts[name.strip()] = (tuple(args.split()), result.strip())
            elif keyword == "choice":
                sort, _, spec = rest.strip().partition(" ")
                subset, arrow, elem = spec.partition("->")
                if not arrow:
                    raise ParseError("expected 'choice SORT {atoms} -> atom'", line=lineno)
                atoms = _braced(subset, lineno).replace(",", " ").split()
                choice.setdefault(sort, {})[frozenset(atoms)] = elem.strip()
            else:
                raise ParseError(f"unknown declaration {keyword!r}", line=lineno)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None

    for name, sorts in pred_sorts.items():
        if any(len(tup) != len(sorts) for tup in preds[name]):
            raise SignatureMismatch(f"predicate {name}: tuple arity differs from declaration")
        for tup in preds[name]:
            for atom, sort in zip(tup, sorts):
                if atom not in domains.get(sort, ()):
                    raise SignatureMismatch(f"predicate {name}: {atom} is not in sort {sort}")
    return FiniteModel(domains, consts, funcs, preds, choice, pred_sorts, func_sorts, const_sorts)


def format_model(m: FiniteModel) -> str:
    lines = [f"sort {s} = {' '.join(dom)}" for s, dom in m.domains.items()]
    position = {a: i for dom in m.domains.values() for i, a in enumerate(dom)}

    def key(tup):
        return tuple(position.get(a, -1) for a in tup)

    for name, value in m.consts.items():
        lines.append(f"const {name} : {m.const_sorts.get(name, '?')} = {value}")
    for name, table in m.funcs.items():
        args, result = m.func_sorts.get(name, ((), ""))
        body = "; ".join(f"{' '.join(k)} -> {v}" for k, v in sorted(table.items(), key=lambda kv: key(kv[0])))
        lines.append(f"func {name} : {' '.join(args)} -> {result} = {{{body}}}")
    for name, ext in m.preds.items():
        sorts = m.pred_sorts.get(name, ())
        items = ["()" if not tup else " ".join(tup) for tup in sorted(ext, key=key)]
        head = f"pred {name} : {' '.join(sorts)}".rstrip()
        lines.append(f"{head} = {{{'; '.join(items)}}}")
    for sort, table in m.choice.items():
        for subset, elem in sorted(table.items(), key=lambda kv: (len(kv[0]), sorted(key((a,)) for a in kv[0]))):
            atoms = ",".join(sorted(subset, key=lambda a: position.get(a, -1)))
            lines.append(f"choice {sort} {{{atoms}}} -> {elem}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# enumeration


def _atom_names() -> Iterator[str]:
    for n in itertools.count(1):
        for letters in itertools.product("abcdefghijklmnopqrstuvwxyz", repeat=n):
            yield "".join(letters)


def admissible_choices(domain: tuple[str, ...]) -> Iterator[dict[frozenset, str]]:
    """Every admissible choice function over ``domain``, the empty set included."""
    subsets = [frozenset(c) for r in range(len(domain) + 1) for c in itertools.combinations(domain, r)]
    options = [domain if not s else tuple(a for a in domain if a in s) for s in subsets]
    for picks in itertools.product(*options):
        yield dict(zip(subsets, picks))


def count_admissible_choices(size: int) -> int:
    total = size  # the empty set may pick anything
    for r in range(1, size + 1):
        total *= r ** comb(size, r)
    return total


def _hilbert_sorts(formulas: Iterable) -> set[str]:
    return {t.sort for f in formulas for t in subterms(f) if isinstance(t, HilbertTerm)}


def _space_size(sig: Signature, sizes: dict[str, int], choice_sorts: set[str]) -> int:
    total = 1
    for sort in sig.consts.values():
        total *= sizes[sort]
    for args, result in sig.funcs.values():
        cells = 1
        for s in args:
            cells *= sizes[s]
        total *= sizes[result] ** cells
    for args in sig.preds.values():
        cells = 1
        for s in args:
            cells *= sizes[s]
        total *= 2**cells
    for sort in choice_sorts:
        total *= count_admissible_choices(sizes[sort])
    return total


def enumerate_models(sig: Signature, max_size: int, choice_sorts: Iterable[str] | None = None,
                     cap: int | None = None) -> Iterator[FiniteModel]:
    """All models of ``sig`` with every domain of size 1..max_size, in a fixed order.

    Order: domain sizes (lexicographic over sorts), then constants, function
    tables, predicate extensions, and finally choice functions for the sorts
    in ``choice_sorts`` (all sorts by default). Other sorts use the default
    least-member choice.
    """
    sorts = list(sig.sorts) or ["e"]
    choice_sorts = set(sorts if choice_sorts is None else choice_sorts)
    size_grid = list(itertools.product(range(1, max_size + 1), repeat=len(sorts)))
    if cap is not None:
        total = sum(_space_size(sig, dict(zip(sorts, g)), choice_sorts) for g in size_grid)
        if total > cap:
            raise SearchSpaceTooLarge(f"{total} models exceed the cap of {cap}")
    for grid in size_grid:
        names = _atom_names()
        domains = {s: tuple(next(names) for _ in range(n)) for s, n in zip(sorts, grid)}
        yield from _models_over(sig, domains, [s for s in sorts if s in choice_sorts])


def _models_over(sig: Signature, domains: dict, choice_sorts: list[str]) -> Iterator[FiniteModel]:
    const_names = list(sig.consts)
    func_names = list(sig.funcs)
    pred_names = list(sig.preds)

    def func_tables(name):
        args, result = sig.funcs[name]
        cells = list(itertools.product(*(domains[s] for s in args)))
        for values in itertools.product(domains[result], repeat=len(cells)):
            yield dict(zip(cells, values))

    def extensions(name):
        cells = list(itertools.product(*(domains[s] for s in sig.preds[name])))
        for bits in range(2 ** len(cells)):
            yield frozenset(c for i, c in enumerate(cells) if bits >> i & 1)

    const_space = itertools.product(*(domains[sig.consts[c]] for c in const_names))
    for const_vals in const_space:
        for tables in itertools.product(*(list(func_tables(f)) for f in func_names)):
            for exts in itertools.product(*(list(extensions(p)) for p in pred_names)):
                for choices in itertools.product(*(list(admissible_choices(domains[s])) for s in choice_sorts)):
                    yield FiniteModel(
                        domains,
                        dict(zip(const_names, const_vals)),
                        dict(zip(func_names, tables)),
                        dict(zip(pred_names, exts)),
                        dict(zip(choice_sorts, choices)),
                        dict(sig.preds),
                        dict(sig.funcs),
                        dict(sig.consts),
                    )


@dataclass(frozen=True)
class CounterModel:
    model: FiniteModel


@dataclass(frozen=True)
class NoneFoundUpTo:
    max_size: int


DEFAULT_CAP = 2_000_000


def entails_finite(premises: list, conclusion, max_size: int, cap: int = DEFAULT_CAP,
                   sig: Signature | None = None) -> CounterModel | NoneFoundUpTo:
    """Search all models up to ``max_size`` for premises-true, conclusion-false.

    Choice functions are enumerated only for sorts that carry Hilbert terms;
    elsewhere they cannot affect truth. The first counter-model in
    :func:`enumerate_models` order is returned.
    """
    formulas = list(premises) + [conclusion]
    sig = sig or Signature.infer(formulas)
    choice_sorts = _hilbert_sorts(formulas) if any(has_hilbert(f) for f in formulas) else set()
    for m in enumerate_models(sig, max_size, choice_sorts, cap):
        if all(eval_formula(m, p) for p in premises) and not eval_formula(m, conclusion):
            return CounterModel(m)
    return NoneFoundUpTo(max_size)
