"""Independent reference computations for derived expected values.

Nothing here imports the package: types and terms are nested tuples, models
are plain dicts, and choice functions are counted in closed form. The tests
compare the package against these routes and against frozen golden files.
"""

from __future__ import annotations

import itertools
from math import comb, prod

# ---------------------------------------------------------------------------
# a tuple-encoded System F checker
#
# types: ("base", s) | ("t",) | ("var", a) | ("arr", A, B) | ("pi", a, A)
# terms: ("v", x, A) | ("c", name, A) | ("app", M, N) | ("lam", x, A, M)
#        | ("tapp", M, A) | ("tlam", a, M)


def _subst_ty(ty, a, rep):
    tag = ty[0]
    if tag == "var":
        return rep if ty[1] == a else ty
    if tag == "arr":
        return ("arr", _subst_ty(ty[1], a, rep), _subst_ty(ty[2], a, rep))
    if tag == "pi":
        if ty[1] == a:
            return ty
        assert ty[1] not in _ftv(rep), "oracle does not rename"
        return ("pi", ty[1], _subst_ty(ty[2], a, rep))
    return ty


def _ftv(ty):
    tag = ty[0]
    if tag == "var":
        return {ty[1]}
    if tag == "arr":
        return _ftv(ty[1]) | _ftv(ty[2])
    if tag == "pi":
        return _ftv(ty[2]) - {ty[1]}
    return set()


def ty_equal(a, b, env=()):
    if a[0] != b[0]:
        return False
    if a[0] == "var":
        ia = next((i for i, (x, _) in enumerate(env) if x == a[1]), None)
        ib = next((i for i, (_, y) in enumerate(env) if y == b[1]), None)
        return ia == ib and (ia is not None or a[1] == b[1])
    if a[0] == "arr":
        return ty_equal(a[1], b[1], env) and ty_equal(a[2], b[2], env)
    if a[0] == "pi":
        return ty_equal(a[2], b[2], ((a[1], b[1]),) + env)
    return a == b


def check(term, consts, env=None):
    env = env or {}
    tag = term[0]
    if tag == "v":
        assert ty_equal(env[term[1]], term[2])
        return term[2]
    if tag == "c":
        assert ty_equal(consts[term[1]], term[2])
        return term[2]
    if tag == "lam":
        return ("arr", term[2], check(term[3], consts, {**env, term[1]: term[2]}))
    if tag == "app":
        f, a = check(term[1], consts, env), check(term[2], consts, env)
        assert f[0] == "arr" and ty_equal(f[1], a)
        return f[2]
    if tag == "tlam":
        assert all(term[1] not in _ftv(t) for t in env.values())
        return ("pi", term[1], check(term[2], consts, env))
    if tag == "tapp":
        f = check(term[1], consts, env)
        assert f[0] == "pi"
        return _subst_ty(f[2], f[1], term[2])
    raise ValueError(tag)


def show_ty(ty) -> str:
    tag = ty[0]
    if tag == "base":
        return ty[1]
    if tag == "t":
        return "t"
    if tag == "var":
        return ty[1]
    if tag == "arr":
        left = show_ty(ty[1])
        if ty[1][0] in ("arr", "pi"):
            left = f"({left})"
        return f"{left} -> {show_ty(ty[2])}"
    return f"Pi {ty[1]}. {show_ty(ty[2])}"


T = ("t",)


def arr(*tys):
    out = tys[-1]
    for ty in reversed(tys[:-1]):
        out = ("arr", ty, out)
    return out


def poly_and_type() -> str:
    """Type of the polymorphic conjunction, from the tuple checker."""
    a, b, c = ("var", "a"), ("var", "b"), ("var", "c")
    P, Q = ("v", "P", arr(a, T)), ("v", "Q", arr(b, T))
    x, f, g = ("v", "x", c), ("v", "f", arr(c, a)), ("v", "g", arr(c, b))
    conj = ("c", "and", arr(T, T, T))
    body = ("app", ("app", conj, ("app", P, ("app", f, x))), ("app", Q, ("app", g, x)))
    inner = ("tlam", "c", ("lam", "x", c, ("lam", "f", arr(c, a), ("lam", "g", arr(c, b), body))))
    term = ("tlam", "a", ("tlam", "b", ("lam", "P", arr(a, T), ("lam", "Q", arr(b, T), inner))))
    return show_ty(check(term, {"and": arr(T, T, T)}))


def gq_a_type() -> str:
    e = ("base", "e")
    P, Q, z = ("v", "P", arr(e, T)), ("v", "Q", arr(e, T)), ("v", "z", e)
    body = ("app", ("c", "exists", arr(arr(e, T), T)),
            ("lam", "z", e, ("app", ("app", ("c", "and", arr(T, T, T)), ("app", P, z)), ("app", Q, z))))
    term = ("lam", "P", arr(e, T), ("lam", "Q", arr(e, T), body))
    return show_ty(check(term, {"and": arr(T, T, T), "exists": arr(arr(e, T), T)}))


# ---------------------------------------------------------------------------
# choice functions


def admissible_choice_count(n: int) -> int:
    """Product of |S| over nonempty subsets, times n options for the empty set."""
    return n * prod(k ** comb(n, k) for k in range(1, n + 1))


def naive_choices(domain):
    """Admissible choice functions as dicts, built by filtering all total maps."""
    subsets = [frozenset(c) for r in range(len(domain) + 1) for c in itertools.combinations(domain, r)]
    for values in itertools.product(domain, repeat=len(subsets)):
        table = dict(zip(subsets, values))
        if all(not s or table[s] in s for s in subsets):
            yield table


def eps_self_truth(domain, ext):
    """Truth of P(eps x. P(x)) under every admissible choice: ``ext`` is P's extension."""
    witnesses = frozenset(a for a in domain if a in ext)
    return {table[witnesses] in ext for table in naive_choices(domain)}


# ---------------------------------------------------------------------------
# Russell descriptions


def iota_status(domain, ext, outer):
    """(defined?, truth of outer(iota x. ext(x))) with atoms false when undefined."""
    witnesses = [a for a in domain if a in ext]
    if len(witnesses) != 1:
        return False, False
    return True, witnesses[0] in outer


def unique_existence(domain, ext) -> bool:
    return sum(1 for a in domain if a in ext) == 1
