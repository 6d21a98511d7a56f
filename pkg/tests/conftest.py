"""Shared generators and independent oracles for the test suite.

The normalizer here is deliberately a second implementation (de Bruijn
indices, structural recursion) so engine results can be cross-checked
against code that shares nothing with the package's reduction machinery.
"""

from __future__ import annotations

import random

from mixlam.formulas import (
    Arrow,
    Atom,
    Bottom,
    ClassVar,
    Const,
    FoVar,
    Formula,
    ForallClass,
    ForallFo,
    ForallSo,
    FunApp,
    PredSym,
    PredVar,
)
from mixlam.terms import App, C, Lam, Mu, StackConst, Term, Var


# ---------------------------------------------------------------------------
# Random terms

def random_pure_term(rng: random.Random, size: int, pool=("a", "b", "c"), bound=()):
    """A random pure lambda term of roughly the given size."""
    if size <= 1:
        names = tuple(bound) + tuple(pool)
        return Var(rng.choice(names))
    r = rng.random()
    if r < 0.35:
        binder = rng.choice("uvwxyz")
        return Lam(binder, random_pure_term(rng, size - 1, pool, tuple(bound) + (binder,)))
    left = rng.randint(1, size - 1)
    return App(
        random_pure_term(rng, left, pool, bound),
        random_pure_term(rng, size - left, pool, bound),
    )


def random_lambda_c_term(rng: random.Random, size: int, pool=("a", "b", "c"), bound=()):
    if size <= 1:
        if rng.random() < 0.15:
            return C
        names = tuple(bound) + tuple(pool)
        return Var(rng.choice(names))
    r = rng.random()
    if r < 0.3:
        binder = rng.choice("uvwxyz")
        return Lam(binder, random_lambda_c_term(rng, size - 1, pool, tuple(bound) + (binder,)))
    left = rng.randint(1, size - 1)
    return App(
        random_lambda_c_term(rng, left, pool, bound),
        random_lambda_c_term(rng, size - left, pool, bound),
    )


def random_lambda_cp_term(rng: random.Random, size: int, stacks=("p", "q"), pool=("a", "b"), bound=()):
    """Stack constants appear only as arguments."""
    if size <= 1:
        if rng.random() < 0.1:
            return C
        names = tuple(bound) + tuple(pool)
        return Var(rng.choice(names))
    r = rng.random()
    if r < 0.3:
        binder = rng.choice("uvwxyz")
        return Lam(binder, random_lambda_cp_term(rng, size - 1, stacks, pool, tuple(bound) + (binder,)))
    left = rng.randint(1, size - 1)
    fun = random_lambda_cp_term(rng, left, stacks, pool, bound)
    if rng.random() < 0.2:
        return App(fun, StackConst(rng.choice(stacks)))
    return App(fun, random_lambda_cp_term(rng, size - left, stacks, pool, bound))


def random_mu_term(rng: random.Random, size: int, pool=("a", "b"), bound=(), mu_bound=()):
    if size <= 1:
        names = tuple(bound) + tuple(pool)
        return Var(rng.choice(names))
    r = rng.random()
    if r < 0.25:
        binder = rng.choice("uvwxyz")
        return Lam(binder, random_mu_term(rng, size - 1, pool, tuple(bound) + (binder,), mu_bound))
    if r < 0.45:
        binder = rng.choice(("al", "be", "ga"))
        named = rng.choice(tuple(mu_bound) + (binder, "de"))
        return Mu(binder, named, random_mu_term(rng, size - 1, pool, bound, tuple(mu_bound) + (binder,)))
    left = rng.randint(1, size - 1)
    return App(
        random_mu_term(rng, left, pool, bound, mu_bound),
        random_mu_term(rng, size - left, pool, bound, mu_bound),
    )


# ---------------------------------------------------------------------------
# Random formulas

_FO_POOL = (FoVar("x"), FoVar("y"), Const("0"))


def random_fo_term(rng: random.Random, depth: int = 2):
    if depth <= 0 or rng.random() < 0.5:
        return rng.choice(_FO_POOL)
    sym = rng.choice(("s", "p"))
    return FunApp(sym, (random_fo_term(rng, depth - 1),))


# fixed arities so generated formulas are well-formed
_SIGNATURE = {"P": 1, "Q": 2, "D": 0, "X": 1, "Y": 0}


def random_atom(rng: random.Random, classical_ok: bool = True) -> Formula:
    kind = rng.random()
    if kind < 0.2:
        return Bottom()
    name = rng.choice(("P", "Q", "D")) if kind < 0.5 else rng.choice(("X", "Y"))
    args = tuple(random_fo_term(rng) for _ in range(_SIGNATURE[name]))
    if kind < 0.5:
        return Atom(PredSym(name), args)
    if kind < 0.8 or not classical_ok:
        return Atom(PredVar(name), args)
    return Atom(ClassVar(name), args)


def random_formula(rng: random.Random, size: int, classical_ok: bool = True) -> Formula:
    if size <= 1:
        return random_atom(rng, classical_ok)
    r = rng.random()
    if r < 0.45:
        left = rng.randint(1, size - 1)
        return Arrow(
            random_formula(rng, left, classical_ok),
            random_formula(rng, size - left, classical_ok),
        )
    if r < 0.6:
        return ForallFo(rng.choice(("x", "y", "z")), random_formula(rng, size - 1, classical_ok))
    if r < 0.8 or not classical_ok:
        return ForallSo(rng.choice(("X", "Y")), random_formula(rng, size - 1, classical_ok))
    return ForallClass(rng.choice(("X", "Y")), random_formula(rng, size - 1, classical_ok))


# ---------------------------------------------------------------------------
# Independent normalizer (de Bruijn indices)

def _to_db(t: Term, env: dict[str, int], depth: int):
    match t:
        case Var(x):
            return ("b", depth - env[x] + 1) if x in env else ("f", x)
        case Lam(x, b):
            e2 = dict(env)
            e2[x] = depth + 1
            return ("l", _to_db(b, e2, depth + 1))
        case App(f, a):
            return ("a", _to_db(f, env, depth), _to_db(a, env, depth))
    raise ValueError("pure terms only")


def _shift(t, by, cutoff=0):
    match t:
        case ("b", k):
            return ("b", k + by) if k > cutoff else t
        case ("l", b):
            return ("l", _shift(b, by, cutoff + 1))
        case ("a", f, a):
            return ("a", _shift(f, by, cutoff), _shift(a, by, cutoff))
        case _:
            return t


def _subst_db(t, k, v):
    match t:
        case ("b", i):
            if i == k:
                return _shift(v, k - 1)
            return ("b", i - 1) if i > k else t
        case ("l", b):
            return ("l", _subst_db(b, k + 1, v))
        case ("a", f, a):
            return ("a", _subst_db(f, k, v), _subst_db(a, k, v))
        case _:
            return t


class Fuel(Exception):
    pass


def _nf_db(t, fuel):
    if fuel[0] <= 0:
        raise Fuel()
    fuel[0] -= 1
    match t:
        case ("a", ("l", b), a):
            return _nf_db(_subst_db(b, 1, a), fuel)
        case ("a", f, a):
            fn = _whnf_db(f, fuel)
            if fn[0] == "l":
                return _nf_db(("a", fn, a), fuel)
            return ("a", _nf_db(fn, fuel), _nf_db(a, fuel))
        case ("l", b):
            return ("l", _nf_db(b, fuel))
        case _:
            return t


def _whnf_db(t, fuel):
    if fuel[0] <= 0:
        raise Fuel()
    fuel[0] -= 1
    match t:
        case ("a", f, a):
            fn = _whnf_db(f, fuel)
            if fn[0] == "l":
                return _whnf_db(_subst_db(fn[1], 1, a), fuel)
            return ("a", fn, a)
        case _:
            return t


def _from_db(t, depth=0):
    match t:
        case ("b", k):
            return Var(f"db{depth - k}")
        case ("f", x):
            return Var(x)
        case ("l", b):
            return Lam(f"db{depth}", _from_db(b, depth + 1))
        case ("a", f, a):
            return App(_from_db(f, depth), _from_db(a, depth))


def naive_beta_normalize(t: Term, fuel: int = 20000) -> Term | None:
    """Second-opinion normal-order normalizer; None when fuel runs out."""
    try:
        return _from_db(_nf_db(_to_db(t, {}, 0), [fuel]))
    except Fuel:
        return None
