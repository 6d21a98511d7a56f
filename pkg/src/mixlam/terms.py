"""Term languages: pure lambda terms, lambda-C terms with stack constants, and mu-terms.

One AST family covers all three languages.  ``Var``/``Lam``/``App`` are shared,
``ConstC`` and ``StackConst`` belong to the control calculus, ``Mu`` to the
mu-calculus.  Lambda variables, mu variables and stack constants live in three
disjoint namespaces.  Equality on terms is alpha-equivalence (bound names are
irrelevant); it is implemented by comparison of cached canonical nameless forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union


class Term:
    """Base class; equality and hashing are alpha-equivalence."""

    __match_args__ = ()

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return canon(self) == canon(other)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash(canon(self))

    def __str__(self) -> str:
        from .syntax import print_term

        return print_term(self)


@dataclass(frozen=True, eq=False)
class Var(Term):
    name: str
    __match_args__ = ("name",)


@dataclass(frozen=True, eq=False)
class Lam(Term):
    binder: str
    body: Term
    __match_args__ = ("binder", "body")


@dataclass(frozen=True, eq=False)
class App(Term):
    fun: Term
    arg: Term
    __match_args__ = ("fun", "arg")


@dataclass(frozen=True, eq=False)
class ConstC(Term):
    """The control constant C."""


@dataclass(frozen=True, eq=False)
class StackConst(Term):
    """An inert stack constant; surface syntax ``#p``."""

    name: str
    __match_args__ = ("name",)


C = ConstC()

#: A mu-term is a Term built without ConstC/StackConst; alias for signatures.
MuTerm = Term


def app(fun: Term, *args: Term) -> Term:
    """Left-associated application (fun) a1 ... an."""
    for a in args:
        fun = App(fun, a)
    return fun


def lam(binders: str | Sequence[str], body: Term) -> Term:
    if isinstance(binders, str):
        binders = binders.split()
    for b in reversed(binders):
        body = Lam(b, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose nested applications into (head, arguments)."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# Canonical nameless forms (shared backing for alpha-equivalence)

def _canon(t: Term, lenv: dict[str, int], menv: dict[str, int], depth: int, mdepth: int):
    match t:
        case Var(x):
            i = lenv.get(x)
            return ("b", depth - i) if i is not None else ("f", x)
        case Lam(x, b):
            lenv2 = dict(lenv)
            lenv2[x] = depth
            return ("lam", _canon(b, lenv2, menv, depth + 1, mdepth))
        case App(f, a):
            return ("app", _canon(f, lenv, menv, depth, mdepth), _canon(a, lenv, menv, depth, mdepth))
        case ConstC():
            return ("C",)
        case StackConst(p):
            return ("p", p)
        case Mu(g, d, b):
            menv2 = dict(menv)
            menv2[g] = mdepth
            j = menv2.get(d)
            dc = ("mb", mdepth + 1 - j) if j is not None else ("mf", d)
            return ("mu", dc, _canon(b, lenv, menv2, depth, mdepth + 1))
    raise TypeError(f"not a term: {t!r}")


def canon(t: Term):
    """Canonical form of a term at top level; cached on the node."""
    c = t.__dict__.get("_canon")
    if c is None:
        c = _canon(t, {}, {}, 0, 0)
        object.__setattr__(t, "_canon", c)
    return c


def alpha_eq(a: Term, b: Term) -> bool:
    return canon(a) == canon(b)


# ---------------------------------------------------------------------------
# Mu-terms

@dataclass(frozen=True, eq=False)
class Mu(Term):
    """mu binder with naming: ``Mu(a, b, t)`` is the term mu a.[b] t."""

    binder: str
    named: str
    body: Term
    __match_args__ = ("binder", "named", "body")


# ---------------------------------------------------------------------------
# Variable queries (cached per node where they recurse)

def free_vars(t: Term) -> frozenset[str]:
    """Free lambda-variables."""
    cached = t.__dict__.get("_fv")
    if cached is not None:
        return cached
    match t:
        case Var(x):
            fv = frozenset((x,))
        case Lam(x, b):
            fv = free_vars(b) - {x}
        case App(f, a):
            fv = free_vars(f) | free_vars(a)
        case Mu(_, _, b):
            fv = free_vars(b)
        case _:
            fv = frozenset()
    object.__setattr__(t, "_fv", fv)
    return fv


def free_mu_vars(t: Term) -> frozenset[str]:
    cached = t.__dict__.get("_fmv")
    if cached is not None:
        return cached
    match t:
        case Mu(g, d, b):
            fv = (frozenset((d,)) | free_mu_vars(b)) - {g}
        case Lam(_, b):
            fv = free_mu_vars(b)
        case App(f, a):
            fv = free_mu_vars(f) | free_mu_vars(a)
        case _:
            fv = frozenset()
    object.__setattr__(t, "_fmv", fv)
    return fv


def stack_consts(t: Term) -> frozenset[str]:
    match t:
        case StackConst(p):
            return frozenset((p,))
        case Lam(_, b) | Mu(_, _, b):
            return stack_consts(b)
        case App(f, a):
            return stack_consts(f) | stack_consts(a)
        case _:
            return frozenset()


def all_var_names(t: Term) -> frozenset[str]:
    """Every lambda-variable name occurring in t, free or bound."""
    match t:
        case Var(x):
            return frozenset((x,))
        case Lam(x, b):
            return all_var_names(b) | {x}
        case App(f, a):
            return all_var_names(f) | all_var_names(a)
        case Mu(_, _, b):
            return all_var_names(b)
        case _:
            return frozenset()


def all_mu_names(t: Term) -> frozenset[str]:
    match t:
        case Mu(g, d, b):
            return all_mu_names(b) | {g, d}
        case Lam(_, b):
            return all_mu_names(b)
        case App(f, a):
            return all_mu_names(f) | all_mu_names(a)
        case _:
            return frozenset()


def has_const_c(t: Term) -> bool:
    match t:
        case ConstC():
            return True
        case Lam(_, b) | Mu(_, _, b):
            return has_const_c(b)
        case App(f, a):
            return has_const_c(f) or has_const_c(a)
        case _:
            return False


def has_mu(t: Term) -> bool:
    match t:
        case Mu(_, _, _):
            return True
        case Lam(_, b):
            return has_mu(b)
        case App(f, a):
            return has_mu(f) or has_mu(a)
        case _:
            return False


def is_pure_lambda(t: Term) -> bool:
    """No C, no stack constants, no mu constructs."""
    match t:
        case Var(_):
            return True
        case Lam(_, b):
            return is_pure_lambda(b)
        case App(f, a):
            return is_pure_lambda(f) and is_pure_lambda(a)
        case _:
            return False


def is_lambda_c(t: Term) -> bool:
    """A lambda-C term: C allowed, no stack constants, no mu."""
    match t:
        case Var(_) | ConstC():
            return True
        case Lam(_, b):
            return is_lambda_c(b)
        case App(f, a):
            return is_lambda_c(f) and is_lambda_c(a)
        case _:
            return False


def is_mu_term(t: Term) -> bool:
    match t:
        case Var(_):
            return True
        case Lam(_, b) | Mu(_, _, b):
            return is_mu_term(b)
        case App(f, a):
            return is_mu_term(f) and is_mu_term(a)
        case _:
            return False


def is_lambda_cp(t: Term) -> bool:
    """Stack constants occur only in argument position (and C is allowed)."""
    match t:
        case Var(_) | ConstC():
            return True
        case Lam(_, b):
            return is_lambda_cp(b)
        case App(f, a):
            if isinstance(a, StackConst):
                return is_lambda_cp(f)
            return is_lambda_cp(f) and is_lambda_cp(a)
        case _:
            return False


# ---------------------------------------------------------------------------
# Fresh names

def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """Smallest numbered variant of ``base`` not in ``avoid``.

    Deterministic and stateless, so every operation that renames is
    reproducible run to run.
    """
    avoid = set(avoid)
    root = base.rstrip("0123456789") or "x"
    if base not in avoid:
        return base
    i = 1
    while f"{root}{i}" in avoid:
        i += 1
    return f"{root}{i}"


# ---------------------------------------------------------------------------
# Substitution

SubstLike = Union["Substitution", Mapping[str, Term]]


@dataclass(frozen=True)
class Substitution:
    """Simultaneous substitution: lambda-variables to terms, and stack
    constants to argument sequences (the P-substitution part)."""

    vars: Mapping[str, Term]
    stacks: Mapping[str, tuple[Term, ...]] = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "vars", dict(self.vars))
        object.__setattr__(self, "stacks", dict(self.stacks or {}))


def _as_subst(s: SubstLike) -> Substitution:
    if isinstance(s, Substitution):
        return s
    return Substitution(vars=s)


def substitute(t: Term, s: SubstLike) -> Term:
    """Capture-avoiding simultaneous substitution.

    An application ``(u)#p`` with ``#p`` mapped to ``t1, ..., tn`` expands to
    ``(u)t1 ... tn`` (the stack entry itself disappears).
    """
    s = _as_subst(s)
    if not s.vars and not s.stacks:
        return t
    image_fv: set[str] = set()
    image_fmv: set[str] = set()
    for img in s.vars.values():
        image_fv |= free_vars(img)
        image_fmv |= free_mu_vars(img)
    for seq in s.stacks.values():
        for img in seq:
            image_fv |= free_vars(img)
            image_fmv |= free_mu_vars(img)

    def go(t: Term, vmap: dict[str, Term]) -> Term:
        match t:
            case Var(x):
                return vmap.get(x, t)
            case ConstC() | StackConst(_):
                return t
            case App(f, a):
                if isinstance(a, StackConst) and a.name in s.stacks:
                    return app(go(f, vmap), *s.stacks[a.name])
                return App(go(f, vmap), go(a, vmap))
            case Lam(x, b):
                vmap2 = {k: v for k, v in vmap.items() if k != x and k in free_vars(b)}
                if not vmap2 and not s.stacks:
                    return t
                if x in image_fv and vmap2:
                    x2 = fresh_name(x, image_fv | all_var_names(b) | set(vmap2))
                    vmap2[x] = Var(x2)
                    return Lam(x2, go(b, vmap2))
                return Lam(x, go(b, vmap2))
            case Mu(g, d, b):
                vmap2 = {k: v for k, v in vmap.items() if k in free_vars(b)}
                if not vmap2 and not s.stacks:
                    return t
                if g in image_fmv:
                    g2 = fresh_name(g, image_fmv | all_mu_names(b) | {d})
                    b = rename_mu(b, g, g2)
                    d = g2 if d == g else d
                    g = g2
                return Mu(g, d, go(b, vmap2))
        raise TypeError(f"not a term: {t!r}")

    return go(t, dict(s.vars))


def rename_mu(t: Term, old: str, new: str) -> Term:
    """Replace the free mu-variable ``old`` by ``new`` (capture-avoiding)."""
    if old == new or old not in free_mu_vars(t):
        return t
    match t:
        case Lam(x, b):
            return Lam(x, rename_mu(b, old, new))
        case App(f, a):
            return App(rename_mu(f, old, new), rename_mu(a, old, new))
        case Mu(g, d, b):
            if g == old:
                return t
            if g == new:
                g2 = fresh_name(g, all_mu_names(b) | {old, new, d})
                b = rename_mu(b, g, g2)
                d = g2 if d == g else d
                g = g2
            d2 = new if d == old else d
            return Mu(g, d2, rename_mu(b, old, new))
        case _:
            return t


# ---------------------------------------------------------------------------
# Numerals and named combinators

def church(n: int) -> Term:
    """The Church integer: payload argument first, iterator second."""
    if n < 0:
        raise ValueError("church numerals are defined for n >= 0")
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return Lam("x", Lam("f", body))


def _succ() -> Term:
    # (f) applied to ((n)x)f: the only reading giving (succ)n ~ n + 1.
    return lam("n x f", App(Var("f"), app(Var("n"), Var("x"), Var("f"))))


def _delta() -> Term:
    return Lam("f", App(Var("f"), church(0)))


def _g_op() -> Term:
    inner = Lam("z", App(Var("y"), App(_succ(), Var("z"))))
    return lam("x y", App(Var("x"), inner))


def _f_op() -> Term:
    return lam("x y", App(Var("x"), App(_succ(), Var("y"))))


def _t1() -> Term:
    return Lam("n", app(Var("n"), _delta(), _g_op()))


def _t2() -> Term:
    return lam("n f", App(app(Var("n"), Var("f"), _f_op()), church(0)))


def _abort() -> Term:
    return Lam("x", App(C, Lam("y", Var("x"))))


def _cprime() -> Term:
    body = App(Var("x"), Lam("y", App(Var("x"), Lam("z", App(Var("d"), Var("y"))))))
    return Lam("x", App(C, Lam("d", body)))


def _mu_c() -> Term:
    inner = Lam("y", Mu("b", "a", Var("y")))
    return Lam("x", Mu("a", "phi", App(Var("x"), inner)))


_BUILTINS = {
    "succ": _succ,
    "T1": _t1,
    "T2": _t2,
    "abort": _abort,
    "Cprime": _cprime,
    "muC": _mu_c,
}

# internal pieces, exposed for tests and the storage harness
_PARTS = {"delta": _delta, "G": _g_op, "F": _f_op, "zero": lambda: church(0)}


def builtin(name: str) -> Term:
    """Closed combinators written exactly as in the source material."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin {name!r}; known: {sorted(_BUILTINS)}") from None


def part(name: str) -> Term:
    try:
        return _PARTS[name]()
    except KeyError:
        raise ValueError(f"unknown part {name!r}") from None
