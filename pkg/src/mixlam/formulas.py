"""Second-order formulas: syntax, classifications, equations, instantiation.

The formula language has absurdity, implication and three universal
quantifiers (first-order variables, ordinary predicate variables, classical
predicate variables).  Negation is not a connective: ``~A`` always denotes
``A -> _|_``.  Formula equality is alpha-equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence


# ---------------------------------------------------------------------------
# First-order terms

@dataclass(frozen=True)
class FoVar:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class FunApp:
    symbol: str
    args: tuple["FoTerm", ...]


FoTerm = FoVar | Const | FunApp

ZERO = Const("0")


def s_tower(n: int, base: FoTerm = ZERO) -> FoTerm:
    """The numeral term s(...s(base))."""
    t = base
    for _ in range(n):
        t = FunApp("s", (t,))
    return t


def fo_vars(t: FoTerm) -> frozenset[str]:
    match t:
        case FoVar(x):
            return frozenset((x,))
        case FunApp(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= fo_vars(a)
            return out
        case _:
            return frozenset()


def fo_subst_term(t: FoTerm, m: Mapping[str, FoTerm]) -> FoTerm:
    match t:
        case FoVar(x):
            return m.get(x, t)
        case FunApp(f, args):
            return FunApp(f, tuple(fo_subst_term(a, m) for a in args))
        case _:
            return t


def fo_term_size(t: FoTerm) -> int:
    match t:
        case FunApp(_, args):
            return 1 + sum(fo_term_size(a) for a in args)
        case _:
            return 1


def signature_of(terms: Iterable[FoTerm]) -> dict[str, int]:
    """Function-symbol arities used by the given terms; raises on conflicts."""
    sig: dict[str, int] = {}
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, FunApp):
            prev = sig.setdefault(t.symbol, len(t.args))
            if prev != len(t.args):
                raise ValueError(f"symbol {t.symbol!r} used at arities {prev} and {len(t.args)}")
            stack.extend(t.args)
    return sig


# ---------------------------------------------------------------------------
# Predicates and formulas

@dataclass(frozen=True)
class PredSym:
    name: str


@dataclass(frozen=True)
class PredVar:
    name: str


@dataclass(frozen=True)
class ClassVar:
    name: str


Pred = PredSym | PredVar | ClassVar


class Formula:
    """Base class; equality and hashing are alpha-equivalence."""

    __match_args__ = ()

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return formula_canon(self) == formula_canon(other)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash(formula_canon(self))

    def __str__(self) -> str:
        from .syntax import print_formula

        return print_formula(self)


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    pred: Pred
    args: tuple[FoTerm, ...] = ()
    __match_args__ = ("pred", "args")


@dataclass(frozen=True, eq=False)
class Arrow(Formula):
    lhs: Formula
    rhs: Formula
    __match_args__ = ("lhs", "rhs")


@dataclass(frozen=True, eq=False)
class ForallFo(Formula):
    var: str
    body: Formula
    __match_args__ = ("var", "body")


@dataclass(frozen=True, eq=False)
class ForallSo(Formula):
    var: str
    body: Formula
    __match_args__ = ("var", "body")


@dataclass(frozen=True, eq=False)
class ForallClass(Formula):
    var: str
    body: Formula
    __match_args__ = ("var", "body")


BOT = Bottom()


def neg(a: Formula) -> Formula:
    return Arrow(a, BOT)


def arrows(*parts: Formula) -> Formula:
    """F1, ..., Fn -> G as right-nested arrows."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Arrow(p, out)
    return out


def _fo_canon(t: FoTerm, env: dict[str, int]):
    match t:
        case FoVar(x):
            return ("b", env[x]) if x in env else ("f", x)
        case Const(c):
            return ("c", c)
        case FunApp(f, args):
            return ("fn", f, tuple(_fo_canon(a, env) for a in args))


def _formula_canon(f: Formula, fo: dict[str, int], so: dict[str, int], cl: dict[str, int], d: tuple[int, int, int]):
    match f:
        case Bottom():
            return ("bot",)
        case Atom(p, args):
            cargs = tuple(_fo_canon(a, fo) for a in args)
            match p:
                case PredSym(n):
                    return ("atom", "sym", n, cargs)
                case PredVar(n):
                    return ("atom", "so", so[n], cargs) if n in so else ("atom", "sof", n, cargs)
                case ClassVar(n):
                    return ("atom", "cl", cl[n], cargs) if n in cl else ("atom", "clf", n, cargs)
        case Arrow(a, b):
            return ("arr", _formula_canon(a, fo, so, cl, d), _formula_canon(b, fo, so, cl, d))
        case ForallFo(x, b):
            fo2 = dict(fo)
            fo2[x] = d[0]
            return ("fa-fo", _formula_canon(b, fo2, so, cl, (d[0] + 1, d[1], d[2])))
        case ForallSo(x, b):
            so2 = dict(so)
            so2[x] = d[1]
            return ("fa-so", _formula_canon(b, fo, so2, cl, (d[0], d[1] + 1, d[2])))
        case ForallClass(x, b):
            cl2 = dict(cl)
            cl2[x] = d[2]
            return ("fa-cl", _formula_canon(b, fo, so, cl2, (d[0], d[1], d[2] + 1)))
    raise TypeError(f"not a formula: {f!r}")


def formula_canon(f: Formula):
    c = f.__dict__.get("_canon")
    if c is None:
        c = _formula_canon(f, {}, {}, {}, (0, 0, 0))
        object.__setattr__(f, "_canon", c)
    return c


def formula_alpha_eq(a: Formula, b: Formula) -> bool:
    return formula_canon(a) == formula_canon(b)


# ---------------------------------------------------------------------------
# Free variables and substitution in formulas

def formula_fo_vars(f: Formula) -> frozenset[str]:
    cached = f.__dict__.get("_fov")
    if cached is not None:
        return cached
    match f:
        case Atom(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= fo_vars(a)
        case Arrow(a, b):
            out = formula_fo_vars(a) | formula_fo_vars(b)
        case ForallFo(x, b):
            out = formula_fo_vars(b) - {x}
        case ForallSo(_, b) | ForallClass(_, b):
            out = formula_fo_vars(b)
        case _:
            out = frozenset()
    object.__setattr__(f, "_fov", out)
    return out


def formula_pred_vars(f: Formula) -> frozenset[str]:
    """Free ordinary predicate variables."""
    match f:
        case Atom(PredVar(n), _):
            return frozenset((n,))
        case Arrow(a, b):
            return formula_pred_vars(a) | formula_pred_vars(b)
        case ForallSo(x, b):
            return formula_pred_vars(b) - {x}
        case ForallFo(_, b) | ForallClass(_, b):
            return formula_pred_vars(b)
        case _:
            return frozenset()


def formula_class_vars(f: Formula) -> frozenset[str]:
    """Free classical predicate variables."""
    match f:
        case Atom(ClassVar(n), _):
            return frozenset((n,))
        case Arrow(a, b):
            return formula_class_vars(a) | formula_class_vars(b)
        case ForallClass(x, b):
            return formula_class_vars(b) - {x}
        case ForallFo(_, b) | ForallSo(_, b):
            return formula_class_vars(b)
        case _:
            return frozenset()


def has_class_vars(f: Formula) -> bool:
    match f:
        case Atom(ClassVar(_), _) | ForallClass(_, _):
            return True
        case Arrow(a, b):
            return has_class_vars(a) or has_class_vars(b)
        case ForallFo(_, b) | ForallSo(_, b):
            return has_class_vars(b)
        case _:
            return False


def all_fo_names(f: Formula) -> frozenset[str]:
    match f:
        case Atom(_, args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= fo_vars(a)
            return out
        case Arrow(a, b):
            return all_fo_names(a) | all_fo_names(b)
        case ForallFo(x, b):
            return all_fo_names(b) | {x}
        case ForallSo(_, b) | ForallClass(_, b):
            return all_fo_names(b)
        case _:
            return frozenset()


def _fresh(base: str, avoid: set[str]) -> str:
    from .terms import fresh_name

    return fresh_name(base, avoid)


def fo_subst(f: Formula, m: Mapping[str, FoTerm]) -> Formula:
    """First-order substitution in a formula, capture-avoiding."""
    m = {k: v for k, v in m.items() if k in formula_fo_vars(f) or not isinstance(v, FoVar) or v.name != k}
    if not m:
        return f
    img_vars: set[str] = set()
    for v in m.values():
        img_vars |= fo_vars(v)

    def go(f: Formula, m: dict[str, FoTerm]) -> Formula:
        match f:
            case Atom(p, args):
                return Atom(p, tuple(fo_subst_term(a, m) for a in args))
            case Arrow(a, b):
                return Arrow(go(a, m), go(b, m))
            case ForallFo(x, b):
                m2 = {k: v for k, v in m.items() if k != x and k in formula_fo_vars(b)}
                if not m2:
                    return f
                if x in img_vars:
                    x2 = _fresh(x, img_vars | all_fo_names(b) | set(m2))
                    m2[x] = FoVar(x2)
                    return ForallFo(x2, go(b, m2))
                return ForallFo(x, go(b, m2))
            case ForallSo(x, b):
                return ForallSo(x, go(b, m))
            case ForallClass(x, b):
                return ForallClass(x, go(b, m))
            case _:
                return f

    return go(f, dict(m))


@dataclass(frozen=True)
class PredAbs:
    """A predicate abstraction: a formula with distinguished parameters.

    ``PredAbs(("w",), body)`` instantiates an n-ary predicate variable;
    an atom ``X(t)`` becomes ``body[t/w]``.
    """

    params: tuple[str, ...]
    body: Formula

    def apply(self, args: Sequence[FoTerm]) -> Formula:
        if len(args) != len(self.params):
            raise ValueError(f"predicate arity mismatch: {len(self.params)} params, {len(args)} args")
        return fo_subst(self.body, dict(zip(self.params, args)))

    @property
    def arity(self) -> int:
        return len(self.params)

    def __eq__(self, other):
        if not isinstance(other, PredAbs):
            return NotImplemented
        if len(self.params) != len(other.params):
            return False
        fresh = [FoVar(f"&{i}") for i in range(len(self.params))]
        return fo_subst(self.body, dict(zip(self.params, fresh))) == fo_subst(
            other.body, dict(zip(other.params, fresh))
        )

    def __hash__(self):
        fresh = [FoVar(f"&{i}") for i in range(len(self.params))]
        return hash(fo_subst(self.body, dict(zip(self.params, fresh))))

    def __str__(self):
        from .syntax import print_formula

        if not self.params:
            return print_formula(self.body)
        return f"({', '.join(self.params)}) |-> {print_formula(self.body)}"


def _pred_subst(f: Formula, var: str, abs_: PredAbs, classical: bool) -> Formula:
    free_fo = formula_fo_vars(abs_.body) - set(abs_.params)
    free_so = formula_pred_vars(abs_.body)
    free_cl = formula_class_vars(abs_.body)

    def go(f: Formula) -> Formula:
        hit = formula_class_vars(f) if classical else formula_pred_vars(f)
        if var not in hit:
            return f
        match f:
            case Atom(PredVar(n), args) if not classical and n == var:
                return abs_.apply(args)
            case Atom(ClassVar(n), args) if classical and n == var:
                return abs_.apply(args)
            case Atom(_, _):
                return f
            case Arrow(a, b):
                return Arrow(go(a), go(b))
            case ForallFo(x, b):
                if x in free_fo:
                    x2 = _fresh(x, free_fo | all_fo_names(b))
                    b = fo_subst(b, {x: FoVar(x2)})
                    x = x2
                return ForallFo(x, go(b))
            case ForallSo(x, b):
                if x in free_so:
                    x2 = _fresh(x, free_so | _all_pred_names(b))
                    b = so_subst(b, x, identity_abs(x2, _pred_arity(b, x) or 0))
                    x = x2
                return ForallSo(x, go(b))
            case ForallClass(x, b):
                if x in free_cl:
                    x2 = _fresh(x, free_cl | _all_pred_names(b))
                    b = class_subst(b, x, identity_abs(x2, _pred_arity(b, x, classical=True) or 0, classical=True))
                    x = x2
                return ForallClass(x, go(b))
            case _:
                return f

    return go(f)


def _all_pred_names(f: Formula) -> frozenset[str]:
    match f:
        case Atom(PredVar(n), _) | Atom(ClassVar(n), _):
            return frozenset((n,))
        case Arrow(a, b):
            return _all_pred_names(a) | _all_pred_names(b)
        case ForallSo(x, b) | ForallClass(x, b):
            return _all_pred_names(b) | {x}
        case ForallFo(_, b):
            return _all_pred_names(b)
        case _:
            return frozenset()


def so_subst(f: Formula, var: str, abs_: PredAbs) -> Formula:
    """Substitute a predicate abstraction for an ordinary predicate variable."""
    return _pred_subst(f, var, abs_, classical=False)


def class_subst(f: Formula, var: str, abs_: PredAbs) -> Formula:
    """Substitute a predicate abstraction for a classical variable."""
    return _pred_subst(f, var, abs_, classical=True)


# ---------------------------------------------------------------------------
# Library formulas: the integer types

def nat_type(t: FoTerm) -> Formula:
    """forall X { X(0), forall y (X(y) -> X(s y)) -> X(t) }"""
    x = PredVar("X")
    yv = "y" if "y" not in fo_vars(t) else _fresh("y", set(fo_vars(t)))
    step = ForallFo(yv, Arrow(Atom(x, (FoVar(yv),)), Atom(x, (FunApp("s", (FoVar(yv),)),))))
    return ForallSo("X", arrows(Atom(x, (ZERO,)), step, Atom(x, (t,))))


def nat_type_godel(t: FoTerm) -> Formula:
    """forall X { ~X(0), forall y (~X(y) -> ~X(s y)) -> ~X(t) }"""
    x = PredVar("X")
    yv = "y" if "y" not in fo_vars(t) else _fresh("y", set(fo_vars(t)))
    step = ForallFo(yv, Arrow(neg(Atom(x, (FoVar(yv),))), neg(Atom(x, (FunApp("s", (FoVar(yv),)),)))))
    return ForallSo("X", arrows(neg(Atom(x, (ZERO,))), step, neg(Atom(x, (t,)))))


def nat_type_classical(t: FoTerm) -> Formula:
    """forall Xc { Xc(0), forall y (Xc(y) -> Xc(s y)) -> Xc(t) }"""
    x = ClassVar("X")
    yv = "y" if "y" not in fo_vars(t) else _fresh("y", set(fo_vars(t)))
    step = ForallFo(yv, Arrow(Atom(x, (FoVar(yv),)), Atom(x, (FunApp("s", (FoVar(yv),)),))))
    return ForallClass("X", arrows(Atom(x, (ZERO,)), step, Atom(x, (t,))))


def prop_nat() -> Formula:
    """forall X { X, (X -> X) -> X } (the propositional trace)."""
    x = Atom(PredVar("X"))
    return ForallSo("X", arrows(x, Arrow(x, x), x))


def prop_nat_godel() -> Formula:
    x = Atom(PredVar("X"))
    return ForallSo("X", arrows(neg(x), Arrow(neg(x), neg(x)), neg(x)))


def prop_nat_classical() -> Formula:
    x = Atom(ClassVar("X"))
    return ForallClass("X", arrows(x, Arrow(x, x), x))


def double_neg_elim_ordinary() -> Formula:
    """forall X { ~~X -> X } (the control constant's ordinary type)."""
    x = Atom(PredVar("X"))
    return ForallSo("X", Arrow(neg(neg(x)), x))


def double_neg_elim_classical() -> Formula:
    """forall Xc { ~~Xc -> Xc } (the control constant's mixed type)."""
    x = Atom(ClassVar("X"))
    return ForallClass("X", Arrow(neg(neg(x)), x))


# ---------------------------------------------------------------------------
# Syntactic classifications

def ends_with(f: Formula, target) -> bool:
    """True iff f is built from the target atom by prefixing premises and
    quantifiers.  ``target`` is a Pred or Bottom (the instance BOT works)."""
    match f:
        case Bottom():
            return isinstance(target, Bottom)
        case Atom(p, _):
            return p == target
        case Arrow(_, b):
            return ends_with(b, target)
        case ForallFo(_, b) | ForallSo(_, b) | ForallClass(_, b):
            return ends_with(b, target)
    return False


def final_atom(f: Formula):
    """The atom or Bottom a formula ends with."""
    match f:
        case Arrow(_, b):
            return final_atom(b)
        case ForallFo(_, b) | ForallSo(_, b) | ForallClass(_, b):
            return final_atom(b)
        case _:
            return f


def is_classical_type(f: Formula) -> bool:
    """Ends with absurdity or with a classical variable."""
    end = final_atom(f)
    if isinstance(end, Bottom):
        return True
    return isinstance(end, Atom) and isinstance(end.pred, ClassVar)


class PolarityClass(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    BOTH = "both"
    NEITHER = "neither"


def _polarity(f: Formula) -> tuple[bool, bool]:
    """(in forall-positive set, in forall-negative set)."""
    match f:
        case Bottom() | Atom(_, _):
            return True, True
        case Arrow(a, b):
            ap, an = _polarity(a)
            bp, bn = _polarity(b)
            return (an and bp), (ap and bn)
        case ForallFo(_, b):
            return _polarity(b)
        case ForallSo(x, b):
            bp, bn = _polarity(b)
            return bp, (bn and x not in formula_pred_vars(b))
        case ForallClass(_, _):
            return False, False
    raise TypeError(f"not a formula: {f!r}")


def polarity(f: Formula) -> PolarityClass:
    pos, negv = _polarity(f)
    if pos and negv:
        return PolarityClass.BOTH
    if pos:
        return PolarityClass.POSITIVE
    if negv:
        return PolarityClass.NEGATIVE
    return PolarityClass.NEITHER


# ---------------------------------------------------------------------------
# Equational reasoning

class Inconclusive:
    """Singleton result for bounded procedures that ran out of budget."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Inconclusive"

    def __bool__(self):
        raise TypeError("Inconclusive is neither True nor False; compare explicitly")


INCONCLUSIVE = Inconclusive()

Equation = tuple[FoTerm, FoTerm]


def _match_fo(pattern: FoTerm, t: FoTerm, binding: dict[str, FoTerm]) -> bool:
    match pattern:
        case FoVar(x):
            if x in binding:
                return binding[x] == t
            binding[x] = t
            return True
        case Const(c):
            return isinstance(t, Const) and t.name == c
        case FunApp(f, args):
            if not isinstance(t, FunApp) or t.symbol != f or len(t.args) != len(args):
                return False
            return all(_match_fo(p, a, binding) for p, a in zip(args, t.args))
    return False


def _rewrite_once(t: FoTerm, rules: Sequence[Equation]) -> FoTerm | None:
    for lhs, rhs in rules:
        b: dict[str, FoTerm] = {}
        if _match_fo(lhs, t, b):
            return fo_subst_term(rhs, b)
    match t:
        case FunApp(f, args):
            for i, a in enumerate(args):
                r = _rewrite_once(a, rules)
                if r is not None:
                    return FunApp(f, args[:i] + (r,) + args[i + 1 :])
    return None


def _normalize(t: FoTerm, rules: Sequence[Equation], budget: int) -> FoTerm | None:
    """Rewrite to normal form, or None if the budget ran out."""
    for _ in range(budget):
        r = _rewrite_once(t, rules)
        if r is None:
            return t
        t = r
    return None


def _orient(eqs: Sequence[Equation]) -> list[Equation] | None:
    """Orient every equation size-decreasing, or None if one resists."""
    rules = []
    for l, r in eqs:
        if fo_term_size(l) > fo_term_size(r) and fo_vars(r) <= fo_vars(l):
            rules.append((l, r))
        elif fo_term_size(r) > fo_term_size(l) and fo_vars(l) <= fo_vars(r):
            rules.append((r, l))
        else:
            return None
    return rules


def _subterms(t: FoTerm):
    yield t
    if isinstance(t, FunApp):
        for a in t.args:
            yield from _subterms(a)


def _rename_apart(eq: Equation, taken: frozenset[str]) -> Equation:
    ren = {}
    avoid = set(taken)
    for v in sorted(fo_vars(eq[0]) | fo_vars(eq[1])):
        nv = _fresh(v, avoid)
        ren[v] = FoVar(nv)
        avoid.add(nv)
    return fo_subst_term(eq[0], ren), fo_subst_term(eq[1], ren)


def _orthogonal(rules: Sequence[Equation]) -> bool:
    """Left-linear and non-overlapping; such systems are confluent."""

    def linear(t: FoTerm, seen: set[str]) -> bool:
        match t:
            case FoVar(x):
                if x in seen:
                    return False
                seen.add(x)
                return True
            case FunApp(_, args):
                return all(linear(a, seen) for a in args)
        return True

    for l, _ in rules:
        if not linear(l, set()):
            return False
    for i, (l1, _) in enumerate(rules):
        for j, eq2 in enumerate(rules):
            l2 = _rename_apart(eq2, fo_vars(l1))[0]
            for sub in _subterms(l1):
                if isinstance(sub, FoVar):
                    continue
                if i == j and sub is l1:
                    continue  # trivial self-overlap at the root
                if _unifiable(sub, l2):
                    return False
    return True


def _unifiable(a: FoTerm, b: FoTerm) -> bool:
    subst: dict[str, FoTerm] = {}

    def walk(t: FoTerm) -> FoTerm:
        while isinstance(t, FoVar) and t.name in subst:
            t = subst[t.name]
        return t

    def occurs(x: str, t: FoTerm) -> bool:
        t = walk(t)
        if isinstance(t, FoVar):
            return t.name == x
        if isinstance(t, FunApp):
            return any(occurs(x, a) for a in t.args)
        return False

    def unify(a: FoTerm, b: FoTerm) -> bool:
        a, b = walk(a), walk(b)
        if isinstance(a, FoVar):
            if isinstance(b, FoVar) and b.name == a.name:
                return True
            if occurs(a.name, b):
                return False
            subst[a.name] = b
            return True
        if isinstance(b, FoVar):
            return unify(b, a)
        if isinstance(a, Const) and isinstance(b, Const):
            return a.name == b.name
        if isinstance(a, FunApp) and isinstance(b, FunApp):
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                return False
            return all(unify(x, y) for x, y in zip(a.args, b.args))
        return False

    return unify(a, b)


@dataclass(frozen=True)
class EquationSet:
    """A finite set of equations, implicitly universally quantified."""

    equations: tuple[Equation, ...]

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)

    def __contains__(self, eq: Equation) -> bool:
        for l, r in self.equations:
            if _eq_variants((l, r), eq) or _eq_variants((r, l), eq):
                return True
        return False


def _eq_variants(a: Equation, b: Equation) -> bool:
    """Equality of equations up to renaming of their variables."""
    b1: dict[str, FoTerm] = {}
    b2: dict[str, FoTerm] = {}
    return (
        _match_fo(a[0], b[0], b1)
        and _match_fo(a[1], b[1], b1)
        and all(isinstance(v, FoVar) for v in b1.values())
        and len({v.name for v in b1.values()}) == len(b1)
        and _match_fo(b[0], a[0], b2)
        and _match_fo(b[1], a[1], b2)
    )


INTEGER_EQUATIONS = EquationSet(
    (
        (FunApp("p", (ZERO,)), ZERO),
        (FunApp("p", (FunApp("s", (FoVar("x"),)),)), FoVar("x")),
    )
)


def equal_modulo(eqs: EquationSet | Sequence[Equation], a: FoTerm, b: FoTerm, budget: int = 2000):
    """Decide whether two first-order terms are equal modulo the equations.

    A size-decreasing orientation that is orthogonal gives a decision
    procedure (normalize and compare).  Otherwise a bounded bidirectional
    search runs; exhaustion returns INCONCLUSIVE rather than a verdict.
    """
    eqs = tuple(eqs)
    if a == b:
        return True
    if not eqs:
        return False
    rules = _orient(eqs)
    if rules is not None:
        na = _normalize(a, rules, budget)
        nb = _normalize(b, rules, budget)
        if na is not None and nb is not None:
            if na == nb:
                return True
            if _orthogonal(rules):
                return False
            # terminating but confluence unknown: fall back to search
    return _bounded_join_search(eqs, a, b, budget)


def _neighbors(t: FoTerm, eqs: Sequence[Equation], cap: int):
    for l, r in eqs:
        for pat, rep in ((l, r), (r, l)):
            yield from _rewrites_at(t, pat, rep, cap)


def _rewrites_at(t: FoTerm, pat: FoTerm, rep: FoTerm, cap: int):
    b: dict[str, FoTerm] = {}
    if _match_fo(pat, t, b):
        out = fo_subst_term(rep, b)
        if fo_term_size(out) <= cap:
            yield out
    if isinstance(t, FunApp):
        for i, a in enumerate(t.args):
            for r in _rewrites_at(a, pat, rep, cap):
                yield FunApp(t.symbol, t.args[:i] + (r,) + t.args[i + 1 :])


def _bounded_join_search(eqs, a, b, budget):
    cap = max(fo_term_size(a), fo_term_size(b)) + 6
    seen_a, seen_b = {a}, {b}
    frontier_a, frontier_b = [a], [b]
    spent = 0
    while (frontier_a or frontier_b) and spent < budget:
        if seen_a & seen_b:
            return True
        next_a = []
        for t in frontier_a:
            for nb in _neighbors(t, eqs, cap):
                spent += 1
                if nb not in seen_a:
                    seen_a.add(nb)
                    next_a.append(nb)
        frontier_a = next_a
        if seen_a & seen_b:
            return True
        next_b = []
        for t in frontier_b:
            for nb in _neighbors(t, eqs, cap):
                spent += 1
                if nb not in seen_b:
                    seen_b.add(nb)
                    next_b.append(nb)
        frontier_b = next_b
    if seen_a & seen_b:
        return True
    if not frontier_a and not frontier_b:
        return False  # both closures exhausted under the size cap
    return INCONCLUSIVE


def formula_equal_modulo(eqs, a: Formula, b: Formula, budget: int = 2000):
    """Formula equality where first-order arguments compare modulo equations.

    The connective skeleton must match up to alpha (bound names compared via
    parallel environments, as in canonicalisation); atom arguments compare
    with ``equal_modulo``.
    """
    eqs = tuple(eqs)

    def pred_key(p, so_env, cl_env):
        match p:
            case PredSym(n):
                return ("sym", n)
            case PredVar(n):
                return ("so", so_env[n]) if n in so_env else ("sof", n)
            case ClassVar(n):
                return ("cl", cl_env[n]) if n in cl_env else ("clf", n)

    def go(a, b, env_a, env_b):
        fo_a, so_a, cl_a = env_a
        fo_b, so_b, cl_b = env_b
        match (a, b):
            case (Bottom(), Bottom()):
                return True
            case (Atom(p, aa), Atom(q, ba)):
                if len(aa) != len(ba):
                    return False
                if pred_key(p, so_a, cl_a) != pred_key(q, so_b, cl_b):
                    return False
                inconclusive = False
                for x, y in zip(aa, ba):
                    # bound first-order names are aligned by renaming a's to b's
                    x = fo_subst_term(x, {k: FoVar(v) for k, v in fo_a.items()})
                    y = fo_subst_term(y, {k: FoVar(v) for k, v in fo_b.items()})
                    r = equal_modulo(eqs, x, y, budget)
                    if r is INCONCLUSIVE:
                        inconclusive = True
                    elif not r:
                        return False
                return INCONCLUSIVE if inconclusive else True
            case (Arrow(a1, b1), Arrow(a2, b2)):
                r1 = go(a1, a2, env_a, env_b)
                if r1 is False:
                    return False
                r2 = go(b1, b2, env_a, env_b)
                if r2 is False:
                    return False
                return INCONCLUSIVE if INCONCLUSIVE in (r1, r2) else True
            case (ForallFo(x, b1), ForallFo(y, b2)):
                fresh = f"&{len(fo_a)}"
                return go(b1, b2, ({**fo_a, x: fresh}, so_a, cl_a), ({**fo_b, y: fresh}, so_b, cl_b))
            case (ForallSo(x, b1), ForallSo(y, b2)):
                k = len(so_a)
                return go(b1, b2, (fo_a, {**so_a, x: k}, cl_a), (fo_b, {**so_b, y: k}, cl_b))
            case (ForallClass(x, b1), ForallClass(y, b2)):
                k = len(cl_a)
                return go(b1, b2, (fo_a, so_a, {**cl_a, x: k}), (fo_b, so_b, {**cl_b, y: k}))
            case _:
                return False

    return go(a, b, ({}, {}, {}), ({}, {}, {}))


def _pred_arity(f: Formula, var: str, classical: bool = False) -> int | None:
    match f:
        case Atom(PredVar(n), args) if not classical and n == var:
            return len(args)
        case Atom(ClassVar(n), args) if classical and n == var:
            return len(args)
        case Arrow(a, b):
            r = _pred_arity(a, var, classical)
            return r if r is not None else _pred_arity(b, var, classical)
        case ForallFo(_, b):
            return _pred_arity(b, var, classical)
        case ForallSo(x, b):
            if not classical and x == var:
                return None
            return _pred_arity(b, var, classical)
        case ForallClass(x, b):
            if classical and x == var:
                return None
            return _pred_arity(b, var, classical)
    return None


def identity_abs(var: str, arity: int, classical: bool = False) -> PredAbs:
    params = tuple(f"w{i}" for i in range(arity))
    pred = ClassVar(var) if classical else PredVar(var)
    return PredAbs(params, Atom(pred, tuple(FoVar(p) for p in params)))


# ---------------------------------------------------------------------------
# Adequacy with the integers

def ground_terms(sig: Mapping[str, int], max_size: int):
    """Enumerate ground terms over {0} + the signature up to a size bound."""
    by_size: dict[int, list[FoTerm]] = {1: [ZERO]}
    for size in range(2, max_size + 1):
        out: list[FoTerm] = []
        for sym, arity in sorted(sig.items()):
            if arity == 0:
                continue
            for split in _compositions(size - 1, arity):
                for combo in itertools.product(*(by_size.get(k, []) for k in split)):
                    out.append(FunApp(sym, combo))
        by_size[size] = out
    for size in range(1, max_size + 1):
        yield from by_size.get(size, [])


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def check_adequate(eqs: EquationSet | Sequence[Equation], budget: int = 2000, max_size: int = 5):
    """Search ground terms for a violation of adequacy with the integers:
    s(a) ~ 0, or s(a) ~ s(b) with a and b inequivalent."""
    eqs = tuple(eqs)
    sig = signature_of(t for eq in eqs for t in eq)
    sig.setdefault("s", 1)
    inconclusive = False
    terms = list(ground_terms(sig, max_size))
    for a in terms:
        r = equal_modulo(eqs, FunApp("s", (a,)), ZERO, budget)
        if r is True:
            return False
        if r is INCONCLUSIVE:
            inconclusive = True
    for a, b in itertools.combinations(terms, 2):
        r = equal_modulo(eqs, FunApp("s", (a,)), FunApp("s", (b,)), budget)
        if r is INCONCLUSIVE:
            inconclusive = True
        elif r is True:
            r2 = equal_modulo(eqs, a, b, budget)
            if r2 is False:
                return False
            if r2 is INCONCLUSIVE:
                inconclusive = True
    return INCONCLUSIVE if inconclusive else True


# ---------------------------------------------------------------------------
# The instantiation preorder

@dataclass(frozen=True)
class InstStep:
    """One instantiation step: kind is 'fo', 'so' or 'class'."""

    kind: str
    var: str
    witness: "FoTerm | PredAbs"


@dataclass(frozen=True)
class InstWitness:
    steps: tuple[InstStep, ...]


def apply_inst_step(f: Formula, step: InstStep) -> Formula:
    match (step.kind, f):
        case ("fo", ForallFo(x, b)):
            return fo_subst(b, {x: step.witness})
        case ("so", ForallSo(x, b)):
            return so_subst(b, x, step.witness)
        case ("class", ForallClass(x, b)):
            if not is_classical_type(step.witness.body):
                raise ValueError("classical-variable instantiation requires a classical type")
            return class_subst(b, x, step.witness)
    raise ValueError(f"instantiation step {step.kind!r} does not apply to {f}")


def instantiates(a: Formula, b: Formula, witnesses: Sequence[InstStep] | None = None):
    """Decide the bounded instantiation chain from a to b.

    With explicit witnesses the chain is replayed and verified.  Without,
    witnesses are inferred by structural matching (sound: every candidate is
    verified by substitution; incomplete in exotic higher-arity cases).
    Returns an InstWitness or None.
    """
    if witnesses is not None:
        cur = a
        try:
            for step in witnesses:
                cur = apply_inst_step(cur, step)
        except ValueError:
            return None
        return InstWitness(tuple(witnesses)) if cur == b else None

    def search(f: Formula, steps: list[InstStep]) -> InstWitness | None:
        if f == b:
            return InstWitness(tuple(steps))
        match f:
            case ForallFo(x, body):
                for u in _fo_witness_candidates(body, b, x):
                    nxt = fo_subst(body, {x: u})
                    r = search(nxt, steps + [InstStep("fo", x, u)])
                    if r is not None:
                        return r
            case ForallSo(x, body):
                for g in _pred_witness_candidates(body, b, x, classical=False):
                    nxt = so_subst(body, x, g)
                    r = search(nxt, steps + [InstStep("so", x, g)])
                    if r is not None:
                        return r
            case ForallClass(x, body):
                for g in _pred_witness_candidates(body, b, x, classical=True):
                    if not is_classical_type(g.body):
                        continue
                    nxt = class_subst(body, x, g)
                    r = search(nxt, steps + [InstStep("class", x, g)])
                    if r is not None:
                        return r
        return None

    return search(a, [])


def _fo_witness_candidates(body: Formula, target: Formula, x: str):
    """Candidate first-order witnesses from aligning body with target."""
    if x not in formula_fo_vars(body):
        yield ZERO
        return
    found: list[FoTerm] = []

    def align(f: Formula, g: Formula):
        match (f, g):
            case (Atom(_, aargs), Atom(_, bargs)) if len(aargs) == len(bargs):
                for p, t in zip(aargs, bargs):
                    align_term(p, t)
            case (Arrow(a1, b1), Arrow(a2, b2)):
                align(a1, a2)
                align(b1, b2)
            case (ForallFo(v, b1), ForallFo(_, b2)):
                if v != x:
                    align(b1, b2)
            case (ForallSo(_, b1), ForallSo(_, b2)) | (ForallClass(_, b1), ForallClass(_, b2)):
                align(b1, b2)
            case (ForallFo(v, b1), _):
                # a still-unstripped quantifier on the pattern side only
                if v != x:
                    align(b1, g)
            case (ForallSo(_, b1), _) | (ForallClass(_, b1), _):
                align(b1, g)
            case _:
                pass

    def align_term(p: FoTerm, t: FoTerm):
        match p:
            case FoVar(v) if v == x:
                found.append(t)
            case FunApp(f, pargs):
                if isinstance(t, FunApp) and t.symbol == f and len(t.args) == len(pargs):
                    for pp, tt in zip(pargs, t.args):
                        align_term(pp, tt)
            case _:
                pass

    align(body, target)
    seen = set()
    for u in found:
        if u not in seen:
            seen.add(u)
            yield u


def _pred_witness_candidates(body: Formula, target: Formula, x: str, classical: bool):
    """Candidate predicate abstractions from aligning body with target."""
    arity = _pred_arity(body, x, classical)
    if arity is None:
        yield PredAbs((), BOT)
        yield identity_abs(x, 0, classical)
        return
    found: list[tuple[tuple[FoTerm, ...], Formula]] = []

    def align(f: Formula, g: Formula):
        match (f, g):
            case (Atom(PredVar(n), args), _) if not classical and n == x:
                found.append((args, g))
            case (Atom(ClassVar(n), args), _) if classical and n == x:
                found.append((args, g))
            case (Arrow(a1, b1), Arrow(a2, b2)):
                align(a1, a2)
                align(b1, b2)
            case (ForallFo(_, b1), ForallFo(_, b2)):
                align(b1, b2)
            case (ForallSo(v, b1), ForallSo(_, b2)):
                if not (not classical and v == x):
                    align(b1, b2)
            case (ForallClass(v, b1), ForallClass(_, b2)):
                if not (classical and v == x):
                    align(b1, b2)
            case (ForallFo(_, b1), _):
                align(b1, g)
            case (ForallSo(v, b1), _):
                if not (not classical and v == x):
                    align(b1, g)
            case (ForallClass(v, b1), _):
                if not (classical and v == x):
                    align(b1, g)
            case _:
                pass

    align(body, target)
    params = tuple(f"w{i}" for i in range(arity))
    emitted = set()
    for args, sub in found:
        cands = []
        if all(isinstance(a, FoVar) for a in args) and len({a.name for a in args}) == len(args):
            cands.append(PredAbs(params, fo_subst(sub, {a.name: FoVar(p) for a, p in zip(args, params)})))
        cands.append(PredAbs(params, sub))  # constant-in-parameters reading
        for g in cands:
            if g not in emitted:
                emitted.add(g)
                yield g
