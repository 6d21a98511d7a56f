"""Formula translations: the Gödel star, the classical lift, and the
propositional erasure.

* ``godel``        -- classical-variable atoms become negated star atoms,
                      classical quantifiers become ordinary quantifiers over
                      the star twin; everything else commutes.
* ``simple_godel`` -- negate every atom (input without classical variables).
* ``classical``    -- every ordinary predicate variable becomes its classical
                      twin; predicate symbols stay.
* ``prop_erase``   -- forget the first-order skeleton: drop first-order
                      quantifiers and the arguments of every atom.
"""

from __future__ import annotations

from .formulas import (
    Arrow,
    Atom,
    Bottom,
    ClassVar,
    Formula,
    ForallClass,
    ForallFo,
    ForallSo,
    PredSym,
    PredVar,
    formula_class_vars,
    has_class_vars,
    neg,
)


class FreshnessViolation(ValueError):
    pass


def star_name(name: str) -> str:
    return name + "*"


def _all_pred_var_names(f: Formula) -> frozenset[str]:
    match f:
        case Atom(PredVar(n), _):
            return frozenset((n,))
        case Arrow(a, b):
            return _all_pred_var_names(a) | _all_pred_var_names(b)
        case ForallSo(x, b):
            return _all_pred_var_names(b) | {x}
        case ForallFo(_, b) | ForallClass(_, b):
            return _all_pred_var_names(b)
        case _:
            return frozenset()


def _all_class_var_names(f: Formula) -> frozenset[str]:
    match f:
        case Atom(ClassVar(n), _):
            return frozenset((n,))
        case Arrow(a, b):
            return _all_class_var_names(a) | _all_class_var_names(b)
        case ForallClass(x, b):
            return _all_class_var_names(b) | {x}
        case ForallFo(_, b) | ForallSo(_, b):
            return _all_class_var_names(b)
        case _:
            return frozenset()


def godel(f: Formula) -> Formula:
    """The Gödel translation into the classical-variable-free fragment."""
    taken = _all_pred_var_names(f)
    for c in _all_class_var_names(f):
        if star_name(c) in taken:
            raise FreshnessViolation(
                f"cannot translate: ordinary variable {star_name(c)!r} already occurs"
            )

    def go(f: Formula) -> Formula:
        match f:
            case Bottom():
                return f
            case Atom(ClassVar(n), args):
                return neg(Atom(PredVar(star_name(n)), args))
            case Atom(_, _):
                return f
            case Arrow(a, b):
                return Arrow(go(a), go(b))
            case ForallFo(x, b):
                return ForallFo(x, go(b))
            case ForallSo(x, b):
                return ForallSo(x, go(b))
            case ForallClass(x, b):
                return ForallSo(star_name(x), go(b))
        raise TypeError(f"not a formula: {f!r}")

    return go(f)


def simple_godel(f: Formula) -> Formula:
    """Negate every atom; defined on formulas without classical variables."""
    if has_class_vars(f):
        raise ValueError("simple_godel takes formulas without classical variables")

    def go(f: Formula) -> Formula:
        match f:
            case Bottom():
                return f
            case Atom(_, _):
                return neg(f)
            case Arrow(a, b):
                return Arrow(go(a), go(b))
            case ForallFo(x, b):
                return ForallFo(x, go(b))
            case ForallSo(x, b):
                return ForallSo(x, go(b))
        raise TypeError(f"unexpected formula node: {f!r}")

    return go(f)


def classical(f: Formula) -> Formula:
    """Rename every ordinary predicate variable to its classical twin."""
    if has_class_vars(f):
        raise ValueError("classical translation takes formulas without classical variables")

    def go(f: Formula) -> Formula:
        match f:
            case Bottom():
                return f
            case Atom(PredVar(n), args):
                return Atom(ClassVar(n), args)
            case Atom(_, _):
                return f
            case Arrow(a, b):
                return Arrow(go(a), go(b))
            case ForallFo(x, b):
                return ForallFo(x, go(b))
            case ForallSo(x, b):
                return ForallClass(x, go(b))
        raise TypeError(f"unexpected formula node: {f!r}")

    return go(f)


def _shadow(p):
    return p  # each n-ary predicate keeps its name as the 0-ary shadow


def prop_erase(f: Formula) -> Formula:
    """Forget the first-order part: drop forall-x and all atom arguments."""
    match f:
        case Bottom():
            return f
        case Atom(p, _):
            return Atom(_shadow(p), ())
        case Arrow(a, b):
            return Arrow(prop_erase(a), prop_erase(b))
        case ForallFo(_, b):
            return prop_erase(b)
        case ForallSo(x, b):
            return ForallSo(x, prop_erase(b))
        case ForallClass(x, b):
            return ForallClass(x, prop_erase(b))
    raise TypeError(f"not a formula: {f!r}")
