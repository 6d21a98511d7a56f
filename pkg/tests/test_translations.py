import random

import pytest

from conftest import random_fo_term, random_formula
from mixlam.formulas import (
    Atom,
    BOT,
    ClassVar,
    FoVar,
    ForallClass,
    ForallSo,
    PredAbs,
    PredVar,
    _pred_arity,
    class_subst,
    ends_with,
    fo_subst,
    formula_class_vars,
    has_class_vars,
    is_classical_type,
    nat_type,
    nat_type_classical,
    nat_type_godel,
    neg,
    prop_nat,
    so_subst,
)
from mixlam.syntax import parse_formula
from mixlam.translations import FreshnessViolation, classical, godel, prop_erase, simple_godel


def test_godel_classical_atom():
    assert godel(parse_formula("Xc(0)")) == parse_formula("~X*(0)")


def test_godel_symbol_atom_unchanged():
    assert godel(parse_formula("D(t)")) == parse_formula("D(t)")


def test_godel_nat():
    assert godel(nat_type_classical(FoVar("x"))) == nat_type_godel(FoVar("x"))


def test_godel_freshness_violation():
    f = parse_formula("Xc(0) -> X*(0)")
    with pytest.raises(FreshnessViolation):
        godel(f)


def test_simple_godel():
    assert simple_godel(nat_type(FoVar("x"))) == nat_type_godel(FoVar("x"))
    assert simple_godel(parse_formula("X(0)")) == parse_formula("~X(0)")
    assert simple_godel(parse_formula("P(0) -> Q(0, 0)")) == parse_formula("~P(0) -> ~Q(0, 0)")
    with pytest.raises(ValueError):
        simple_godel(parse_formula("Xc(0)"))


def test_classical_translation():
    assert classical(parse_formula("forall X (X(0) -> X(0))")) == parse_formula("forall Xc (Xc(0) -> Xc(0))")
    assert classical(parse_formula("D(t)")) == parse_formula("D(t)")
    assert classical(nat_type(FoVar("x"))) == nat_type_classical(FoVar("x"))
    with pytest.raises(ValueError):
        classical(parse_formula("Xc(0)"))


def test_prop_erase():
    assert prop_erase(nat_type(FoVar("x"))) == prop_nat()
    assert prop_erase(parse_formula("D(t)")) == parse_formula("D")
    assert prop_erase(parse_formula("forall x (P(x) -> Q(0, x))")) == parse_formula("P -> Q")


def test_prop_erase_idempotent():
    rng = random.Random(31)
    for _ in range(300):
        f = random_formula(rng, rng.randint(1, 8))
        once = prop_erase(f)
        assert prop_erase(once) == once


def test_godel_removes_classical_variables():
    rng = random.Random(32)
    for _ in range(300):
        f = random_formula(rng, rng.randint(1, 8))
        assert not has_class_vars(godel(f))


def test_godel_of_classical_ends_with_bottom():
    rng = random.Random(33)
    checked = 0
    for _ in range(600):
        f = random_formula(rng, rng.randint(1, 8))
        if not is_classical_type(f):
            continue
        assert ends_with(godel(f), BOT)
        checked += 1
    assert checked > 100


def test_classical_after_godel_not_identity():
    # the two translations do not invert each other; the star names remain
    f = parse_formula("forall Xc Xc(0)")
    assert classical(godel(f)) != f


def test_godel_commutes_with_fo_subst():
    rng = random.Random(34)
    for _ in range(400):
        f = random_formula(rng, rng.randint(1, 8))
        t = random_fo_term(rng)
        assert godel(fo_subst(f, {"x": t})) == fo_subst(godel(f), {"x": t})


def test_godel_commutes_with_so_subst():
    # second clause of the substitution lemma, over ordinary variables
    rng = random.Random(35)
    checked = 0
    for _ in range(600):
        f = random_formula(rng, rng.randint(1, 8))
        ar = _pred_arity(f, "X")
        if ar is None:
            continue
        g = random_formula(rng, rng.randint(1, 5))
        params = tuple(f"w{i}" for i in range(ar))
        lhs = godel(so_subst(f, "X", PredAbs(params, g)))
        rhs = so_subst(godel(f), "X", PredAbs(params, godel(g)))
        assert lhs == rhs, f"\n{f}\n[{g}/X]\n{lhs}\n{rhs}"
        checked += 1
    assert checked > 100
