import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_lambda_cp_term, random_pure_term
from mixlam.terms import (
    App,
    C,
    Lam,
    Mu,
    StackConst,
    Substitution,
    Var,
    alpha_eq,
    app,
    builtin,
    church,
    free_vars,
    is_lambda_cp,
    part,
    stack_consts,
    substitute,
)
from mixlam.syntax import parse_term


def test_substitute_direct_hit():
    assert substitute(Var("x"), {"x": parse_term(r"\y. y")}) == parse_term(r"\y. y")


def test_substitute_capture_avoidance():
    out = substitute(parse_term(r"\x. x y"), {"y": Var("x")})
    assert out == parse_term(r"\z. z x")
    assert out != parse_term(r"\x. x x")


def test_substitute_stack_expansion():
    s = Substitution(vars={}, stacks={"p": (Var("u1"), Var("u2"))})
    assert substitute(App(Var("t"), StackConst("p")), s) == parse_term("t u1 u2")


def test_substitute_stack_empty_vector():
    s = Substitution(vars={}, stacks={"p": ()})
    assert substitute(App(Var("t"), StackConst("p")), s) == Var("t")


def test_substitute_applies_to_function_position_of_stack_app():
    s = Substitution(vars={"t": Var("w")}, stacks={"p": (Var("u"),)})
    assert substitute(App(Var("t"), StackConst("p")), s) == parse_term("w u")


def test_alpha_eq_examples():
    assert alpha_eq(parse_term(r"\x. x"), parse_term(r"\y. y"))
    assert alpha_eq(parse_term(r"\x. \y. x y"), parse_term(r"\y. \x. y x"))
    assert not alpha_eq(parse_term(r"\x. x"), parse_term(r"\x. x x"))


def test_alpha_eq_mu_binders():
    assert alpha_eq(parse_term("mu a.[a] x"), parse_term("mu b.[b] x"))
    assert not alpha_eq(parse_term("mu a.[a] x"), parse_term("mu a.[c] x"))
    assert alpha_eq(parse_term(r"\x. mu a.[d] x"), parse_term(r"\y. mu b.[d] y"))


def test_free_vars_examples():
    assert free_vars(parse_term(r"\x. x y")) == {"y"}
    assert free_vars(parse_term(r"\x. x")) == set()
    assert free_vars(App(C, Var("x"))) == {"x"}
    assert stack_consts(parse_term(r"t #p")) == {"p"}


def test_church_examples():
    assert church(0) == parse_term(r"\x. \f. x")
    assert church(1) == parse_term(r"\x. \f. f x")
    assert church(2) == parse_term(r"\x. \f. f (f x)")


def test_church_closed_and_injective():
    numerals = [church(n) for n in range(20)]
    for t in numerals:
        assert not free_vars(t)
    assert len({t for t in numerals}) == 20


def test_builtin_succ_shape():
    # (f) applied to ((n)x)f, the reading that types at the successor type
    assert builtin("succ") == parse_term(r"\n. \x. \f. f (n x f)")


def test_builtin_abort_shape():
    assert builtin("abort") == parse_term(r"\x. C (\y. x)")


def test_builtin_t1_shape():
    delta = parse_term(r"\f. f (\x. \f. x)")
    g = parse_term(r"\x. \y. x (\z. y ((\n. \x. \f. f (n x f)) z))")
    assert part("delta") == delta
    assert part("G") == g
    assert builtin("T1") == Lam("n", app(Var("n"), delta, g))


def test_builtin_mu_c():
    t = builtin("muC")
    assert isinstance(t, Lam)
    assert t == parse_term(r"\x. mu a.[phi] x (\y. mu b.[a] y)")


def test_builtin_unknown():
    with pytest.raises(ValueError):
        builtin("nope")


def test_is_lambda_cp():
    assert is_lambda_cp(parse_term(r"\x. x (t #p)"))
    assert is_lambda_cp(app(C, Var("t"), StackConst("p")))
    assert not is_lambda_cp(StackConst("p"))
    assert not is_lambda_cp(App(StackConst("p"), Var("x")))
    assert not is_lambda_cp(Lam("x", StackConst("p")))


def test_substitution_composition_disjoint():
    rng = random.Random(7)
    for _ in range(200):
        t = random_pure_term(rng, rng.randint(2, 10), pool=("a", "b"))
        u = random_pure_term(rng, 4, pool=("c",))
        v = random_pure_term(rng, 4, pool=("d",))
        both = substitute(t, {"a": u, "b": v})
        sequential = substitute(substitute(t, {"a": u}), {"b": v})
        assert alpha_eq(both, sequential)


def test_substitute_preserves_lambda_cp():
    rng = random.Random(8)
    for _ in range(200):
        t = random_lambda_cp_term(rng, rng.randint(2, 10))
        image = random_lambda_cp_term(rng, 4, stacks=("r",))
        s = Substitution(vars={"a": image}, stacks={"p": (Var("b"), StackConst("r"))})
        assert is_lambda_cp(substitute(t, s))


def test_substitute_respects_alpha():
    rng = random.Random(9)
    for _ in range(200):
        t = random_pure_term(rng, rng.randint(2, 10))
        renamed = substitute(t, {})
        u = random_pure_term(rng, 4)
        a = substitute(t, {"a": u})
        # build an alpha-variant by round-tripping through fresh binder names
        variant = substitute(t, {"a": Var("a")})
        assert alpha_eq(substitute(variant, {"a": u}), a)
        assert alpha_eq(renamed, t)


@st.composite
def _hyp_terms(draw, depth=0):
    kind = draw(st.integers(0, 2 if depth < 4 else 0))
    if kind == 0:
        return Var(draw(st.sampled_from("abcxyz")))
    if kind == 1:
        return Lam(draw(st.sampled_from("xyz")), draw(_hyp_terms(depth + 1)))
    return App(draw(_hyp_terms(depth + 1)), draw(_hyp_terms(depth + 1)))


@given(_hyp_terms(), _hyp_terms(), _hyp_terms())
@settings(max_examples=150, deadline=None)
def test_alpha_eq_is_equivalence(a, b, c):
    assert alpha_eq(a, a)
    if alpha_eq(a, b):
        assert alpha_eq(b, a)
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


def test_mu_substitution_avoids_mu_capture():
    # pushing a term with a free mu-variable under a binder of the same name
    from mixlam.terms import free_mu_vars

    image = parse_term("mu b.[a] z")
    out = substitute(parse_term("mu a.[d] y"), {"y": image})
    assert isinstance(out, Mu)
    assert "a" in free_mu_vars(out)  # the image's free 'a' stayed free
    assert alpha_eq(out, Mu("e", "d", image))
