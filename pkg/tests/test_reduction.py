import random

import pytest

from conftest import (
    naive_beta_normalize,
    random_lambda_c_term,
    random_lambda_cp_term,
    random_mu_term,
    random_pure_term,
)
from mixlam.formulas import INCONCLUSIVE
from mixlam.reduction import (
    Budget,
    BudgetExhausted,
    NotSolvable,
    NotWithinBudget,
    PreconditionViolated,
    Solvable,
    beta_normalize,
    head_c_reduce,
    head_reduce,
    is_c_solvable,
    is_mu_normal,
    mu_head_equiv,
    mu_reduce,
    stack_reduce,
)
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
    substitute,
)
from mixlam.syntax import parse_term

DIVERGER = parse_term(r"(\x. x x) (\x. x x)")


# ---------------------------------------------------------------------------
# Head reduction

def test_head_reduce_redex():
    tr = head_reduce(App(parse_term(r"\x. x"), Var("y")))
    assert tr.final == Var("y") and tr.step_count == 1


def test_head_reduce_church_cross_checked():
    t = app(church(2), Var("a"), Var("f"))
    tr = head_reduce(t)
    oracle = naive_beta_normalize(t)
    assert alpha_eq(tr.final, oracle)
    assert tr.final == parse_term("f (f a)")


def test_head_reduce_stops_at_head_normal_form():
    t = parse_term(r"\x. x ((\y. y) z)")
    tr = head_reduce(t)
    assert tr.step_count == 0 and tr.final == t


def test_head_reduce_rejects_control_and_stack():
    with pytest.raises(PreconditionViolated):
        head_reduce(App(C, Var("x")))
    with pytest.raises(PreconditionViolated):
        head_reduce(App(Var("x"), StackConst("p")))


def test_head_reduce_budget():
    with pytest.raises(BudgetExhausted):
        head_reduce(DIVERGER, 100)


# ---------------------------------------------------------------------------
# Head C-reduction

def test_control_rule_single_step():
    tr = head_c_reduce(app(C, Var("t"), Var("u"), Var("v")))
    assert tr.step_count == 1
    assert tr.final == parse_term(r"t (\x. x u v)")
    assert tr.steps[0].rule == "control"


def test_control_rule_no_arguments():
    tr = head_c_reduce(App(C, Var("t")))
    assert tr.final == parse_term(r"t (\x. x)")


def test_abort_behaviour():
    tr = head_c_reduce(app(builtin("abort"), Var("t"), Var("t1"), Var("t2")))
    assert tr.final == Var("t")


def test_head_c_on_variable():
    tr = head_c_reduce(Var("x"))
    assert tr.step_count == 0


def test_head_c_specializes_to_head_on_pure_terms():
    rng = random.Random(11)
    for _ in range(300):
        t = random_pure_term(rng, rng.randint(2, 12))
        try:
            pure = head_reduce(t, 300)
        except BudgetExhausted:
            continue
        control = head_c_reduce(t, 300)
        assert [s.term for s in pure.steps] == [s.term for s in control.steps]
        assert [s.rule for s in pure.steps] == [s.rule for s in control.steps]
        assert [s.path for s in pure.steps] == [s.path for s in control.steps]


def test_head_c_substitution_stability():
    # a head C-step survives any substitution, with the same step count
    rng = random.Random(12)
    checked = 0
    for _ in range(300):
        t = random_lambda_c_term(rng, rng.randint(3, 12))
        try:
            tr = head_c_reduce(t, 200)
        except BudgetExhausted:
            continue
        if not tr.steps or not free_vars(t):
            continue
        sub = {v: random_lambda_c_term(rng, 3) for v in list(free_vars(t))[:2]}
        st_ = substitute(t, sub)
        target = substitute(tr.final, sub)
        try:
            tr2 = head_c_reduce(st_, 400)
        except BudgetExhausted:
            continue
        terms = list(tr2.terms())
        k = tr.step_count
        assert k < len(terms) and terms[k] == target
        checked += 1
    assert checked > 50


# ---------------------------------------------------------------------------
# Stack reduction

def test_stack_rule_one():
    tr = stack_reduce(App(parse_term(r"\x. x #p"), Var("y")))
    assert tr.final == App(Var("y"), StackConst("p"))


def test_stack_rule_two():
    tr = stack_reduce(app(C, Var("t"), StackConst("p")))
    assert tr.final == parse_term(r"t (\x. x #p)")


def test_stack_zero_protocol():
    tr = stack_reduce(app(church(0), Var("x"), Var("g"), StackConst("p")))
    assert tr.final == App(Var("x"), StackConst("p"))


def test_stack_constant_never_substituted():
    # rule 1 requires the substituted argument to be a proper term
    t = App(Lam("x", App(Var("x"), Var("u"))), StackConst("p"))
    tr = stack_reduce(t)
    assert tr.step_count == 0  # stuck, not reduced


def test_stack_requires_argument_positions():
    with pytest.raises(PreconditionViolated):
        stack_reduce(App(StackConst("p"), Var("x")))


def test_stack_p_substitution_stability():
    # Lemma-style transport: each stack step survives a P-substitution
    rng = random.Random(13)
    checked = 0
    for _ in range(300):
        t = random_lambda_cp_term(rng, rng.randint(3, 12))
        try:
            tr = stack_reduce(t, 200)
        except BudgetExhausted:
            continue
        if not tr.steps:
            continue
        sigma = Substitution(
            vars={v: random_lambda_cp_term(rng, 3, stacks=("r",)) for v in list(free_vars(t))[:2]},
            stacks={"p": (Var("m"), StackConst("r")), "q": ()},
        )
        start = substitute(t, sigma)
        target = substitute(tr.final, sigma)
        try:
            tr2 = stack_reduce(start, 400)
        except BudgetExhausted:
            continue
        terms = list(tr2.terms())
        k = tr.step_count
        assert k < len(terms) and terms[k] == target
        checked += 1
    assert checked > 50


# ---------------------------------------------------------------------------
# Beta normalisation

def test_beta_normalize_succ():
    assert beta_normalize(App(builtin("succ"), church(1))) == church(2)


def test_beta_normalize_already_normal():
    assert beta_normalize(church(3)) == church(3)


def test_beta_normalize_diverger():
    with pytest.raises(BudgetExhausted):
        beta_normalize(DIVERGER, 200)


def test_beta_normalize_inert_control():
    t = App(C, App(parse_term(r"\x. x"), Var("y")))
    assert beta_normalize(t) == App(C, Var("y"))


def test_beta_normalize_idempotent():
    rng = random.Random(14)
    for _ in range(200):
        t = random_pure_term(rng, rng.randint(2, 10))
        try:
            nf = beta_normalize(t, 500)
        except BudgetExhausted:
            continue
        assert beta_normalize(nf, 500) == nf


def test_beta_normalize_matches_oracle():
    rng = random.Random(15)
    agree = 0
    for _ in range(300):
        t = random_pure_term(rng, rng.randint(2, 12))
        oracle = naive_beta_normalize(t, 3000)
        try:
            engine = beta_normalize(t, 3000)
        except BudgetExhausted:
            engine = None
        if oracle is not None and engine is not None:
            assert alpha_eq(oracle, engine)
            agree += 1
    assert agree > 150


# ---------------------------------------------------------------------------
# Solvability

def test_solvable_redex():
    r = is_c_solvable(App(parse_term(r"\x. x"), Var("y")))
    assert isinstance(r, Solvable) and r.head == "y" and r.args == ()


def test_solvable_abort():
    r = is_c_solvable(app(builtin("abort"), Var("y"), Var("u")))
    assert isinstance(r, Solvable) and r.head == "y" and r.args == ()


def test_solvable_diverger_budget():
    assert isinstance(is_c_solvable(DIVERGER, 100), NotWithinBudget)


def test_solvable_definitive_no():
    r = is_c_solvable(parse_term(r"\x. x"))
    assert isinstance(r, NotSolvable)


# ---------------------------------------------------------------------------
# Lemma-level head reduction laws

def _terminating_pairs(rng, count, size_hi=12, budget=200):
    out = []
    while len(out) < count:
        t = random_pure_term(rng, rng.randint(3, size_hi))
        try:
            tr = head_reduce(t, budget)
        except BudgetExhausted:
            continue
        if tr.steps:
            out.append((t, tr))
    return out


def test_substitution_preserves_head_steps():
    rng = random.Random(16)
    for t, tr in _terminating_pairs(rng, 150):
        sub = {v: random_pure_term(rng, 3) for v in list(free_vars(t))[:2]}
        st_ = substitute(t, sub)
        sv = substitute(tr.final, sub)
        try:
            tr2 = head_reduce(st_, 500)
        except BudgetExhausted:
            continue
        terms = list(tr2.terms())
        h = tr.step_count
        assert h < len(terms) and terms[h] == sv


def test_head_step_composition_law():
    rng = random.Random(17)
    for t, tr in _terminating_pairs(rng, 150):
        args = [random_pure_term(rng, 3) for _ in range(rng.randint(1, 2))]
        lhs = app(t, *args)
        rhs = app(tr.final, *args)
        try:
            tl = head_reduce(lhs, 600)
            tr2 = head_reduce(rhs, 600)
        except BudgetExhausted:
            continue
        assert tl.final == tr2.final
        assert tl.step_count == tr2.step_count + tr.step_count


# ---------------------------------------------------------------------------
# Mu reduction

def test_mu_c1():
    tr = mu_reduce(App(parse_term(r"\x. x"), Var("y")))
    assert tr.final == Var("y")
    assert tr.steps[0].rule == "C1"


def test_mu_c2_then_s2():
    tr = mu_reduce(parse_term("(mu a.[a] x) v"))
    assert [s.rule for s in tr.steps] == ["C2", "S2"]
    assert tr.final == parse_term("x v")


def test_mu_c2_distributes_to_all_namings():
    tr = mu_reduce(parse_term("(mu a.[b] (f (mu g.[a] x))) v"))
    assert tr.steps[0].rule == "C2"
    assert tr.final == parse_term("mu a.[b] (f (mu g.[a] (x v)))")


def test_mu_s1():
    tr = mu_reduce(parse_term("mu a.[b] (mu g.[g] x)"))
    assert tr.steps[0].rule == "S1"
    # [b] mu g.[g] x -> ([g] x)[b/g] = [b] x
    assert tr.final == parse_term("mu a.[b] x") or tr.final == Var("x")


def test_mu_s2():
    tr = mu_reduce(parse_term("mu a.[a] x"))
    assert [s.rule for s in tr.steps] == ["S2"]
    assert tr.final == Var("x")


def test_mu_s2_blocked_by_free_occurrence():
    t = parse_term("mu a.[a] (f (mu g.[a] x))")
    assert is_mu_normal(t)


def test_mu_s3():
    # the simplification-by-eta-expansion rule needs the naming's body to be
    # an abstraction while the binder stays live
    t = parse_term(r"mu a.[a] (\y. mu b.[a] y)")
    tr = mu_reduce(t)
    assert [s.rule for s in tr.steps] == ["S3", "C1", "S1", "S2"]
    assert tr.final == parse_term(r"\x. x x")


def test_mu_s2_short_circuits_s3():
    # when the binder is dead both S2 and S3 apply; the engine prefers S2 and
    # confluence makes the reducts agree
    tr = mu_reduce(parse_term(r"mu a.[a] (\y. y)"))
    assert [s.rule for s in tr.steps] == ["S2"]
    assert tr.final == parse_term(r"\y. y")


def test_mu_s3_respects_shadowing():
    t = parse_term(r"mu a.[b] (mu a.[a] (\y. y) z)")
    # the naming [a] under the inner binder does not trigger S3 for the outer mu
    tr = mu_reduce(t, 100)
    assert all(s.rule != "S3" or s.path != () for s in tr.steps)


def test_mu_head_equiv():
    t = parse_term(r"(\x. x) y")
    assert mu_head_equiv(t, Var("y")) is True
    assert mu_head_equiv(t, t) is True
    assert mu_head_equiv(parse_term(r"\x. x"), parse_term(r"\x. x x")) is False
    r = mu_head_equiv(DIVERGER, Var("y"), 50)
    assert r is INCONCLUSIVE


def _mu_reduce_alt(t, budget=400):
    """An independent strategy: innermost-first, simplification before
    computation; used only as a confluence cross-check."""
    from mixlam.reduction import _mu_rule_at

    def step(t):
        match t:
            case App(f, a):
                r = step(f)
                if r is not None:
                    return App(r, a)
                r = step(a)
                if r is not None:
                    return App(f, r)
            case Lam(x, b):
                r = step(b)
                if r is not None:
                    return Lam(x, r)
            case Mu(g, d, b):
                r = step(b)
                if r is not None:
                    return Mu(g, d, r)
        got = _mu_rule_at(t)
        return got[0] if got is not None else None

    for _ in range(budget):
        r = step(t)
        if r is None:
            return t
        t = r
    return None


def test_mu_confluence_smoke():
    rng = random.Random(18)
    both = 0
    for _ in range(400):
        t = random_mu_term(rng, rng.randint(2, 9))
        try:
            a = mu_reduce(t, 400).final
        except BudgetExhausted:
            continue
        b = _mu_reduce_alt(t)
        if b is None:
            continue
        assert alpha_eq(a, b), f"{t} -> {a} vs {b}"
        both += 1
    assert both > 100


def test_trace_serialisation_shapes():
    tr = head_c_reduce(app(C, Var("t"), Var("u")))
    text = tr.to_text()
    assert "step 1: control" in text
    data = tr.to_structured()
    assert data["step_count"] == 1 and data["steps"][0]["rule"] == "control"
