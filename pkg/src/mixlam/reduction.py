"""Reduction engines.

* ``head_reduce``     -- head beta reduction of pure lambda terms.
* ``head_c_reduce``   -- head C-reduction: beta at the head plus the control
                         rule (C)t t1...tn -> (t)\\x.(x)t1...tn.
* ``stack_reduce``    -- the same two rules on terms whose stack constants sit
                         in argument position; a stack constant never
                         substitutes for a variable.
* ``beta_normalize``  -- leftmost-outermost full beta normalisation; C and
                         stack constants are inert.
* ``mu_reduce``       -- the five mu-rules C1, C2, S1, S2, S3, computation
                         rules tried before simplification rules at each
                         position, leftmost-outermost.

Every engine threads an explicit step budget and raises ``BudgetExhausted``
(carrying the partial trace) when it runs out; untyped terms may diverge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .terms import (
    App,
    ConstC,
    Lam,
    Mu,
    StackConst,
    Term,
    Var,
    alpha_eq,
    all_mu_names,
    all_var_names,
    app,
    free_mu_vars,
    free_vars,
    fresh_name,
    has_const_c,
    is_lambda_cp,
    rename_mu,
    spine,
    stack_consts,
    substitute,
)


class PreconditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    max_steps: int = 100_000

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("budget must be positive")


DEFAULT_BUDGET = Budget()


def _as_budget(b) -> Budget:
    if isinstance(b, Budget):
        return b
    if isinstance(b, int):
        return Budget(b)
    if b is None:
        return DEFAULT_BUDGET
    raise TypeError(f"not a budget: {b!r}")


@dataclass(frozen=True)
class Step:
    rule: str
    path: tuple[int, ...]
    term: Term


@dataclass(frozen=True)
class ReductionTrace:
    initial: Term
    steps: tuple[Step, ...] = ()

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.initial

    def terms(self) -> Iterator[Term]:
        yield self.initial
        for s in self.steps:
            yield s.term

    def to_text(self) -> str:
        from .syntax import print_term

        lines = [f"initial: {print_term(self.initial)}"]
        for k, s in enumerate(self.steps, start=1):
            path = ".".join(map(str, s.path)) or "-"
            lines.append(f"step {k}: {s.rule} @ {path} => {print_term(s.term)}")
        return "\n".join(lines)

    def to_structured(self) -> dict:
        from .syntax import print_term

        return {
            "initial": print_term(self.initial),
            "steps": [
                {"rule": s.rule, "path": list(s.path), "term": print_term(s.term)}
                for s in self.steps
            ],
            "step_count": self.step_count,
        }


class BudgetExhausted(Exception):
    """Raised when a budget runs out; carries the partial trace."""

    def __init__(self, trace: ReductionTrace):
        super().__init__(f"budget exhausted after {trace.step_count} steps")
        self.trace = trace


# ---------------------------------------------------------------------------
# Head reduction (pure) and head C-reduction

def _head_step(t: Term, allow_c: bool, stacks: bool) -> tuple[Term, str, tuple[int, ...]] | None:
    """One head step under a lambda prefix, or None at head normal form."""
    path: list[int] = []
    prefix: list[str] = []
    while isinstance(t, Lam):
        prefix.append(t.binder)
        path.append(0)
        t = t.body
    head, args = spine(t)
    if isinstance(head, Lam) and args:
        if stacks and isinstance(args[0], StackConst):
            return None  # a stack constant never substitutes for a variable
        reduct = substitute(head.body, {head.binder: args[0]})
        new = app(reduct, *args[1:])
        rule = "beta"
    elif allow_c and isinstance(head, ConstC) and args:
        if stacks and isinstance(args[0], StackConst):
            return None
        avoid = set()
        for a in args[1:]:
            avoid |= all_var_names(a)
        x = fresh_name("x", avoid)
        new = App(args[0], Lam(x, app(Var(x), *args[1:])))
        rule = "control"
    else:
        return None
    redex_path = tuple(path + [0] * (len(args) - 1))
    for b in reversed(prefix):
        new = Lam(b, new)
    return new, rule, redex_path


def _run_head(t: Term, budget: Budget, allow_c: bool, stacks: bool) -> ReductionTrace:
    steps: list[Step] = []
    cur = t
    while True:
        r = _head_step(cur, allow_c, stacks)
        if r is None:
            return ReductionTrace(t, tuple(steps))
        if len(steps) >= budget.max_steps:
            raise BudgetExhausted(ReductionTrace(t, tuple(steps)))
        cur, rule, path = r
        steps.append(Step(rule, path, cur))


def head_reduce(t: Term, budget=None) -> ReductionTrace:
    """Head beta reduction of a pure lambda term to head normal form."""
    if has_const_c(t):
        raise PreconditionViolated("head_reduce takes pure terms; C present")
    if stack_consts(t):
        raise PreconditionViolated("head_reduce takes pure terms; stack constant present")
    return _run_head(t, _as_budget(budget), allow_c=False, stacks=False)


def head_c_reduce(t: Term, budget=None) -> ReductionTrace:
    """Head C-reduction of a lambda-C term."""
    return _run_head(t, _as_budget(budget), allow_c=True, stacks=False)


def stack_reduce(t: Term, budget=None) -> ReductionTrace:
    """Head C-reduction over terms with stack constants in argument position."""
    if not is_lambda_cp(t):
        raise PreconditionViolated("stack_reduce requires stack constants in argument position only")
    return _run_head(t, _as_budget(budget), allow_c=True, stacks=True)


# ---------------------------------------------------------------------------
# Solvability

@dataclass(frozen=True)
class Solvable:
    head: str
    args: tuple[Term, ...]
    trace: ReductionTrace


@dataclass(frozen=True)
class NotSolvable:
    """Definitive: the head normal form is not a variable applied to arguments."""

    normal_form: Term
    trace: ReductionTrace


@dataclass(frozen=True)
class NotWithinBudget:
    partial: ReductionTrace


def is_c_solvable(t: Term, budget=None):
    """Run head C-reduction; report the head variable and arguments."""
    try:
        trace = head_c_reduce(t, budget)
    except BudgetExhausted as e:
        return NotWithinBudget(e.trace)
    head, args = spine(trace.final)
    if isinstance(head, Var):
        return Solvable(head.name, tuple(args), trace)
    return NotSolvable(trace.final, trace)


# ---------------------------------------------------------------------------
# Full beta normalisation (leftmost-outermost)

def _lo_beta_step(t: Term) -> Term | None:
    match t:
        case App(Lam(x, b), a):
            return substitute(b, {x: a})
        case App(f, a):
            r = _lo_beta_step(f)
            if r is not None:
                return App(r, a)
            r = _lo_beta_step(a)
            if r is not None:
                return App(f, r)
            return None
        case Lam(x, b):
            r = _lo_beta_step(b)
            return Lam(x, r) if r is not None else None
        case Mu(g, d, b):
            r = _lo_beta_step(b)
            return Mu(g, d, r) if r is not None else None
        case _:
            return None


def beta_normalize(t: Term, budget=None) -> Term:
    """Leftmost-outermost beta normal form; C and stack constants are inert."""
    budget = _as_budget(budget)
    cur = t
    for _ in range(budget.max_steps):
        r = _lo_beta_step(cur)
        if r is None:
            return cur
        cur = r
    if _lo_beta_step(cur) is None:
        return cur
    raise BudgetExhausted(ReductionTrace(t, (Step("beta", (), cur),)))


def is_beta_normal(t: Term) -> bool:
    return _lo_beta_step(t) is None


# ---------------------------------------------------------------------------
# Mu-calculus reduction

def _star_subst(t: Term, alpha: str, v: Term) -> Term:
    """Replace each naming [alpha]w by [alpha](w)v, capture-avoiding."""
    v_fmv = free_mu_vars(v)
    v_fv = free_vars(v)

    def go(t: Term) -> Term:
        if alpha not in free_mu_vars(t):
            return t
        match t:
            case Lam(x, b):
                if x in v_fv:
                    x2 = fresh_name(x, v_fv | all_var_names(b))
                    b = substitute(b, {x: Var(x2)})
                    x = x2
                return Lam(x, go(b))
            case App(f, a):
                return App(go(f), go(a))
            case Mu(g, d, b):
                if g == alpha:
                    return t  # shadowed
                if g in v_fmv:
                    g2 = fresh_name(g, v_fmv | all_mu_names(b) | {d, alpha})
                    b = rename_mu(b, g, g2)
                    d = g2 if d == g else d
                    g = g2
                b2 = go(b)
                if d == alpha:
                    return Mu(g, d, App(b2, v))
                return Mu(g, d, b2)
            case _:
                return t

    return go(t)


def _contains_named_lam(t: Term, alpha: str) -> bool:
    """Does the term contain a subterm [alpha]\\y.w with alpha not shadowed?"""
    match t:
        case Mu(g, d, b):
            if g == alpha:
                return False  # the naming [d] lies inside g's scope
            if d == alpha and isinstance(b, Lam):
                return True
            return _contains_named_lam(b, alpha)
        case Lam(_, b):
            return _contains_named_lam(b, alpha)
        case App(f, a):
            return _contains_named_lam(f, alpha) or _contains_named_lam(a, alpha)
        case _:
            return False


def _mu_rule_at(t: Term) -> tuple[Term, str] | None:
    """Try the five rules at this position, computation rules first."""
    match t:
        case App(Lam(x, b), v):
            return substitute(b, {x: v}), "C1"
        case App(Mu(g, d, b), v):
            if g in free_mu_vars(v):
                g2 = fresh_name(g, free_mu_vars(v) | all_mu_names(b) | {d})
                b = rename_mu(b, g, g2)
                d = g2 if d == g else d
                g = g2
            inner = _star_subst(b, g, v)
            if d == g:
                inner = App(inner, v)
            return Mu(g, d, inner), "C2"
        case Mu(g, d, Mu(g2, d2, b)):
            # S1: the naming [d] applied to a mu-abstraction merges
            if g2 == d:
                # mu g.[d] mu g2.[d2] b with g2 = d: inner references to g2
                # are to the inner binder; renaming d/g2 is identity here
                return Mu(g, d2, b), "S1"
            b2 = rename_mu(b, g2, d)
            d2b = d if d2 == g2 else d2
            return Mu(g, d2b, b2), "S1"
        case Mu(g, d, b) if g == d and g not in free_mu_vars(b):
            return b, "S2"
        case Mu(g, d, b):
            named_body_has_lam = (d == g and isinstance(b, Lam)) or _contains_named_lam(b, g)
            if named_body_has_lam:
                x = fresh_name("x", all_var_names(b) | free_vars(b))
                inner = _star_subst(b, g, Var(x))
                if d == g:
                    inner = App(inner, Var(x))
                return Lam(x, Mu(g, d, inner)), "S3"
            return None
    return None


def _mu_step(t: Term) -> tuple[Term, str, tuple[int, ...]] | None:
    """Leftmost-outermost: try rules at the node, then recurse into children."""
    r = _mu_rule_at(t)
    if r is not None:
        new, rule = r
        return new, rule, ()
    match t:
        case App(f, a):
            r = _mu_step(f)
            if r is not None:
                return App(r[0], a), r[1], (0,) + r[2]
            r = _mu_step(a)
            if r is not None:
                return App(f, r[0]), r[1], (1,) + r[2]
        case Lam(x, b):
            r = _mu_step(b)
            if r is not None:
                return Lam(x, r[0]), r[1], (0,) + r[2]
        case Mu(g, d, b):
            r = _mu_step(b)
            if r is not None:
                return Mu(g, d, r[0]), r[1], (0,) + r[2]
    return None


def mu_reduce(t: Term, budget=None) -> ReductionTrace:
    """Reduce a mu-term with C1/C2/S1/S2/S3 until no rule applies."""
    budget = _as_budget(budget)
    steps: list[Step] = []
    cur = t
    while True:
        r = _mu_step(cur)
        if r is None:
            return ReductionTrace(t, tuple(steps))
        if len(steps) >= budget.max_steps:
            raise BudgetExhausted(ReductionTrace(t, tuple(steps)))
        cur, rule, path = r
        steps.append(Step(rule, path, cur))


def is_mu_normal(t: Term) -> bool:
    return _mu_step(t) is None


def mu_head_equiv(a: Term, b: Term, budget=None):
    """Head equivalence: both sides reach a common reduct.

    True when the traces share a term; False when both normalise to distinct
    normal forms (justified by confluence); INCONCLUSIVE otherwise.
    """
    from .formulas import INCONCLUSIVE

    budget = _as_budget(budget)
    a_done = b_done = True
    try:
        ta = mu_reduce(a, budget)
    except BudgetExhausted as e:
        ta, a_done = e.trace, False
    try:
        tb = mu_reduce(b, budget)
    except BudgetExhausted as e:
        tb, b_done = e.trace, False
    from .terms import canon

    seen_a = {canon(x) for x in ta.terms()}
    if any(canon(y) in seen_a for y in tb.terms()):
        return True
    if a_done and b_done:
        return False
    return INCONCLUSIVE
