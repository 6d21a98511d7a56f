"""Operational verification of storage operators and control-operator shapes.

A storage-operator run drives ``(T) theta f`` by head C-reduction with a
fresh continuation variable ``f`` and inspects the head normal form: a
simulation must reach ``(f) payload`` with the payload beta-equivalent to the
Church numeral of the representative's value.  The harness checks values and
payload normal forms; the number of head steps is recorded because it is the
observable cost of the call-by-value simulation and varies with the
representative, while the payload value never does.

The characterisation side probes a candidate against fresh variables (and a
stack constant standing for an arbitrary argument vector) and confirms the
interaction shapes of abort-like and call/cc-like terms; substitution
stability of head C-reduction carries the fresh-variable runs to arbitrary
term instances, which the harness re-validates on samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .intmachine import Failure, ValueTrace, extract_value
from .reduction import (
    Budget,
    BudgetExhausted,
    ReductionTrace,
    _as_budget,
    beta_normalize,
    head_c_reduce,
    mu_reduce,
    stack_reduce,
)
from .terms import (
    App,
    C,
    Lam,
    Mu,
    StackConst,
    Substitution,
    Term,
    Var,
    all_var_names,
    app,
    church,
    free_vars,
    fresh_name,
    spine,
    substitute,
)


# ---------------------------------------------------------------------------
# Representative corpus

@dataclass(frozen=True)
class ThetaCorpus:
    """Per value: pure beta-equivalent representatives and control-using
    classical integers."""

    pure: dict[int, tuple[Term, ...]]
    classical: dict[int, tuple[Term, ...]]

    def values(self) -> list[int]:
        return sorted(set(self.pure) | set(self.classical))


def _succ_tower(n: int) -> Term:
    from .terms import builtin

    t = church(0)
    for _ in range(n):
        t = App(builtin("succ"), t)
    return t


def classical_integer(n: int, nested: bool = False) -> Term:
    inner: Term = church(n)
    if nested:
        inner = App(C, Lam("j", App(Var("j"), church(n))))
    return App(C, Lam("k", App(Var("k"), inner)))


def default_corpus(n_range: Iterable[int] = range(16)) -> ThetaCorpus:
    pure = {}
    classical = {}
    for n in n_range:
        pure[n] = (
            church(n),
            _succ_tower(n),
            App(Lam("z", Var("z")), church(n)),
        )
        classical[n] = (
            classical_integer(n),
            classical_integer(n, nested=True),
        )
    return ThetaCorpus(pure, classical)


# ---------------------------------------------------------------------------
# Reports

@dataclass(frozen=True)
class Simulated:
    tau_value: int
    head_steps: int
    payload: Term


@dataclass(frozen=True)
class HeadMismatch:
    term: Term


@dataclass(frozen=True)
class Exhausted:
    steps: int


@dataclass(frozen=True)
class StorageReport:
    candidate: Term
    n: int
    representative: Term
    outcome: Simulated | HeadMismatch | Exhausted
    notes: str = ""

    @property
    def simulated(self) -> bool:
        return isinstance(self.outcome, Simulated)

    def line(self) -> str:
        from .syntax import print_term

        match self.outcome:
            case Simulated(v, h, _):
                status = f"simulated value={v} head_steps={h}"
            case HeadMismatch(t):
                status = f"head-mismatch {print_term(t)}"
            case Exhausted(k):
                status = f"exhausted after {k} steps"
        note = f"  ({self.notes})" if self.notes else ""
        return f"n={self.n} rep={print_term(self.representative)[:48]:48s} {status}{note}"


def _run_one(candidate: Term, n: int, theta: Term, budget: Budget, check_value: bool) -> StorageReport:
    taken = all_var_names(candidate) | all_var_names(theta)
    f = fresh_name("f", taken)
    term = app(candidate, theta, Var(f))
    try:
        trace = head_c_reduce(term, budget)
    except BudgetExhausted as e:
        return StorageReport(candidate, n, theta, Exhausted(e.trace.step_count))
    head, args = spine(trace.final)
    if not (isinstance(head, Var) and head.name == f and len(args) == 1):
        return StorageReport(candidate, n, theta, HeadMismatch(trace.final))
    payload = args[0]
    try:
        nf = beta_normalize(payload, budget)
    except BudgetExhausted:
        return StorageReport(candidate, n, theta, Exhausted(budget.max_steps), "payload diverges")
    if nf != church(n):
        return StorageReport(candidate, n, theta, HeadMismatch(trace.final), "payload is not the numeral")
    notes = ""
    if check_value:
        if free_vars(payload):
            return StorageReport(candidate, n, theta, HeadMismatch(trace.final), "payload is open")
        vt = extract_value(payload, budget)
        if not isinstance(vt, ValueTrace) or vt.n != n:
            return StorageReport(candidate, n, theta, HeadMismatch(trace.final), "value extraction disagrees")
        notes = "value cross-checked"
    return StorageReport(candidate, n, theta, Simulated(n, trace.step_count, payload), notes)


def verify_storage(candidate: Term, corpus: ThetaCorpus | None = None, budget=None) -> list[StorageReport]:
    """Sweep the pure representatives; one report per entry, never aborting.

    A per-value constancy note marks values whose payload normal forms differ
    across representatives (they never should) and values whose raw payloads
    differ (legitimate for non-operators; the shipped operators produce one
    payload per value).
    """
    budget = _as_budget(budget)
    corpus = corpus or default_corpus()
    if free_vars(candidate):
        raise ValueError("storage candidates must be closed")
    reports: list[StorageReport] = []
    for n in sorted(corpus.pure):
        group = [_run_one(candidate, n, theta, budget, check_value=False) for theta in corpus.pure[n]]
        payloads = [r.outcome.payload for r in group if isinstance(r.outcome, Simulated)]
        if len(payloads) > 1 and any(p != payloads[0] for p in payloads[1:]):
            group = [
                StorageReport(r.candidate, r.n, r.representative, r.outcome,
                              (r.notes + "; " if r.notes else "") + "payload varies with representative")
                for r in group
            ]
        reports.extend(group)
    return reports


def verify_storage_classical(candidate: Term, n_range: Iterable[int] = range(11), budget=None) -> list[StorageReport]:
    """Sweep the control-using classical integers; the extracted value of
    every payload must agree with the representative's value."""
    budget = _as_budget(budget)
    corpus = default_corpus(n_range)
    if free_vars(candidate):
        raise ValueError("storage candidates must be closed")
    reports: list[StorageReport] = []
    for n in sorted(corpus.classical):
        for theta in corpus.classical[n]:
            reports.append(_run_one(candidate, n, theta, budget, check_value=True))
    return reports


# ---------------------------------------------------------------------------
# Control-operator characterisation

@dataclass(frozen=True)
class Confirmed:
    arities: tuple[int, ...]


@dataclass(frozen=True)
class Refuted:
    arity: int
    trace: ReductionTrace


@dataclass(frozen=True)
class Shape:
    m: int
    final_probe: int  # which probe variable receives the arguments
    segments: tuple[ReductionTrace, ...]


def characterize_bottom_arrow(candidate: Term, arity_range: Iterable[int] = range(6), budget=None):
    """Confirm the abort interaction: the candidate applied to a fresh
    variable and any number of fresh arguments head-C-reduces to the variable."""
    budget = _as_budget(budget)
    if free_vars(candidate):
        raise ValueError("characterisation takes closed candidates")
    checked = []
    for k in arity_range:
        names = [f"z{i}" for i in range(k + 1)]
        term = app(candidate, *(Var(x) for x in names))
        try:
            trace = head_c_reduce(term, budget)
        except BudgetExhausted as e:
            return Refuted(k, e.trace)
        if trace.final != Var(names[0]):
            return Refuted(k, trace)
        checked.append(k)
    return Confirmed(tuple(checked))


_MAX_CHAIN = 64


def characterize_cc(candidate: Term, arity_range: Iterable[int] = range(6), budget=None):
    """Probe the call/cc interaction chain.

    The candidate faces a fresh variable and a stack constant standing for
    the argument vector; each continuation the candidate returns is probed
    with a fresh variable until one probe variable receives the stack.  The
    chain is then replayed under sample substitutions of the stack constant
    by concrete argument vectors for every requested arity.
    """
    budget = _as_budget(budget)
    if free_vars(candidate):
        raise ValueError("characterisation takes closed candidates")
    t = "t0"
    term = app(candidate, Var(t), StackConst("q"))
    segments: list[ReductionTrace] = []
    probes: list[str] = []
    try:
        trace = stack_reduce(term, budget)
    except BudgetExhausted as e:
        return Refuted(-1, e.trace)
    segments.append(trace)
    head, args = spine(trace.final)
    if not (isinstance(head, Var) and head.name == t and len(args) == 1 and not isinstance(args[0], StackConst)):
        return Refuted(-1, trace)
    u = args[0]
    while len(probes) < _MAX_CHAIN:
        y = f"y{len(probes) + 1}"
        probes.append(y)
        try:
            trace = stack_reduce(App(u, Var(y)), budget)
        except BudgetExhausted as e:
            return Refuted(-1, e.trace)
        segments.append(trace)
        head, args = spine(trace.final)
        if isinstance(head, Var) and head.name == t and len(args) == 1 and not isinstance(args[0], StackConst):
            u = args[0]
            continue
        if (
            isinstance(head, Var)
            and head.name in probes
            and len(args) == 1
            and args[0] == StackConst("q")
        ):
            m = len(probes)
            j = probes.index(head.name) + 1
            shape = Shape(m, j, tuple(segments))
            bad = _revalidate_cc(shape, arity_range)
            return bad if bad is not None else shape
        return Refuted(-1, trace)
    return Refuted(-1, segments[-1])


def _revalidate_cc(shape: Shape, arity_range: Iterable[int]):
    """Replay every chain segment with the stack replaced by fresh-variable
    vectors of each requested arity."""
    for k in arity_range:
        sigma = Substitution(vars={}, stacks={"q": tuple(Var(f"v{i}") for i in range(k))})
        for seg in shape.segments:
            start = substitute(seg.initial, sigma)
            end = substitute(seg.final, sigma)
            try:
                replay = stack_reduce(start, Budget(max(seg.step_count, 1)))
            except BudgetExhausted as e:
                return Refuted(k, e.trace)
            terms = list(replay.terms())
            if seg.step_count >= len(terms) or terms[seg.step_count] != end:
                return Refuted(k, replay)
    return None


# ---------------------------------------------------------------------------
# The mu-calculus storage check

def verify_storage_mu(candidate: Term, corpus: Sequence[tuple[int, Term]] | None = None, budget=None) -> list[StorageReport]:
    """Check the mu-calculus storage interaction: the candidate applied to a
    classical integer and a fresh variable must reduce to that variable
    applied to a payload classifying as the same value (a leading
    self-naming mu binder is accepted and stripped)."""
    from .intmachine import IsClassicalInteger, classify_mu_integer

    budget = _as_budget(budget)
    if corpus is None:
        corpus = [(n, church(n)) for n in range(6)]
    reports: list[StorageReport] = []
    for n, theta in corpus:
        taken = all_var_names(candidate) | all_var_names(theta)
        f = fresh_name("f", taken)
        term = app(candidate, theta, Var(f))
        try:
            trace = mu_reduce(term, budget)
        except BudgetExhausted as e:
            reports.append(StorageReport(candidate, n, theta, Exhausted(e.trace.step_count)))
            continue
        nf = trace.final
        if isinstance(nf, Mu) and nf.binder == nf.named:
            nf = nf.body  # mu a.[a] (f) payload with the binder still free below
        head, args = spine(nf)
        if not (isinstance(head, Var) and head.name == f and len(args) == 1):
            reports.append(StorageReport(candidate, n, theta, HeadMismatch(trace.final)))
            continue
        payload = args[0]
        got = classify_mu_integer(payload)
        if got != IsClassicalInteger(n):
            reports.append(
                StorageReport(candidate, n, theta, HeadMismatch(trace.final), f"payload classifies as {got}")
            )
            continue
        reports.append(StorageReport(candidate, n, theta, Simulated(n, trace.step_count, payload)))
    return reports
