"""Value extraction for classical integers, and the mu-term integer classifier.

``extract_value`` drives a closed control-calculus term against two fresh
variables and a supply of stack constants.  A genuine classical integer
interacts in segments: each segment head-reduces to the iterator variable
applied to a next-segment term and an already-seen stack constant, until a
final segment returns to the base variable.  The visited stack indices
reconstruct the value: writing r_i for the stack index ending segment i and
d_i for the segment's depth (d_0 = 0, d_{i+1} = d_{r_i} + 1), the value is
d_{r_m} where m is the last segment; the index map I(i) = n - d_i then
satisfies I(0) = n, I(r_m) = 0 and I(i+1) = I(r_i) - 1, which the machine
checks on every run.

``extract_value_open`` replays the same segments under a substitution that
maps the two variables to arbitrary terms and each stack constant to an
argument vector, validating the transported reductions step for step.

The classifier side recognises normal mu-calculus integers: a two-binder
prefix over a body in the iterator grammar, no free mu-variables, and a
singleton representable-value set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .reduction import (
    Budget,
    BudgetExhausted,
    PreconditionViolated,
    ReductionTrace,
    _as_budget,
    is_mu_normal,
    stack_reduce,
)
from .terms import (
    App,
    Lam,
    Mu,
    StackConst,
    Substitution,
    Term,
    Var,
    all_var_names,
    app,
    free_mu_vars,
    free_vars,
    fresh_name,
    is_mu_term,
    spine,
    stack_consts,
    substitute,
)


@dataclass(frozen=True)
class ValueTrace:
    """The observable interaction of a classical integer with the machine."""

    n: int
    m: int
    index_map: dict[int, int]  # I
    r: dict[int, int]
    segments: tuple[ReductionTrace, ...]

    def check_invariants(self) -> None:
        assert self.index_map[0] == self.n, "I(0) = n"
        assert self.index_map[self.r[self.m]] == 0, "I(r_m) = 0"
        for i in range(self.m):
            assert self.index_map[i + 1] == self.index_map[self.r[i]] - 1, "I(i+1) = I(r_i) - 1"
        for v in self.index_map.values():
            assert v >= 0


@dataclass(frozen=True)
class Failure:
    reason: str  # "BudgetExhausted" | "BadHead" | "Precondition"
    detail: str
    partial_segments: tuple[ReductionTrace, ...] = ()


def _fresh_pair(theta: Term) -> tuple[str, str]:
    taken = all_var_names(theta)
    x = fresh_name("x", taken)
    g = fresh_name("g", taken | {x})
    return x, g


def extract_value(theta: Term, budget=None) -> ValueTrace | Failure:
    """Run a closed control-calculus term through the stack-constant protocol
    and reconstruct the integer it carries."""
    budget = _as_budget(budget)
    if free_vars(theta):
        return Failure("Precondition", f"term is not closed: {sorted(free_vars(theta))}")
    if stack_consts(theta):
        return Failure("Precondition", "term already mentions stack constants")
    x, g = _fresh_pair(theta)
    segments: list[ReductionTrace] = []
    r: dict[int, int] = {}
    stack_names = ["p0"]
    current = app(theta, Var(x), Var(g), StackConst("p0"))
    remaining = budget.max_steps
    seg = 0
    while True:
        try:
            trace = stack_reduce(current, Budget(remaining))
        except BudgetExhausted as e:
            return Failure("BudgetExhausted", f"segment {seg} ran out of budget", tuple(segments) + (e.trace,))
        except PreconditionViolated as e:
            return Failure("BadHead", str(e), tuple(segments))
        remaining -= trace.step_count
        if remaining <= 0:
            remaining = 1  # allow the classification of an already-finished segment
        segments.append(trace)
        head, args = spine(trace.final)
        if isinstance(trace.final, Lam):
            return Failure("BadHead", "segment stopped under an abstraction", tuple(segments))
        if isinstance(head, Var) and head.name == x:
            if len(args) != 1 or not isinstance(args[0], StackConst):
                return Failure("BadHead", "base variable must receive exactly one stack constant", tuple(segments))
            r[seg] = stack_names.index(args[0].name)
            break
        if isinstance(head, Var) and head.name == g:
            if len(args) != 2 or not isinstance(args[1], StackConst) or isinstance(args[0], StackConst):
                return Failure("BadHead", "iterator must receive a term and a stack constant", tuple(segments))
            r[seg] = stack_names.index(args[1].name)
            nxt = f"p{seg + 1}"
            stack_names.append(nxt)
            current = App(args[0], StackConst(nxt))
            seg += 1
            continue
        return Failure("BadHead", f"segment ended at head {head}", tuple(segments))

    m = seg
    depth = {0: 0}
    for i in range(m):
        depth[i + 1] = depth[r[i]] + 1
    n = depth[r[m]]
    index_map = {i: n - depth[i] for i in range(m + 1)}
    vt = ValueTrace(n, m, index_map, r, tuple(segments))
    vt.check_invariants()
    return vt


def extract_value_open(
    theta: Term,
    a: Term,
    f: Term,
    stacks: Sequence[Sequence[Term]],
    budget=None,
) -> ValueTrace | Failure:
    """The open-argument variant: arbitrary terms replace the two variables
    and argument vectors replace the stack constants.

    The abstract run is transported segment by segment through the
    substitution and each transported segment is replayed and verified, so a
    successful result carries the same index maps as ``extract_value``.
    """
    budget = _as_budget(budget)
    vt = extract_value(theta, budget)
    if isinstance(vt, Failure):
        return vt
    x_name, g_name = _seg_base_names(vt.segments[0])
    stacks = [tuple(s) for s in stacks] or [()]
    mapping = {}
    for i in range(vt.m + 1):
        mapping[f"p{i}"] = tuple(stacks[i % len(stacks)])
    sigma = Substitution(vars={x_name: a, g_name: f}, stacks=mapping)

    transported = []
    for trace in vt.segments:
        start = substitute(trace.initial, sigma)
        end = substitute(trace.final, sigma)
        steps = trace.step_count
        try:
            replay = stack_reduce(start, Budget(max(steps, 1)))
        except BudgetExhausted as e:
            replay = e.trace
        terms = list(replay.terms())
        if steps >= len(terms) or terms[steps] != end:
            return Failure("BadHead", "transported segment no longer reaches its endpoint", tuple(transported))
        transported.append(ReductionTrace(start, replay.steps[:steps]))
    return ValueTrace(vt.n, vt.m, vt.index_map, vt.r, tuple(transported))


def _seg_base_names(first_segment: ReductionTrace) -> tuple[str, str]:
    head, args = spine(first_segment.initial)
    # (theta) x g p0: the last three arguments are x, g, p0
    return args[-3].name, args[-2].name


# ---------------------------------------------------------------------------
# Mu-calculus integers

def in_nxf(u: Term, x: str, f: str) -> bool:
    """Membership in the iterator grammar u := x | (f)u | mu a.[b] u."""
    match u:
        case Var(name):
            return name == x
        case App(Var(name), arg):
            return name == f and in_nxf(arg, x, f)
        case Mu(_, _, body):
            return in_nxf(body, x, f)
        case _:
            return False


@dataclass(frozen=True)
class RepSet:
    """A finite set of naturals or an upward-closed tail {k, k+1, ...}.

    The representable-value clauses only build finite sets and shifted
    full tails, so this closed form is exact.
    """

    finite: frozenset[int] | None = None
    tail_from: int | None = None

    @staticmethod
    def of(*values: int) -> "RepSet":
        return RepSet(finite=frozenset(values))

    @staticmethod
    def all_naturals() -> "RepSet":
        return RepSet(tail_from=0)

    @property
    def is_all(self) -> bool:
        return self.tail_from == 0

    def shift(self) -> "RepSet":
        if self.finite is not None:
            return RepSet(finite=frozenset(v + 1 for v in self.finite))
        return RepSet(tail_from=self.tail_from + 1)

    def intersect(self, other: "RepSet") -> "RepSet":
        if self.finite is not None and other.finite is not None:
            return RepSet(finite=self.finite & other.finite)
        if self.finite is not None:
            return RepSet(finite=frozenset(v for v in self.finite if v >= other.tail_from))
        if other.finite is not None:
            return other.intersect(self)
        return RepSet(tail_from=max(self.tail_from, other.tail_from))

    def singleton(self) -> int | None:
        if self.finite is not None and len(self.finite) == 1:
            return next(iter(self.finite))
        return None

    def __str__(self):
        if self.tail_from is not None:
            return "all" if self.tail_from == 0 else f"{{n >= {self.tail_from}}}"
        return "{" + ", ".join(map(str, sorted(self.finite))) + "}"


def _named_bodies(t: Term, alpha: str, out: list[Term]) -> None:
    """Collect the bodies of namings [alpha]v, respecting shadowing."""
    match t:
        case Mu(g, d, b):
            if g == alpha:
                return
            if d == alpha:
                out.append(b)
            _named_bodies(b, alpha, out)
        case App(fn, a):
            _named_bodies(fn, alpha, out)
            _named_bodies(a, alpha, out)
        case Lam(_, b):
            _named_bodies(b, alpha, out)
        case _:
            return


def rep(u: Term) -> RepSet:
    """The set of integers a grammar body can denote.

    The intersection for a mu node ranges over every naming by its binder
    inside its named term; an empty family yields the full set of naturals.
    """
    match u:
        case Var(_):
            return RepSet.of(0)
        case App(_, arg):
            return rep(arg).shift()
        case Mu(g, d, b):
            bodies: list[Term] = []
            if d == g:
                bodies.append(b)
            _named_bodies(b, g, bodies)
            out = RepSet.all_naturals()
            for v in bodies:
                out = out.intersect(rep(v))
            return out
    raise ValueError(f"not in the iterator grammar: {u}")


@dataclass(frozen=True)
class IsClassicalInteger:
    n: int


@dataclass(frozen=True)
class NotClassicalInteger:
    reason: str  # "NotNormal" | "Shape" | "Open" | "Grammar" | "FreeMuVar" | "Rep"
    detail: str


def classify_mu_integer(t: Term) -> IsClassicalInteger | NotClassicalInteger:
    """Decide whether a normal mu-term is a classical integer, and of what value."""
    if not is_mu_term(t):
        return NotClassicalInteger("Shape", "not a mu-term")
    if not is_mu_normal(t):
        return NotClassicalInteger("NotNormal", "term still reduces")
    if not (isinstance(t, Lam) and isinstance(t.body, Lam)):
        return NotClassicalInteger("Shape", "expected a two-abstraction prefix")
    x, f = t.binder, t.body.binder
    u = t.body.body
    if x == f:
        # the payload binder is shadowed; no grammar chain can end in it
        x = fresh_name(x, all_var_names(t))
    if free_vars(t):
        return NotClassicalInteger("Open", f"free lambda variables: {sorted(free_vars(t))}")
    if not in_nxf(u, x, f):
        return NotClassicalInteger("Grammar", "body leaves the iterator grammar")
    if free_mu_vars(u):
        return NotClassicalInteger("FreeMuVar", f"free mu-variables: {sorted(free_mu_vars(u))}")
    values = rep(u)
    n = values.singleton()
    if n is None:
        return NotClassicalInteger("Rep", f"representable values {values} are not a singleton")
    return IsClassicalInteger(n)
