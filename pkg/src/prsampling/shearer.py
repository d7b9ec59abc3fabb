"""Exact dependency-graph analysis: q-values, run-length formulas, criteria.

Everything here works on a dependency graph plus a vector of exact rational
event probabilities. The central quantity is

    q_I = sum over independent supersets J of I of (-1)^{|J|-|I|} * prod p_j,

computed exactly. ``q_empty`` is the alternating independent-set sum; on
extremal instances it equals the probability that no event occurs, and
``sum_i q_i / q_empty`` is the exact expected number of resampled events.

Computation uses the vertex-elimination recursion

    q(S) = q(S - {v}) - p_v * q(S - N+[v]),   v = min(S),

with memoization, which evaluates the same alternating sum without
enumerating all independent sets. Enumeration (with pruning and explicit
budgets) is kept for the operations that genuinely need every independent
set. Hard guard: at most 30 events per analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import certified
from .errors import BudgetError, PrsError
from .model import (
    DependencyGraph,
    Instance,
    build_dependency_graph,
    event_probabilities,
    is_extremal,
    r_matrix,
)

MAX_ANALYSIS_EVENTS = 30
MAX_MEMO_ENTRIES = 2 ** 21
MAX_ENUMERATED_SETS = 2 ** 20
MAX_SEQUENCE_EVENTS = 6


class ShearerError(PrsError):
    """The requested quantity is undefined because the q-criterion fails."""


def _check_inputs(graph: DependencyGraph, p: Sequence[Fraction]) -> None:
    if graph.num_events > MAX_ANALYSIS_EVENTS:
        raise BudgetError(
            "analysis supports at most %d events, got %d"
            % (MAX_ANALYSIS_EVENTS, graph.num_events)
        )
    if len(p) != graph.num_events:
        raise ValueError(
            "probability vector has %d entries for %d events"
            % (len(p), graph.num_events)
        )
    for i, pi in enumerate(p):
        if not 0 <= pi <= 1:
            raise ValueError("p[%d] = %s is not a probability" % (i, pi))


class _QEvaluator:
    """Memoized evaluation of q(S) over vertex subsets S."""

    def __init__(self, graph: DependencyGraph, p: Sequence[Fraction]):
        self.closed = [graph.closed_neighborhood(i) for i in range(graph.num_events)]
        self.p = [Fraction(pi) for pi in p]
        self.memo: dict[frozenset[int], Fraction] = {frozenset(): Fraction(1)}

    def q(self, subset: frozenset[int]) -> Fraction:
        memo = self.memo
        got = memo.get(subset)
        if got is not None:
            return got
        if len(memo) > MAX_MEMO_ENTRIES:
            raise BudgetError(
                "q-value recursion exceeded %d subproblems" % MAX_MEMO_ENTRIES
            )
        v = min(subset)
        val = self.q(subset - {v}) - self.p[v] * self.q(subset - self.closed[v])
        memo[subset] = val
        return val


def is_independent(graph: DependencyGraph, ids) -> bool:
    """Is the given event set independent in the dependency graph?"""
    ids = set(ids)
    return all(not (set(graph.adjacency[i]) & ids) for i in ids)


def independent_sets(
    graph: DependencyGraph, max_sets: int = MAX_ENUMERATED_SETS
) -> Iterator[frozenset[int]]:
    """All independent sets, DFS over ascending ids, budget-guarded."""
    m = graph.num_events
    adjacency = [set(a) for a in graph.adjacency]
    count = 0

    def rec(start: int, chosen: list[int], blocked: set[int]):
        nonlocal count
        count += 1
        if count > max_sets:
            raise BudgetError(
                "independent-set enumeration exceeded budget of %d sets" % max_sets
            )
        yield frozenset(chosen)
        for v in range(start, m):
            if v in blocked:
                continue
            chosen.append(v)
            yield from rec(v + 1, chosen, blocked | adjacency[v])
            chosen.pop()

    yield from rec(0, [], set())


def q_empty(graph: DependencyGraph, p: Sequence[Fraction]) -> Fraction:
    """The alternating independent-set sum q_empty (exact)."""
    _check_inputs(graph, p)
    ev = _QEvaluator(graph, p)
    return ev.q(frozenset(range(graph.num_events)))


def q_value(graph: DependencyGraph, p: Sequence[Fraction], ids) -> Fraction:
    """Exact q_I for an event set I; 0 when I is not independent.

    A dependent I yields 0 by definition. Callers needing to distinguish
    a computed zero from a non-independent I can test ``is_independent``.
    """
    _check_inputs(graph, p)
    ids = frozenset(ids)
    if not is_independent(graph, ids):
        return Fraction(0)
    ev = _QEvaluator(graph, p)
    rest = frozenset(range(graph.num_events))
    for i in ids:
        rest -= graph.closed_neighborhood(i)
    pi = Fraction(1)
    for i in ids:
        pi *= Fraction(p[i])
    return pi * ev.q(rest)


def q_singletons(graph: DependencyGraph, p: Sequence[Fraction]) -> list[Fraction]:
    """[q_{i}] for every event i (exact)."""
    _check_inputs(graph, p)
    ev = _QEvaluator(graph, p)
    full = frozenset(range(graph.num_events))
    return [
        Fraction(p[i]) * ev.q(full - graph.closed_neighborhood(i))
        for i in range(graph.num_events)
    ]


def all_q_values(
    graph: DependencyGraph,
    p: Sequence[Fraction],
    max_sets: int = MAX_ENUMERATED_SETS,
) -> dict[frozenset[int], Fraction]:
    """q_I for every independent set I, with the normalization check.

    The values partition unity: sum_I q_I == 1 is asserted before returning.
    """
    _check_inputs(graph, p)
    ev = _QEvaluator(graph, p)
    full = frozenset(range(graph.num_events))
    out: dict[frozenset[int], Fraction] = {}
    for ids in independent_sets(graph, max_sets):
        rest = full
        pi = Fraction(1)
        for i in ids:
            rest -= graph.closed_neighborhood(i)
            pi *= Fraction(p[i])
        out[ids] = pi * ev.q(rest)
    total = sum(out.values())
    if total != 1:
        raise AssertionError("q-values sum to %s, expected 1" % total)
    return out


def shearer_holds(
    graph: DependencyGraph,
    p: Sequence[Fraction],
    max_sets: int = MAX_ENUMERATED_SETS,
) -> bool:
    """Exact criterion: q_I >= 0 for every independent I and q_empty > 0."""
    _check_inputs(graph, p)
    ev = _QEvaluator(graph, p)
    full = frozenset(range(graph.num_events))
    if ev.q(full) <= 0:
        return False
    for ids in independent_sets(graph, max_sets):
        rest = full
        pi = Fraction(1)
        for i in ids:
            rest -= graph.closed_neighborhood(i)
            pi *= Fraction(p[i])
        if pi * ev.q(rest) < 0:
            return False
    return True


def expected_resamples(graph: DependencyGraph, p: Sequence[Fraction]) -> Fraction:
    """Exact expected total number of resampled events, sum_i q_i / q_empty."""
    per = expected_resamples_per_event(graph, p)
    return sum(per, Fraction(0))


def expected_resamples_per_event(
    graph: DependencyGraph, p: Sequence[Fraction]
) -> list[Fraction]:
    """Exact expected resamples of each event, q_i / q_empty."""
    if not shearer_holds(graph, p):
        raise ShearerError(
            "q-criterion fails for this graph and probability vector; "
            "expected run length is undefined"
        )
    qe = q_empty(graph, p)
    return [qi / qe for qi in q_singletons(graph, p)]


def check_asymmetric_lll(
    graph: DependencyGraph, p: Sequence[Fraction], x: Sequence[Fraction]
) -> bool:
    """Classic sufficient condition: p_i <= x_i * prod_{j ~ i} (1 - x_j)."""
    _check_inputs(graph, p)
    if len(x) != graph.num_events:
        raise ValueError("x vector has %d entries for %d events" % (len(x), graph.num_events))
    for i, xi in enumerate(x):
        if not 0 < xi < 1:
            raise ValueError("x[%d] = %s must lie strictly inside (0, 1)" % (i, xi))
    for i in range(graph.num_events):
        bound = Fraction(x[i])
        for j in graph.adjacency[i]:
            bound *= 1 - Fraction(x[j])
        if Fraction(p[i]) > bound:
            return False
    return True


def symmetric_pc(d: int) -> Fraction:
    """Critical symmetric threshold (d-1)^(d-1) / d^d for max degree d >= 2."""
    if d < 2:
        raise ValueError("symmetric threshold needs max degree d >= 2, got %d" % d)
    return Fraction((d - 1) ** (d - 1), d ** d)


def linear_coefficient(d: int, p: Fraction) -> Fraction:
    """Exact coefficient p / (p_c(d) - p); requires slack p < p_c(d)."""
    p = Fraction(p)
    pc = symmetric_pc(d)
    if p >= pc:
        raise ShearerError(
            "no slack: p = %s is not below the critical threshold %s" % (p, pc)
        )
    return p / (pc - p)


def linear_bound(m: int, d: int, p: Fraction) -> Fraction:
    """Exact bound m * p / (p_c(d) - p) on expected total resamples."""
    return m * linear_coefficient(d, p)


@dataclass(frozen=True)
class GprsCheck:
    """Verdict of the two general-sampler efficiency conditions.

    cond1: c1 * e * p * delta^2 <= 1, cond2: c2 * e * r * delta <= 1,
    decided by certified comparison. ``applicable`` is False for max
    degree below 2, where the guarantee has nothing to say.
    """

    p: Fraction
    r: Fraction
    delta: int
    c1: int
    c2: int
    applicable: bool
    cond1: bool | None
    cond2: bool | None
    product1: float
    product2: float

    @property
    def ok(self) -> bool | None:
        if not self.applicable:
            return None
        return bool(self.cond1 and self.cond2)

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "r": str(self.r),
            "delta": self.delta,
            "constants": [self.c1, self.c2],
            "applicable": self.applicable,
            "cond1": self.cond1,
            "cond2": self.cond2,
            "product1": self.product1,
            "product2": self.product2,
            "ok": self.ok,
        }


def gprs_condition_values(
    p: Fraction, r: Fraction, delta: int, c1: int = 6, c2: int = 3
) -> GprsCheck:
    """Evaluate the efficiency conditions for given p, r and max degree."""
    p, r = Fraction(p), Fraction(r)
    k1 = c1 * p * delta * delta
    k2 = c2 * r * delta
    applicable = delta >= 2
    cond1 = cond2 = None
    if applicable:
        cond1 = True if k1 == 0 else certified.e_leq(1 / k1)
        cond2 = True if k2 == 0 else certified.e_leq(1 / k2)
    return GprsCheck(
        p=p,
        r=r,
        delta=delta,
        c1=c1,
        c2=c2,
        applicable=applicable,
        cond1=cond1,
        cond2=cond2,
        product1=float(k1) * math.e,
        product2=float(k2) * math.e,
    )


def check_gprs_conditions(instance: Instance, c1: int = 6, c2: int = 3) -> GprsCheck:
    """Efficiency conditions with p, r, delta measured from the instance."""
    graph = build_dependency_graph(instance)
    probs = event_probabilities(instance)
    p = max(probs, default=Fraction(0))
    rvals = r_matrix(instance, graph)
    r = max(rvals.values(), default=Fraction(0))
    return gprs_condition_values(p, r, graph.max_degree, c1, c2)


def truncated_log_partials(
    graph: DependencyGraph, p: Sequence[Fraction], max_len: int
) -> list[Fraction]:
    """Partial sums of the independent-set-sequence series, lengths 0..max_len.

    Sequences are nonempty independent sets S_1, ..., S_l with each S_{t+1}
    inside the closed neighborhood of S_t, weighted by prod_t prod_{i in S_t}
    p_i; the empty sequence contributes 1. The series increases to
    1 / q_empty when the q-criterion holds.
    """
    _check_inputs(graph, p)
    if graph.num_events > MAX_SEQUENCE_EVENTS:
        raise BudgetError(
            "sequence enumeration supports at most %d events, got %d"
            % (MAX_SEQUENCE_EVENTS, graph.num_events)
        )
    sets = [s for s in independent_sets(graph) if s]
    weight = {}
    closed_union = {}
    for s in sets:
        w = Fraction(1)
        cu: frozenset[int] = frozenset()
        for i in s:
            w *= Fraction(p[i])
            cu |= graph.closed_neighborhood(i)
        weight[s] = w
        closed_union[s] = cu
    partials = [Fraction(1)]
    layer = {s: weight[s] for s in sets}
    for _ in range(max_len):
        partials.append(partials[-1] + sum(layer.values(), Fraction(0)))
        nxt = {}
        for s, val in layer.items():
            if val == 0:
                continue
            allowed = closed_union[s]
            for t in sets:
                if t <= allowed:
                    nxt[t] = nxt.get(t, Fraction(0)) + val * weight[t]
        layer = nxt
    return partials


def truncated_log_sum(
    graph: DependencyGraph, p: Sequence[Fraction], max_len: int
) -> Fraction:
    """The independent-set-sequence series truncated at length ``max_len``."""
    return truncated_log_partials(graph, p, max_len)[-1]


@dataclass(frozen=True)
class ShearerReport:
    """Full exact analysis of an instance."""

    num_events: int
    max_degree: int
    p: tuple[Fraction, ...]
    extremal: bool
    q_empty: Fraction
    q_singletons: tuple[Fraction, ...]
    shearer_ok: bool
    expected_total: Fraction | None
    expected_per_event: tuple[Fraction, ...] | None
    lll_ok: bool
    p_max: Fraction
    symmetric_pc: Fraction | None
    linear_coefficient: Fraction | None
    gprs: GprsCheck

    def to_json(self) -> dict:
        return {
            "num_events": self.num_events,
            "max_degree": self.max_degree,
            "p": [str(x) for x in self.p],
            "extremal": self.extremal,
            "q_empty": str(self.q_empty),
            "q_singletons": [str(x) for x in self.q_singletons],
            "shearer_ok": self.shearer_ok,
            "expected_total": None if self.expected_total is None else str(self.expected_total),
            "expected_per_event": None
            if self.expected_per_event is None
            else [str(x) for x in self.expected_per_event],
            "lll_ok": self.lll_ok,
            "p_max": str(self.p_max),
            "symmetric_pc": None if self.symmetric_pc is None else str(self.symmetric_pc),
            "linear_coefficient": None
            if self.linear_coefficient is None
            else str(self.linear_coefficient),
            "gprs": self.gprs.to_json(),
        }


def analyze_instance(instance: Instance) -> ShearerReport:
    """Compute the standard analysis bundle for one instance.

    ``lll_ok`` uses the customary uniform choice x_i = 1/(max_degree + 1)
    when there are dependencies; isolated-event instances pass iff every
    p_i < 1.
    """
    graph = build_dependency_graph(instance)
    p = tuple(event_probabilities(instance))
    delta = graph.max_degree
    qe = q_empty(graph, p)
    qs = tuple(q_singletons(graph, p))
    ok = shearer_holds(graph, p)
    expected_total = expected_per = None
    if ok:
        per = [qi / qe for qi in qs]
        expected_per = tuple(per)
        expected_total = sum(per, Fraction(0))
    if delta >= 1:
        x = [Fraction(1, delta + 1)] * graph.num_events
        lll_ok = check_asymmetric_lll(graph, p, x)
    else:
        lll_ok = all(pi < 1 for pi in p)
    p_max = max(p, default=Fraction(0))
    pc = symmetric_pc(delta) if delta >= 2 else None
    coeff = None
    if pc is not None and p_max < pc:
        coeff = linear_coefficient(delta, p_max)
    return ShearerReport(
        num_events=graph.num_events,
        max_degree=delta,
        p=p,
        extremal=is_extremal(instance, graph),
        q_empty=qe,
        q_singletons=qs,
        shearer_ok=ok,
        expected_total=expected_total,
        expected_per_event=expected_per,
        lll_ok=lll_ok,
        p_max=p_max,
        symmetric_pc=pc,
        linear_coefficient=coeff,
        gprs=check_gprs_conditions(instance),
    )
