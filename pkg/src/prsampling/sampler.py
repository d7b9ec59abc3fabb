"""Resampling algorithms over constraint instances.

Three samplers share one contract: draw an initial assignment from the
product distribution, then repeatedly redraw some variables until no bad
event occurs, and return the final assignment plus run statistics.

* ``moser_tardos``: redraw the variables of one uniformly chosen occurring
  event per step. Fast to terminate under the classic conditions, but the
  output is generally *not* the conditional product distribution.
* ``extremal_prs``: redraw the variables of *all* occurring events per
  round. Exact on extremal instances (dependent events pairwise disjoint).
* ``general_prs``: redraw the variables of the resampling set chosen by
  :func:`select_resampling_set` per round. Exact on every instance.

Exactness here means the output is distributed as the product distribution
conditioned on no event occurring. Fresh values are drawn lazily, variable
by variable in ascending id order, so independently written specialized
samplers can stay stream-aligned with these loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import RoundCapError
from .model import (
    DependencyGraph,
    Instance,
    build_dependency_graph,
    cumulative_tables,
    is_extremal,
    occurs,
    sample_product,
)
from .rng import draw_index, make_rng

DEFAULT_ROUND_CAP = 10 ** 6


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs shared by all samplers; the seed fully determines a run."""

    seed: int
    round_cap: int = DEFAULT_ROUND_CAP
    record_log: bool = True
    check_extremal: bool = True


@dataclass
class RunStats:
    """What one run did.

    ``rounds`` counts resampling steps (one event for ``moser_tardos``, one
    round for the others); ``event_resamples[i]`` counts how often event i
    was resampled; ``total_resamples`` is their sum; ``log`` records the
    resampled event ids per round and ``var_log`` the redrawn variable ids.
    """

    rounds: int = 0
    total_resamples: int = 0
    event_resamples: list[int] | None = None
    variable_resamples: int = 0
    halted: bool = False
    log: list[tuple[int, ...]] | None = field(default_factory=list)
    var_log: list[tuple[int, ...]] | None = field(default_factory=list)

    def to_json(self, include_log: bool = False) -> dict:
        out = {
            "rounds": self.rounds,
            "total_resamples": self.total_resamples,
            "per_event": self.event_resamples,
            "variable_resamples": self.variable_resamples,
            "halted": self.halted,
        }
        if include_log:
            out["log"] = None if self.log is None else [list(s) for s in self.log]
            out["var_log"] = (
                None if self.var_log is None else [list(s) for s in self.var_log]
            )
        return out


def _occurring(instance: Instance, sigma) -> list[int]:
    return [e.id for e in instance.events if occurs(e, sigma)]


def moser_tardos(instance: Instance, config: SamplerConfig):
    """Resample one uniformly chosen occurring event per step."""
    rng = make_rng(config.seed)
    tables = cumulative_tables(instance)
    sigma = sample_product(instance, rng, tables)
    stats = RunStats(event_resamples=[0] * instance.num_events)
    if not config.record_log:
        stats.log = stats.var_log = None
    while True:
        bad = _occurring(instance, sigma)
        if not bad:
            stats.halted = True
            return sigma, stats
        if stats.rounds >= config.round_cap:
            raise RoundCapError(
                "round cap %d reached without a valid assignment" % config.round_cap,
                stats,
            )
        i = bad[rng.randrange(len(bad))]
        vbl = instance.events[i].vbl
        for v in vbl:
            sigma[v] = draw_index(rng, tables[v])
        stats.rounds += 1
        stats.total_resamples += 1
        stats.event_resamples[i] += 1
        stats.variable_resamples += len(vbl)
        if stats.log is not None:
            stats.log.append((i,))
            stats.var_log.append(tuple(vbl))


def select_resampling_set(
    instance: Instance,
    sigma,
    graph: DependencyGraph | None = None,
    order: str = "asc",
    _bad: list[int] | None = None,
) -> list[int]:
    """The deterministic resampling set for one assignment.

    Grow R from the occurring events: repeatedly take the unmarked boundary
    of R (events adjacent to R, not yet visited), one BFS round at a time,
    and move each boundary event into R if it is still compatible with the
    current values of R's variables, otherwise mark it excluded. Within a
    round events are processed in ascending id order (``order="desc"``
    flips this; exposed only to probe order sensitivity).

    Deterministic given sigma: no randomness is consumed.
    """
    if order not in ("asc", "desc"):
        raise ValueError("order must be 'asc' or 'desc', got %r" % order)
    if graph is None:
        graph = build_dependency_graph(instance)
    bad = _occurring(instance, sigma) if _bad is None else _bad
    in_r = set(bad)
    marked = set(bad)
    fixed: dict[int, int] = {}
    for i in bad:
        for v in instance.events[i].vbl:
            fixed[v] = sigma[v]
    frontier = bad
    while frontier:
        boundary = set()
        for i in frontier:
            boundary.update(j for j in graph.adjacency[i] if j not in marked)
        marked |= boundary
        frontier = []
        for j in sorted(boundary, reverse=(order == "desc")):
            event = instance.events[j]
            anchored = [
                (pos, fixed[v]) for pos, v in enumerate(event.vbl) if v in fixed
            ]
            if any(
                all(t[pos] == val for pos, val in anchored) for t in event.violating
            ):
                in_r.add(j)
                frontier.append(j)
                for v in event.vbl:
                    fixed.setdefault(v, sigma[v])
    return sorted(in_r)


def _round_loop(instance: Instance, config: SamplerConfig, choose_set):
    """Shared round structure of the two partial-resampling samplers."""
    rng = make_rng(config.seed)
    tables = cumulative_tables(instance)
    sigma = sample_product(instance, rng, tables)
    stats = RunStats(event_resamples=[0] * instance.num_events)
    if not config.record_log:
        stats.log = stats.var_log = None
    while True:
        bad = _occurring(instance, sigma)
        if not bad:
            stats.halted = True
            return sigma, stats
        if stats.rounds >= config.round_cap:
            raise RoundCapError(
                "round cap %d reached without a valid assignment" % config.round_cap,
                stats,
            )
        chosen = choose_set(sigma, bad)
        redraw = sorted({v for i in chosen for v in instance.events[i].vbl})
        for v in redraw:
            sigma[v] = draw_index(rng, tables[v])
        stats.rounds += 1
        stats.total_resamples += len(chosen)
        for i in chosen:
            stats.event_resamples[i] += 1
        stats.variable_resamples += len(redraw)
        if stats.log is not None:
            stats.log.append(tuple(chosen))
            stats.var_log.append(tuple(redraw))


def extremal_prs(
    instance: Instance, config: SamplerConfig, graph: DependencyGraph | None = None
):
    """Resample all occurring events each round; exact on extremal instances.

    Raises ValueError for non-extremal instances unless
    ``config.check_extremal`` is False (that override exists only so tests
    can demonstrate the resulting bias).
    """
    if config.check_extremal and not is_extremal(instance, graph):
        raise ValueError(
            "instance is not extremal; this sampler would be biased "
            "(use general_prs, or disable check_extremal to demonstrate)"
        )
    return _round_loop(instance, config, lambda sigma, bad: bad)


def general_prs(
    instance: Instance, config: SamplerConfig, graph: DependencyGraph | None = None
):
    """Resample the selected resampling set each round; exact on every instance.

    On an extremal instance the selector returns exactly the occurring
    events, so this coincides with ``extremal_prs`` round by round under
    the same seed.
    """
    if graph is None:
        graph = build_dependency_graph(instance)
    return _round_loop(
        instance,
        config,
        lambda sigma, bad: select_resampling_set(instance, sigma, graph, _bad=bad),
    )


SAMPLERS = {
    "moser_tardos": moser_tardos,
    "extremal_prs": extremal_prs,
    "general_prs": general_prs,
}


def run_sampler(kind: str, instance: Instance, config: SamplerConfig):
    """Dispatch by sampler name; see ``SAMPLERS`` for the choices."""
    try:
        fn = SAMPLERS[kind]
    except KeyError:
        raise ValueError(
            "unknown sampler %r; choose from %s" % (kind, sorted(SAMPLERS))
        ) from None
    return fn(instance, config)
