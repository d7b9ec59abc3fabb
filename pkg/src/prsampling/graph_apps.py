"""Graph applications: sink-free orientations, spanning trees, hard-core.

Each application has a specialized sampler written directly against the
graph, plus an encoder producing the equivalent constraint instance so the
specialized and generic samplers can be cross-checked. The specialized
samplers draw fresh values lazily, in ascending vertex/edge id order, via
the same one-uniform-per-draw primitive as the generic samplers, so both
sides of the cross-check consume an identical randomness stream.

Conventions
-----------
* Orientations: one value per edge (u, v) with u < v; 0 points u -> v,
  1 points v -> u.
* Arrow maps: ``arrows[v]`` is the successor of vertex v, with -1 at the
  root. A valid arrow map is one with no directed cycle, i.e. a spanning
  in-tree rooted at ``root``.
* Hard-core configurations: a set of occupied vertices; valid means no two
  occupied vertices are adjacent. Each vertex is independently occupied
  with probability lam/(1+lam), so valid configurations are weighted by
  lam^|occupied|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

from .certified import sqrt_e_leq
from .errors import RoundCapError
from .graphs import Graph, make_graph, simple_cycles
from .model import Instance, make_event, uniform_variable, VariableSpec
from .rng import cumulative_table, derive_seed, draw_index, make_rng
from .sampler import RunStats, SamplerConfig


def _exact(lam, name: str = "lam") -> Fraction:
    if isinstance(lam, float):
        raise TypeError(
            "%s must be exact (int, Fraction or 'a/b' string), got float %r"
            % (name, lam)
        )
    return Fraction(lam)


# --- sink-free orientations ----------------------------------------------


def sink_popping(graph: Graph, config: SamplerConfig):
    """Sample a uniform sink-free orientation.

    Each round re-orients every edge adjacent to a sink. On graphs where
    some component is a tree no sink-free orientation exists and the round
    cap is eventually hit.
    """
    rng = make_rng(config.seed)
    table = cumulative_table((Fraction(1, 2), Fraction(1, 2)))
    orient = [draw_index(rng, table) for _ in graph.edges]
    stats = RunStats(event_resamples=[0] * graph.num_vertices)
    if not config.record_log:
        stats.log = stats.var_log = None

    def is_sink(v: int) -> bool:
        inc = graph.incident_edges[v]
        if not inc:
            return False
        for eid in inc:
            u, w = graph.edges[eid]
            if not ((v == w and orient[eid] == 0) or (v == u and orient[eid] == 1)):
                return False
        return True

    while True:
        sinks = [v for v in range(graph.num_vertices) if is_sink(v)]
        if not sinks:
            stats.halted = True
            return tuple(orient), stats
        if stats.rounds >= config.round_cap:
            raise RoundCapError(
                "round cap %d reached; the graph may have no sink-free "
                "orientation (tree component)" % config.round_cap,
                stats,
            )
        redraw = sorted({eid for v in sinks for eid in graph.incident_edges[v]})
        for eid in redraw:
            orient[eid] = draw_index(rng, table)
        stats.rounds += 1
        stats.total_resamples += len(sinks)
        for v in sinks:
            stats.event_resamples[v] += 1
        stats.variable_resamples += len(redraw)
        if stats.log is not None:
            stats.log.append(tuple(sinks))
            stats.var_log.append(tuple(redraw))


def encode_sink_free(graph: Graph) -> Instance:
    """Constraint instance: edge variables, one sink event per vertex."""
    variables = tuple(uniform_variable(eid, 2) for eid in range(graph.num_edges))
    events = []
    for v in range(graph.num_vertices):
        inc = graph.incident_edges[v]
        if not inc:
            continue
        tup = tuple(0 if v == graph.edges[eid][1] else 1 for eid in inc)
        events.append(make_event(len(events), inc, [tup]))
    return Instance(variables, tuple(events))


# --- spanning trees via cycle popping ------------------------------------


def is_arrow_tree(graph: Graph, root: int, arrows) -> bool:
    """Do the arrows form a spanning in-tree rooted at ``root``?"""
    for v in range(graph.num_vertices):
        if v == root:
            if arrows[v] != -1:
                return False
        elif arrows[v] not in graph.adjacency[v]:
            return False
    reached = [False] * graph.num_vertices
    for s in range(graph.num_vertices):
        path = []
        v = s
        while v != root and not reached[v]:
            if v in path:
                return False
            path.append(v)
            v = arrows[v]
        for u in path:
            reached[u] = True
    return True


def _cycle_vertices(graph: Graph, root: int, arrows) -> tuple[list[int], int]:
    """Vertices lying on directed cycles, plus the number of cycles."""
    n = graph.num_vertices
    color = [0] * n  # 0 new, 1 on current walk, 2 finished
    pos: dict[int, int] = {}
    on_cycles: list[int] = []
    num_cycles = 0
    for s in range(n):
        if color[s] != 0 or s == root:
            continue
        path = []
        v = s
        while True:
            if v == root or color[v] == 2:
                break
            if color[v] == 1:
                on_cycles.extend(path[pos[v]:])
                num_cycles += 1
                break
            color[v] = 1
            pos[v] = len(path)
            path.append(v)
            v = arrows[v]
        for u in path:
            color[u] = 2
        pos.clear()
    return on_cycles, num_cycles


def cycle_popping(graph: Graph, root: int, config: SamplerConfig):
    """Sample a uniform spanning in-tree rooted at ``root``.

    Every non-root vertex draws a uniform neighbor arrow; each round pops
    (redraws) all vertices currently lying on directed cycles.
    """
    if not graph.is_connected():
        raise ValueError("cycle popping requires a connected graph")
    if not 0 <= root < graph.num_vertices:
        raise ValueError("root %d out of range" % root)
    rng = make_rng(config.seed)
    tables = {
        v: cumulative_table(
            (Fraction(1, len(graph.adjacency[v])),) * len(graph.adjacency[v])
        )
        for v in range(graph.num_vertices)
        if v != root
    }
    arrows = [-1] * graph.num_vertices
    for v in range(graph.num_vertices):
        if v != root:
            arrows[v] = graph.adjacency[v][draw_index(rng, tables[v])]
    stats = RunStats(event_resamples=None, log=None)
    if not config.record_log:
        stats.var_log = None
    while True:
        popped, num_cycles = _cycle_vertices(graph, root, arrows)
        if not popped:
            stats.halted = True
            return tuple(arrows), stats
        if stats.rounds >= config.round_cap:
            raise RoundCapError(
                "round cap %d reached in cycle popping" % config.round_cap, stats
            )
        redraw = sorted(popped)
        for v in redraw:
            arrows[v] = graph.adjacency[v][draw_index(rng, tables[v])]
        stats.rounds += 1
        stats.total_resamples += num_cycles
        stats.variable_resamples += len(redraw)
        if stats.var_log is not None:
            stats.var_log.append(tuple(redraw))


def spanning_tree_variables(graph: Graph, root: int) -> tuple[int, ...]:
    """Dense variable order of the spanning-tree encoding: non-root vertices."""
    return tuple(v for v in range(graph.num_vertices) if v != root)


def encode_spanning_tree(graph: Graph, root: int) -> Instance:
    """Constraint instance for rooted spanning trees.

    One variable per non-root vertex (uniform over its sorted neighbors);
    one event per directed-cycle support: adjacent non-root pairs (the
    two-vertex mutual arrows) and longer simple cycles avoiding the root,
    each with its two traversal directions as violating tuples.
    """
    if not graph.is_connected():
        raise ValueError("spanning-tree encoding requires a connected graph")
    vertices = spanning_tree_variables(graph, root)
    var_of = {v: k for k, v in enumerate(vertices)}
    variables = tuple(
        uniform_variable(var_of[v], len(graph.adjacency[v])) for v in vertices
    )
    events = []

    def nbr_index(v: int, u: int) -> int:
        return graph.adjacency[v].index(u)

    for u, v in graph.edges:
        if u == root or v == root:
            continue
        events.append(
            make_event(
                len(events),
                (var_of[u], var_of[v]),
                [(nbr_index(u, v), nbr_index(v, u))],
            )
        )
    for cyc in simple_cycles(graph):
        if root in cyc:
            continue
        forward = tuple(
            nbr_index(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))
        )
        backward = tuple(
            nbr_index(cyc[i], cyc[(i - 1) % len(cyc)]) for i in range(len(cyc))
        )
        events.append(
            make_event(len(events), [var_of[v] for v in cyc], [forward, backward])
        )
    return Instance(variables, tuple(events))


def assignment_to_arrows(graph: Graph, root: int, assignment) -> tuple[int, ...]:
    """Decode a spanning-tree-encoding assignment into an arrow map."""
    arrows = [-1] * graph.num_vertices
    for k, v in enumerate(spanning_tree_variables(graph, root)):
        arrows[v] = graph.adjacency[v][assignment[k]]
    return tuple(arrows)


# --- hard-core model -------------------------------------------------------


def bad_vertices(graph: Graph, occupied) -> frozenset[int]:
    """Vertices in occupied components of size >= 2 (endpoints of occupied edges)."""
    occ = set(occupied)
    out = set()
    for u, v in graph.edges:
        if u in occ and v in occ:
            out.add(u)
            out.add(v)
    return frozenset(out)


def res_vertices(graph: Graph, occupied) -> frozenset[int]:
    """Bad vertices plus their outer boundary: the per-round redraw set."""
    bad = bad_vertices(graph, occupied)
    out = set(bad)
    for v in bad:
        out.update(graph.adjacency[v])
    return frozenset(out)


def hardcore_sample(graph: Graph, lam, config: SamplerConfig):
    """Sample a hard-core configuration with exact weights lam^|occupied|.

    Each round redraws the occupation of every bad vertex (occupied with an
    occupied neighbor) and of every neighbor of a bad vertex.
    ``stats.log`` records the bad edges that triggered each round and
    ``stats.var_log`` the redrawn vertices.
    """
    lam = _exact(lam)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    rng = make_rng(config.seed)
    table = cumulative_table((1 / (1 + lam), lam / (1 + lam)))
    occ = [draw_index(rng, table) for _ in range(graph.num_vertices)]
    stats = RunStats(event_resamples=None)
    if not config.record_log:
        stats.log = stats.var_log = None
    adjacency = graph.adjacency
    bad_edges = [
        eid for eid, (u, v) in enumerate(graph.edges) if occ[u] and occ[v]
    ]
    while True:
        if not bad_edges:
            stats.halted = True
            return frozenset(v for v in range(graph.num_vertices) if occ[v]), stats
        if stats.rounds >= config.round_cap:
            raise RoundCapError(
                "round cap %d reached in hard-core sampling" % config.round_cap, stats
            )
        bad_vs = set()
        for eid in bad_edges:
            u, v = graph.edges[eid]
            bad_vs.add(u)
            bad_vs.add(v)
        res_vs = set(bad_vs)
        for v in bad_vs:
            res_vs.update(adjacency[v])
        redraw = sorted(res_vs)
        resampled_events = 0
        for v in redraw:
            for u in adjacency[v]:
                if u > v and u in res_vs:
                    resampled_events += 1
        for v in redraw:
            occ[v] = draw_index(rng, table)
        stats.rounds += 1
        stats.total_resamples += resampled_events
        stats.variable_resamples += len(redraw)
        if stats.log is not None:
            stats.log.append(tuple(bad_edges))
            stats.var_log.append(tuple(redraw))
        # Only edges touching a redrawn vertex can change badness.
        nxt = set()
        for v in redraw:
            for eid in graph.incident_edges[v]:
                u, w = graph.edges[eid]
                if occ[u] and occ[w]:
                    nxt.add(eid)
        bad_edges = sorted(nxt)


def encode_hardcore(graph: Graph, lam) -> Instance:
    """Constraint instance: vertex occupation variables, one event per edge."""
    lam = _exact(lam)
    w = (1 / (1 + lam), lam / (1 + lam))
    variables = tuple(
        VariableSpec(v, 2, w) for v in range(graph.num_vertices)
    )
    events = tuple(
        make_event(eid, (u, v), [(1, 1)]) for eid, (u, v) in enumerate(graph.edges)
    )
    return Instance(variables, events)


def hardcore_condition(lam, d: int) -> bool:
    """Certified check of lam <= 1 / (2*sqrt(e)*d - 1) for max degree d >= 1."""
    lam = _exact(lam)
    if d < 1:
        raise ValueError("max degree d must be >= 1, got %d" % d)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if lam == 0:
        return True
    # lam*(2*sqrt(e)*d - 1) <= 1  <=>  sqrt(e) <= (1 + lam) / (2*lam*d)
    return sqrt_e_leq((1 + lam) / (2 * lam * d))


# --- counting-ratio bounds -------------------------------------------------


def ratio_bounds(graph: Graph) -> dict:
    """Worst-case one-defect-to-valid counting ratios for the two samplers.

    Sink-free orientations: at most n(n-1) single-sink orientations per
    sink-free one (connected non-tree graphs). Rooted spanning trees: at
    most m*n single-cycle arrow maps per tree (connected graphs).
    """
    n, m = graph.num_vertices, graph.num_edges
    connected = graph.is_connected()
    return {
        "sink_free": {
            "bound": n * (n - 1),
            "applicable": connected and not graph.is_tree(),
        },
        "spanning_tree": {"bound": m * n, "applicable": connected},
    }


# --- exact path analytics --------------------------------------------------


def path_partition(k: int, lam) -> list[Fraction]:
    """Partition values I_0..I_k of hard-core paths: I_j sums lam^|S| over
    independent subsets of a j-vertex path (I_0 = 1, I_1 = lam + 1)."""
    lam = _exact(lam)
    if k < 0:
        raise ValueError("k must be nonnegative")
    vals = [Fraction(1), lam + 1]
    while len(vals) <= k:
        vals.append(vals[-1] + lam * vals[-2])
    return vals[: k + 1]


@dataclass(frozen=True)
class PathEndpointMatrix:
    """Joint endpoint-occupation distribution of a hard-core k-path."""

    k: int
    lam: Fraction
    w: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    @property
    def det(self) -> Fraction:
        return self.w[0][0] * self.w[1][1] - self.w[0][1] * self.w[1][0]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lam": str(self.lam),
            "w": [[str(x) for x in row] for row in self.w],
            "det": str(self.det),
        }


def endpoint_matrix(k: int, lam) -> PathEndpointMatrix:
    """Exact endpoint matrix W_k = [[I_{k-2}, lam*I_{k-3}], [lam*I_{k-3},
    lam^2*I_{k-4}]] / I_k for k >= 4."""
    lam = _exact(lam)
    if k < 4:
        raise ValueError("endpoint matrix needs path length k >= 4, got %d" % k)
    i = path_partition(k, lam)
    denominator = i[k]
    w00 = i[k - 2] / denominator
    w01 = lam * i[k - 3] / denominator
    w11 = lam * lam * i[k - 4] / denominator
    return PathEndpointMatrix(k, lam, ((w00, w01), (w01, w11)))


def corner_matrix(k: int, lam) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Unnormalized corner matrix [[I_{k-2}, I_{k-3}], [I_{k-3}, I_{k-4}]]."""
    lam = _exact(lam)
    if k < 4:
        raise ValueError("corner matrix needs k >= 4, got %d" % k)
    i = path_partition(k, lam)
    return ((i[k - 2], i[k - 3]), (i[k - 3], i[k - 4]))


def alpha(lam) -> float:
    """Asymptotic endpoint-occupation rate 2*lam / (2*lam + sqrt(4*lam+1) + 1)."""
    lam = float(Fraction(lam)) if not isinstance(lam, float) else lam
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return 2 * lam / (2 * lam + sqrt(4 * lam + 1) + 1)


# --- disjoint-paths experiment ---------------------------------------------


def disjoint_paths_graph(n: int, L: int) -> Graph:
    """n/L vertex-disjoint paths of L vertices each, numbered consecutively."""
    if L < 1 or n % L != 0:
        raise ValueError("need L >= 1 dividing n, got n=%d L=%d" % (n, L))
    edges = []
    for start in range(0, n, L):
        edges.extend((v, v + 1) for v in range(start, start + L - 1))
    return make_graph(n, edges)


def disjoint_paths_experiment(
    n: int, L: int, lam, trials: int, base_seed: int, round_cap: int = 10 ** 6
) -> dict:
    """Sample hard-core configurations on disjoint L-paths.

    Aggregates per-trial rounds/resamples and the empirical joint endpoint
    occupation per path, and includes the exact endpoint matrix for
    comparison when L >= 4. Returns a JSON-ready report with CSV-ready rows
    (n, L, lam, trial, rounds, resamples).
    """
    lam = _exact(lam)
    graph = disjoint_paths_graph(n, L)
    counts = [[0, 0], [0, 0]]
    rows = []
    total_rounds = 0
    for t in range(trials):
        cfg = SamplerConfig(
            seed=derive_seed(base_seed, t), round_cap=round_cap, record_log=False
        )
        occupied, stats = hardcore_sample(graph, lam, cfg)
        for start in range(0, n, L):
            counts[1 if start in occupied else 0][
                1 if start + L - 1 in occupied else 0
            ] += 1
        rows.append((n, L, str(lam), t, stats.rounds, stats.total_resamples))
        total_rounds += stats.rounds
    paths = trials * (n // L)
    report = {
        "n": n,
        "L": L,
        "lam": str(lam),
        "trials": trials,
        "base_seed": base_seed,
        "mean_rounds": total_rounds / trials if trials else 0.0,
        "endpoint_freq": [[c / paths for c in row] for row in counts],
        "rows": rows,
    }
    if L >= 4:
        exact = endpoint_matrix(L, lam)
        report["endpoint_exact"] = [[float(x) for x in row] for row in exact.w]
    return report
