"""Simple undirected graphs: the substrate for the sampling applications."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from .errors import BudgetError

MAX_CYCLE_SPACE_DIM = 20
MAX_ENUMERATED_CYCLES = 10 ** 5


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph with dense 0-based vertex ids.

    Edges are stored as (u, v) with u < v, sorted lexicographically; the
    position of an edge in ``edges`` is its edge id.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        prev = None
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.num_vertices):
                raise ValueError(
                    "edge %r invalid for %d vertices (need 0 <= u < v)"
                    % (e, self.num_vertices)
                )
            if e in seen:
                raise ValueError("duplicate edge %r" % (e,))
            if prev is not None and e < prev:
                raise ValueError("edges must be sorted lexicographically")
            seen.add(e)
            prev = e

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor lists."""
        neigh = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges:
            neigh[u].append(v)
            neigh[v].append(u)
        return tuple(tuple(sorted(ns)) for ns in neigh)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        """Sorted incident edge ids per vertex."""
        inc = [[] for _ in range(self.num_vertices)]
        for eid, (u, v) in enumerate(self.edges):
            inc[u].append(eid)
            inc[v].append(eid)
        return tuple(tuple(ids) for ids in inc)

    @cached_property
    def num_components(self) -> int:
        seen = [False] * self.num_vertices
        count = 0
        for s in range(self.num_vertices):
            if seen[s]:
                continue
            count += 1
            stack = [s]
            seen[s] = True
            while stack:
                v = stack.pop()
                for u in self.adjacency[v]:
                    if not seen[u]:
                        seen[u] = True
                        stack.append(u)
        return count

    @property
    def cycle_space_dim(self) -> int:
        """|E| - |V| + (number of components): 2**this counts cycle-space elements."""
        return self.num_edges - self.num_vertices + self.num_components

    def is_connected(self) -> bool:
        return self.num_vertices == 0 or self.num_components == 1

    def is_tree(self) -> bool:
        return self.is_connected() and self.num_edges == self.num_vertices - 1


def make_graph(num_vertices: int, edges) -> Graph:
    """Normalize edges ((u, v) in any order/sequence) into a Graph."""
    norm = sorted({(min(u, v), max(u, v)) for u, v in edges})
    return Graph(num_vertices, tuple(norm))


def path_graph(k: int) -> Graph:
    return make_graph(k, [(i, i + 1) for i in range(k - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle graph needs at least 3 vertices")
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_regular_graph(d: int, n: int, seed: int) -> Graph:
    """A uniformly sampled simple d-regular graph on n vertices."""
    g = nx.random_regular_graph(d, n, seed=seed)
    return make_graph(n, g.edges())


def simple_cycles(
    graph: Graph,
    max_cycles: int = MAX_ENUMERATED_CYCLES,
    max_dim: int = MAX_CYCLE_SPACE_DIM,
) -> list[tuple[int, ...]]:
    """All simple cycles (length >= 3), canonicalized and sorted.

    Each cycle is returned in traversal order starting at its smallest
    vertex, continuing toward that vertex's smaller cycle-neighbor.
    Guarded by the cycle-space dimension and an enumeration cap.
    """
    if graph.cycle_space_dim > max_dim:
        raise BudgetError(
            "cycle space dimension %d exceeds cap %d; too many cycles to enumerate"
            % (graph.cycle_space_dim, max_dim)
        )
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_vertices))
    g.add_edges_from(graph.edges)
    out = []
    for cyc in nx.simple_cycles(g):
        if len(out) >= max_cycles:
            raise BudgetError(
                "more than %d simple cycles; enumeration cap exceeded" % max_cycles
            )
        k = cyc.index(min(cyc))
        rot = cyc[k:] + cyc[:k]
        if rot[1] > rot[-1]:
            rot = [rot[0]] + rot[:0:-1]
        out.append(tuple(rot))
    out.sort(key=lambda c: (len(c), c))
    return out


def parse_edge_list(text: str) -> tuple[Graph, list[int]]:
    """Parse 'u v' lines ('#' starts a comment) into a Graph.

    Vertex labels are arbitrary nonnegative integers and are compacted to
    dense ids; the returned list maps dense id -> original label.
    """
    pairs = []
    labels = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(
                "line %d: expected 'u v', got %r" % (lineno, raw.rstrip())
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(
                "line %d: vertex labels must be integers, got %r" % (lineno, raw.rstrip())
            ) from None
        if u < 0 or v < 0:
            raise ValueError("line %d: vertex labels must be nonnegative" % lineno)
        if u == v:
            raise ValueError("line %d: self-loop %d-%d not allowed" % (lineno, u, v))
        pairs.append((u, v))
        labels.update((u, v))
    ordered = sorted(labels)
    dense = {lab: i for i, lab in enumerate(ordered)}
    edges = set()
    for u, v in pairs:
        e = (min(dense[u], dense[v]), max(dense[u], dense[v]))
        if e in edges:
            raise ValueError("duplicate edge %d-%d" % (u, v))
        edges.add(e)
    return Graph(len(ordered), tuple(sorted(edges))), ordered


def write_edge_list(graph: Graph, labels: list[int] | None = None) -> str:
    """Inverse of parse_edge_list (identity labels by default)."""
    if labels is None:
        labels = list(range(graph.num_vertices))
    return "".join("%d %d\n" % (labels[u], labels[v]) for u, v in graph.edges)
