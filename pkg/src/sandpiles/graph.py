"""Loop-free multigraphs on vertices 0..n with vertex 0 as the sink."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Iterator

SINK = 0


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class _EdgeView:
    """Shared read-only queries over a pair -> multiplicity mapping."""

    _vertices: frozenset[int]
    _edges: dict[tuple[int, int], int]
    _adj: dict[int, dict[int, int]]

    @property
    def vertices(self) -> frozenset[int]:
        return self._vertices

    @property
    def edges(self) -> Mapping[tuple[int, int], int]:
        return dict(self._edges)

    @property
    def num_edges(self) -> int:
        """Edge count with multiplicity."""
        return sum(self._edges.values())

    def edge_items(self) -> list[tuple[int, int, int]]:
        """Sorted ``(u, v, multiplicity)`` triples with ``u < v``."""
        return sorted((u, v, m) for (u, v), m in self._edges.items())

    def neighbors(self, i: int) -> dict[int, int]:
        """Neighbour -> multiplicity for vertex ``i``."""
        self._check_vertex(i)
        return dict(self._adj[i])

    def multiplicity(self, u: int, v: int) -> int:
        return self._edges.get(_pair(u, v), 0)

    def degree(self, i: int) -> int:
        self._check_vertex(i)
        return sum(self._adj[i].values())

    def _check_vertex(self, i: int) -> None:
        if i not in self._vertices:
            raise ValueError(f"vertex {i} is not in the graph")

    def is_forest(self) -> bool:
        """True when the view has no cycle; a parallel edge counts as a 2-cycle."""
        if any(m > 1 for m in self._edges.values()):
            return False
        parent = {v: v for v in self._vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self._edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


class Multigraph(_EdgeView):
    """Connected loop-free multigraph on ``{0..n}``; vertex 0 is the sink.

    ``edges`` maps unordered pairs to multiplicities. Pairs may be given in
    either order; repeated pairs in an iterable input are summed.
    """

    __slots__ = ("_n", "_vertices", "_edges", "_adj", "_degrees")

    def __init__(self, n: int, edges):
        if n < 1:
            raise ValueError("a sandpile graph needs at least one non-sink vertex")
        self._n = n
        self._vertices = frozenset(range(n + 1))
        items = edges.items() if isinstance(edges, Mapping) else _triples(edges)
        merged: dict[tuple[int, int], int] = {}
        for (u, v), m in items:
            if u == v:
                raise ValueError(f"loop at vertex {u} is not allowed")
            for x in (u, v):
                if not 0 <= x <= n:
                    raise ValueError(f"vertex {x} outside 0..{n}")
            if m < 1:
                raise ValueError(f"multiplicity of {{{u},{v}}} must be positive, got {m}")
            key = _pair(u, v)
            merged[key] = merged.get(key, 0) + m
        self._edges = merged
        self._adj = {i: {} for i in range(n + 1)}
        for (u, v), m in merged.items():
            self._adj[u][v] = m
            self._adj[v][u] = m
        self._degrees = tuple(sum(self._adj[i].values()) for i in range(n + 1))
        if not self._connected():
            raise ValueError("graph is not connected")

    @property
    def n(self) -> int:
        return self._n

    @property
    def degrees(self) -> tuple[int, ...]:
        """Degrees of vertices ``0..n``."""
        return self._degrees

    def degree(self, i: int) -> int:
        self._check_vertex(i)
        return self._degrees[i]

    def _connected(self) -> bool:
        seen = {SINK}
        stack = [SINK]
        while stack:
            u = stack.pop()
            for v in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self._n + 1

    def induced_subgraph(self, subset: Iterable[int]) -> InducedSubgraph:
        return InducedSubgraph(self, subset)

    def edges_within(self, subset: Iterable[int]) -> int:
        """Number of edges (with multiplicity) having both ends in ``subset``."""
        a = check_subset(self, subset)
        return sum(m for (u, v), m in self._edges.items() if u in a and v in a)

    def is_complete(self) -> bool:
        """True for the plain complete graph on ``{0..n}``."""
        n = self._n
        return len(self._edges) == n * (n + 1) // 2 and all(
            m == 1 for m in self._edges.values()
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, frozenset(self._edges.items())))

    def __repr__(self) -> str:
        return f"Multigraph(n={self._n}, edges={self.edge_items()})"


class InducedSubgraph(_EdgeView):
    """Read-only view of ``G(A)`` for ``A`` a set of non-sink vertices.

    The view may be disconnected and never contains the sink.
    """

    def __init__(self, graph: Multigraph, subset: Iterable[int]):
        a = check_subset(graph, subset)
        self.graph = graph
        self._vertices = a
        self._edges = {
            (u, v): m for (u, v), m in graph._edges.items() if u in a and v in a
        }
        self._adj = {i: {} for i in a}
        for (u, v), m in self._edges.items():
            self._adj[u][v] = m
            self._adj[v][u] = m

    def __repr__(self) -> str:
        return f"InducedSubgraph(vertices={sorted(self._vertices)}, edges={self.edge_items()})"


def check_subset(graph: Multigraph, subset: Iterable[int]) -> frozenset[int]:
    """Validate a subset of non-sink vertices and return it frozen."""
    a = frozenset(subset)
    for i in a:
        if i == SINK:
            raise ValueError("vertex subsets may not contain the sink")
        if not 1 <= i <= graph.n:
            raise ValueError(f"vertex {i} outside 1..{graph.n}")
    return a


def _triples(edges) -> Iterator[tuple[tuple[int, int], int]]:
    for e in edges:
        if len(e) == 2:
            u, v = e
            m = 1
        elif len(e) == 3:
            u, v, m = e
        else:
            raise ValueError(f"edge entries need 2 or 3 fields, got {e!r}")
        yield (int(u), int(v)), int(m)


def complete_graph(n: int) -> Multigraph:
    """``K_n`` with the sink attached: every pair of ``{0..n}`` joined once."""
    if n < 1:
        raise ValueError("complete_graph needs n >= 1")
    return Multigraph(n, {(u, v): 1 for u in range(n + 1) for v in range(u + 1, n + 1)})


def complete_graph_multi_sink(n: int, sink_mult: int) -> Multigraph:
    """Complete graph whose sink edges all have multiplicity ``sink_mult``."""
    if n < 1 or sink_mult < 1:
        raise ValueError("complete_graph_multi_sink needs n >= 1 and sink_mult >= 1")
    edges = {(0, v): sink_mult for v in range(1, n + 1)}
    edges.update({(u, v): 1 for u in range(1, n + 1) for v in range(u + 1, n + 1)})
    return Multigraph(n, edges)


def induced_subgraph(graph: Multigraph, subset: Iterable[int]) -> InducedSubgraph:
    return graph.induced_subgraph(subset)


def degree(graph: Multigraph, i: int) -> int:
    return graph.degree(i)


def edges_within(graph: Multigraph, subset: Iterable[int]) -> int:
    return graph.edges_within(subset)


# Small fixture graphs used throughout the tests and docs.

def triangle_pendant_graph() -> Multigraph:
    """Triangle on 1, 2, 3 with a single sink edge at vertex 1."""
    return Multigraph(3, [(0, 1), (1, 2), (2, 3), (3, 1)])


def heavy_pairs_graph() -> Multigraph:
    """Path-like graph with two six-fold bundles and a sink edge at every vertex.

    Vertices 1-2 and 3-4 are joined by six parallel edges, 2-3 and 1-4 by one.
    The configuration ``(0, 5, 5, 5)`` is stable here but not stochastically
    recurrent; its only forbidden subset is ``{1, 2}``.
    """
    return Multigraph(
        4,
        [(1, 2, 6), (2, 3, 1), (3, 4, 6), (1, 4, 1),
         (0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)],
    )
