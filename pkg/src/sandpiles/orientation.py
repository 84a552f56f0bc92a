"""Orientations of multigraphs: one direction per edge copy."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from typing import Iterator

from .graph import SINK, Multigraph, _EdgeView

Arc = tuple[int, int, int]  # (tail, head, copy_index)


class Orientation:
    """Direction assignment for every edge copy of ``graph``.

    ``arcs`` holds one ``(tail, head, copy)`` triple per edge copy, where
    ``copy`` ranges over ``0..multiplicity-1`` of the pair ``{tail, head}``.
    ``graph`` may be a :class:`Multigraph` or an induced-subgraph view.
    """

    __slots__ = ("graph", "arcs", "_key")

    def __init__(self, graph: _EdgeView, arcs: Iterable[Sequence[int]]):
        self.graph = graph
        arcs = tuple(sorted((int(t), int(h), int(k)) for t, h, k in arcs))
        expected = {
            (u, v, k) for u, v, m in graph.edge_items() for k in range(m)
        }
        got = [(min(t, h), max(t, h), k) for t, h, k in arcs]
        if len(got) != len(set(got)) or set(got) != expected:
            raise ValueError("arcs must direct every edge copy exactly once")
        self.arcs = arcs
        self._key = frozenset(arcs)

    @classmethod
    def from_heads(cls, graph: _EdgeView, heads: dict[tuple[int, int, int], int]) -> Orientation:
        """Build from ``{(u, v, copy): head}`` with ``u < v``."""
        arcs = []
        for (u, v, k), h in heads.items():
            if h not in (u, v):
                raise ValueError(f"head {h} is not an endpoint of {{{u},{v}}}")
            arcs.append((v if h == u else u, h, k))
        return cls(graph, arcs)

    def vertices(self) -> list[int]:
        return sorted(self.graph.vertices)

    def in_degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.graph.vertices}
        for _, h, _ in self.arcs:
            deg[h] += 1
        return deg

    def out_degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.graph.vertices}
        for t, _, _ in self.arcs:
            deg[t] += 1
        return deg

    def roots(self) -> list[int]:
        out = self.out_degrees()
        return sorted(v for v, d in out.items() if d == 0)

    def is_sink_rooted(self) -> bool:
        return self.roots() == [SINK]

    def find_cycle(self) -> list[Arc] | None:
        """Some directed cycle as a list of arcs, or None when acyclic."""
        out: dict[int, list[Arc]] = {v: [] for v in self.graph.vertices}
        for a in self.arcs:
            out[a[0]].append(a)
        color = {v: 0 for v in out}
        for root in sorted(out):
            if color[root]:
                continue
            path: list[Arc] = []
            stack = [(root, iter(out[root]))]
            color[root] = 1
            while stack:
                v, it = stack[-1]
                arc = next(it, None)
                if arc is None:
                    color[v] = 2
                    stack.pop()
                    if path:
                        path.pop()
                    continue
                w = arc[1]
                if color[w] == 1:
                    # w is on the current path; cut the cycle out of it
                    cycle = [arc]
                    for a in reversed(path):
                        cycle.append(a)
                        if a[0] == w:
                            break
                    return list(reversed(cycle[1:])) + [arc] if len(cycle) > 1 else [arc]
                if color[w] == 0:
                    color[w] = 1
                    path.append(arc)
                    stack.append((w, iter(out[w])))
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def to_json(self) -> list[list[int]]:
        return [list(a) for a in self.arcs]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Orientation):
            return NotImplemented
        return self._key == other._key and self.graph.edge_items() == other.graph.edge_items()

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Orientation({list(self.arcs)})"


def in_degrees(o: Orientation) -> tuple[int, ...]:
    """In-degrees listed over the sorted vertex set of the host graph."""
    deg = o.in_degrees()
    return tuple(deg[v] for v in sorted(deg))


def is_compatible(o: Orientation, c: Sequence[int]) -> bool:
    """True when ``c_i`` is at least the in-degree of every non-sink vertex ``i``."""
    deg = o.in_degrees()
    non_sink = [v for v in sorted(deg) if v != SINK]
    if len(c) < max(non_sink, default=0) or (
        isinstance(o.graph, Multigraph) and len(c) != o.graph.n
    ):
        raise ValueError("configuration size does not match the orientation's graph")
    return all(c[v - 1] >= deg[v] for v in non_sink)


def flip_cycle(o: Orientation, cycle: Sequence[Sequence[int]]) -> Orientation:
    """Reverse every arc of a directed cycle of ``o``."""
    cyc = [tuple(a) for a in cycle]
    if not cyc:
        raise ValueError("empty cycle")
    present = set(o.arcs)
    for a in cyc:
        if a not in present:
            raise ValueError(f"arc {a} is not in the orientation")
    if len(set(cyc)) != len(cyc):
        raise ValueError("cycle repeats an arc")
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if a[1] != b[0]:
            raise ValueError("arcs do not form a closed directed walk")
    flipped = set(cyc)
    arcs = [(h, t, k) if (t, h, k) in flipped else (t, h, k) for t, h, k in o.arcs]
    return Orientation(o.graph, arcs)


def score_equivalent(a: Orientation, b: Orientation) -> bool:
    if a.graph.edge_items() != b.graph.edge_items() or a.graph.vertices != b.graph.vertices:
        raise ValueError("orientations live on different graphs")
    return a.in_degrees() == b.in_degrees()


def all_orientations(graph: _EdgeView) -> Iterator[Orientation]:
    """Every orientation of ``graph`` (2 to the number of edge copies)."""
    copies = [(u, v, k) for u, v, m in graph.edge_items() for k in range(m)]
    for bits in itertools.product((0, 1), repeat=len(copies)):
        yield Orientation(
            graph,
            [(u, v, k) if b else (v, u, k) for (u, v, k), b in zip(copies, bits)],
        )
