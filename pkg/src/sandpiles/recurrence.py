"""Recurrence tests for the deterministic (DR) and stochastic (SR) models.

Every verdict carries a witness that is re-checked before it is returned:
a burn order, a forbidden vertex subset, or a compatible orientation.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .dynamics import is_stable, level
from .errors import GuardExceeded, NotRecurrentError
from .flow import FlowNetwork
from .graph import SINK, Multigraph
from .orientation import Orientation, is_compatible

SUBSET_GUARD = 20


@dataclass
class BurnReport:
    """Vertices in the order they burned (sink first) and the unburned rest."""

    burned_order: list[int]
    remain: frozenset[int] = field(default_factory=frozenset)

    @property
    def all_burned(self) -> bool:
        return not self.remain

    def to_json(self) -> dict:
        return {"burned_order": list(self.burned_order), "remain": sorted(self.remain)}


@dataclass
class RecurrenceVerdict:
    """``witness_kind`` is ``"burn_order"``, ``"forbidden_subset"`` or ``"orientation"``."""

    recurrent: bool
    witness_kind: str
    witness: object

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Orientation):
            w = w.to_json()
        elif isinstance(w, BurnReport):
            w = w.burned_order
        return {"recurrent": self.recurrent, "witness_kind": self.witness_kind, "witness": w}

    def __bool__(self) -> bool:
        return self.recurrent


def _require_stable(graph: Multigraph, c: Sequence[int]) -> None:
    if not is_stable(graph, c):
        raise ValueError("configuration is not stable")


def _subset_witness(graph: Multigraph, c: Sequence[int], subset) -> dict:
    a = sorted(subset)
    return {
        "subset": a,
        "grains": sum(c[i - 1] for i in a),
        "edges": graph.edges_within(a),
    }


def _is_forbidden(graph: Multigraph, c: Sequence[int], subset) -> bool:
    """No vertex of a non-empty ``subset`` can burn inside ``G(subset)``."""
    a = set(subset)
    if not a:
        return False
    for i in a:
        d = sum(m for j, m in graph._adj[i].items() if j in a)
        if c[i - 1] >= d:
            return False
    return True


# --------------------------------------------------------------------------
# burning


def dhar_burning(
    graph: Multigraph,
    c: Sequence[int],
    choose: Callable[[Sequence[int]], int] | str | None = None,
) -> BurnReport:
    """Burn the sink, then any vertex holding at least its degree among the unburned.

    ``choose`` selects among the currently burnable vertices (sorted);
    lowest index by default. The remaining set does not depend on it.
    """
    _require_stable(graph, c)
    if choose is None or choose == "min":
        pick = min
    elif choose == "max":
        pick = max
    else:
        pick = choose
    remain = set(range(1, graph.n + 1))
    inner = {i: graph.degrees[i] - graph.multiplicity(i, SINK) for i in remain}
    order = [SINK]
    while True:
        burnable = sorted(i for i in remain if c[i - 1] >= inner[i])
        if not burnable:
            break
        v = pick(burnable)
        remain.remove(v)
        order.append(v)
        for j, m in graph._adj[v].items():
            if j in remain:
                inner[j] -= m
    return BurnReport(order, frozenset(remain))


def _check_burn_order(graph: Multigraph, c: Sequence[int], order: Sequence[int]) -> bool:
    if not order or order[0] != SINK or sorted(order) != list(range(graph.n + 1)):
        return False
    remain = set(order[1:])
    for v in order[1:]:
        d = sum(m for j, m in graph._adj[v].items() if j in remain)
        if c[v - 1] < d:
            return False
        remain.remove(v)
    return True


def is_dr(graph: Multigraph, c: Sequence[int]) -> RecurrenceVerdict:
    """DR test by the burning algorithm."""
    report = dhar_burning(graph, c)
    if report.all_burned:
        if not _check_burn_order(graph, c, report.burned_order):
            raise RuntimeError("burn order failed re-verification")
        return RecurrenceVerdict(True, "burn_order", report.burned_order)
    if not _is_forbidden(graph, c, report.remain):
        raise RuntimeError("unburned set failed re-verification")
    return RecurrenceVerdict(False, "forbidden_subset", _subset_witness(graph, c, report.remain))


# --------------------------------------------------------------------------
# subset sweeps


def _subset_tables(graph: Multigraph, c: Sequence[int], guard: int):
    """Grain and edge totals for every bitmask subset of ``1..n``."""
    n = graph.n
    if n > guard:
        raise GuardExceeded("subset sweep over non-sink vertices", guard)
    size = 1 << n
    grains = [0] * size
    edges = [0] * size
    nbr_mask = []
    for i in range(1, n + 1):
        nbr_mask.append([(1 << (j - 1), m) for j, m in graph._adj[i].items() if j != SINK])
    for mask in range(1, size):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        grains[mask] = grains[rest] + c[low]
        edges[mask] = edges[rest] + sum(m for bit, m in nbr_mask[low] if rest & bit)
    return grains, edges, nbr_mask


def _members(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def is_dr_subset_criterion(graph: Multigraph, c: Sequence[int], guard: int = SUBSET_GUARD) -> RecurrenceVerdict:
    """DR iff every non-empty subset has a vertex with at least its inner degree.

    On failure the witness is the union of all violating subsets, which is
    itself violating (and is the maximal forbidden subconfiguration).
    """
    _require_stable(graph, c)
    n = graph.n
    if n > guard:
        raise GuardExceeded("subset sweep over non-sink vertices", guard)
    nbr_mask = [[(1 << (j - 1), m) for j, m in graph._adj[i].items() if j != SINK]
                for i in range(1, n + 1)]
    union = 0
    for mask in range(1, 1 << n):
        ok = False
        m_ = mask
        i = 0
        while m_:
            if m_ & 1:
                d = 0
                for bit, m in nbr_mask[i]:
                    if mask & bit:
                        d += m
                if c[i] >= d:
                    ok = True
                    break
            m_ >>= 1
            i += 1
        if not ok:
            union |= mask
    if not union:
        return RecurrenceVerdict(True, "forbidden_subset", None)
    a = _members(union)
    if not _is_forbidden(graph, c, a):
        raise RuntimeError("forbidden subset failed re-verification")
    return RecurrenceVerdict(False, "forbidden_subset", _subset_witness(graph, c, a))


def is_sr_subset_criterion(graph: Multigraph, c: Sequence[int], guard: int = SUBSET_GUARD) -> RecurrenceVerdict:
    """SR iff ``c(A) >= |E(G(A))|`` for every subset ``A`` of non-sink vertices.

    On failure the witness is a smallest violating subset (lowest bitmask
    among those of that size).
    """
    _require_stable(graph, c)
    grains, edges, _ = _subset_tables(graph, c, guard)
    best = None
    for mask in range(1, len(grains)):
        if grains[mask] < edges[mask]:
            key = (bin(mask).count("1"), mask)
            if best is None or key < best:
                best = key
    if best is None:
        return RecurrenceVerdict(True, "forbidden_subset", None)
    a = _members(best[1])
    w = _subset_witness(graph, c, a)
    if w["grains"] >= w["edges"]:
        raise RuntimeError("violating subset failed re-verification")
    return RecurrenceVerdict(False, "forbidden_subset", w)


# --------------------------------------------------------------------------
# orientations


def find_compatible_acyclic_orientation(graph: Multigraph, c: Sequence[int]) -> Orientation | None:
    """Acyclic sink-rooted orientation compatible with ``c``, built from a burn order.

    Each edge points from the later-burned endpoint to the earlier one.
    """
    report = dhar_burning(graph, c)
    if not report.all_burned:
        return None
    rank = {v: r for r, v in enumerate(report.burned_order)}
    arcs = []
    for u, v, m in graph.edge_items():
        t, h = (u, v) if rank[u] > rank[v] else (v, u)
        arcs.extend((t, h, k) for k in range(m))
    o = Orientation(graph, arcs)
    if not (o.is_acyclic() and o.is_sink_rooted() and is_compatible(o, c)):
        raise RuntimeError("burn-order orientation failed re-verification")
    return o


def _orientation_flow(graph: Multigraph, c: Sequence[int]):
    """Route every inner edge to an endpoint without exceeding ``c`` there.

    Returns ``(saturated, orientation_or_None, violating_subset_or_None)``.
    """
    n = graph.n
    pairs = [(u, v, m) for u, v, m in graph.edge_items() if u != SINK]
    total = sum(m for _, _, m in pairs)
    s = 0
    vertex_node = {i: 1 + len(pairs) + (i - 1) for i in range(1, n + 1)}
    t = 1 + len(pairs) + n
    net = FlowNetwork(t + 1)
    into = []
    for k, (u, v, m) in enumerate(pairs):
        node = 1 + k
        net.add_edge(s, node, m)
        into.append((net.add_edge(node, vertex_node[u], m), net.add_edge(node, vertex_node[v], m)))
    for i in range(1, n + 1):
        net.add_edge(vertex_node[i], t, c[i - 1])
    value = net.max_flow(s, t)
    if value == total:
        arcs = []
        for (u, v, m), (to_u, to_v) in zip(pairs, into):
            fu = net.flow_on(to_u)
            arcs.extend((v, u, k) for k in range(fu))
            arcs.extend((u, v, k) for k in range(fu, m))
        for u, v, m in graph.edge_items():
            if u == SINK:
                arcs.extend((v, SINK, k) for k in range(m))
        return True, Orientation(graph, arcs), None
    side = net.reachable(s)
    subset = [i for i, node in vertex_node.items() if node in side]
    return False, None, subset


def is_sr_flow(graph: Multigraph, c: Sequence[int]) -> RecurrenceVerdict:
    """SR test via in-degree-bounded orientation of the sink-deleted graph (max-flow).

    Success yields a compatible sink-rooted orientation; failure converts the
    minimum cut into a subset with fewer grains than inner edges.
    """
    _require_stable(graph, c)
    ok, o, subset = _orientation_flow(graph, c)
    if ok:
        if not (is_compatible(o, c) and o.is_sink_rooted()):
            raise RuntimeError("flow orientation failed re-verification")
        return RecurrenceVerdict(True, "orientation", o)
    w = _subset_witness(graph, c, subset)
    if not subset or w["grains"] >= w["edges"]:
        raise RuntimeError("min-cut subset failed re-verification")
    return RecurrenceVerdict(False, "forbidden_subset", w)


def find_compatible_sink_rooted_orientation(graph: Multigraph, c: Sequence[int]) -> Orientation | None:
    """A sink-rooted orientation with in-degrees bounded by ``c``, if one exists.

    Sink edges all point into the sink. Stability of ``c`` rules out any
    other root: a non-sink root would need ``c_i >= deg(i)``.
    """
    v = is_sr_flow(graph, c)
    return v.witness if v.recurrent else None


# --------------------------------------------------------------------------
# minimality


def is_minimal_recurrent(graph: Multigraph, c: Sequence[int], model: str = "sr") -> bool:
    """Minimal recurrent iff the level is zero; ``model`` is ``"dr"`` or ``"sr"``."""
    model = model.lower()
    if model == "dr":
        verdict = is_dr(graph, c)
    elif model == "sr":
        verdict = is_sr_flow(graph, c)
    else:
        raise ValueError(f"unknown model {model!r}")
    if not verdict.recurrent:
        raise NotRecurrentError(f"configuration is not {model.upper()}", verdict.witness)
    return level(graph, c) == 0


def exact_indegree_orientation(graph: Multigraph, c: Sequence[int], model: str = "sr") -> Orientation | None:
    """A sink-rooted (acyclic for ``"dr"``) orientation with in-degree exactly ``c_i``."""
    if model == "dr":
        o = find_compatible_acyclic_orientation(graph, c)
    else:
        o = find_compatible_sink_rooted_orientation(graph, c)
    if o is None:
        return None
    deg = o.in_degrees()
    if all(deg[i] == c[i - 1] for i in range(1, graph.n + 1)):
        return o
    return None
