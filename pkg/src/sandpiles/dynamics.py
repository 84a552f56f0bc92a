"""Configurations, toppling operators and stabilisation engines.

Configurations are plain tuples ``(c_1, ..., c_n)`` of non-negative grain
counts; the sink holds no count. Vertex labels are 1-based in every public
function, so ``c[i - 1]`` is the count at vertex ``i``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import GuardExceeded
from .graph import SINK, Multigraph

Config = tuple[int, ...]
Policy = Callable[[Sequence[int]], int]

DEFAULT_STATE_BUDGET = 10**6


# --------------------------------------------------------------------------
# configuration helpers


def parse_config(text: str) -> Config:
    """Parse ``"1,1,1"`` into a configuration tuple."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"malformed configuration {text!r}")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"malformed configuration {text!r}") from None
    if any(v < 0 for v in values):
        raise ValueError("grain counts must be non-negative")
    return values


def format_config(c: Iterable[int]) -> str:
    return ",".join(str(v) for v in c)


def _check_length(graph: Multigraph, c: Sequence[int]) -> None:
    if len(c) != graph.n:
        raise ValueError(f"configuration has {len(c)} entries, graph has {graph.n} non-sink vertices")


def _check_vertex(graph: Multigraph, i: int) -> None:
    if i == SINK:
        raise ValueError("the sink holds no grains and never topples")
    if not 1 <= i <= graph.n:
        raise ValueError(f"vertex {i} outside 1..{graph.n}")


def max_stable(graph: Multigraph) -> Config:
    return tuple(d - 1 for d in graph.degrees[1:])


def is_stable(graph: Multigraph, c: Sequence[int]) -> bool:
    _check_length(graph, c)
    deg = graph.degrees
    return all(c[i] < deg[i + 1] for i in range(graph.n))


def is_unstable_at(graph: Multigraph, c: Sequence[int], i: int) -> bool:
    _check_length(graph, c)
    _check_vertex(graph, i)
    return c[i - 1] >= graph.degrees[i]


def is_superstable(graph: Multigraph, c: Sequence[int]) -> bool:
    _check_length(graph, c)
    deg = graph.degrees
    return all(c[i] < deg[i + 1] - 1 for i in range(graph.n))


def level(graph: Multigraph, c: Sequence[int]) -> int:
    return sum(c) + graph.degrees[SINK] - graph.num_edges


def add_grain(c: Sequence[int], i: int) -> Config:
    if i == SINK:
        raise ValueError("cannot add a grain to the sink")
    if not 1 <= i <= len(c):
        raise ValueError(f"vertex {i} outside 1..{len(c)}")
    out = list(c)
    out[i - 1] += 1
    return tuple(out)


# --------------------------------------------------------------------------
# precomputed per-graph data


@dataclass(frozen=True)
class _Topology:
    n: int
    deg: tuple[int, ...]  # indexed by vertex 0..n
    # per vertex: ((neighbour, multiplicity), ...) with non-sink neighbours
    # ascending and the sink last; this is also the coin order
    nbrs: tuple[tuple[tuple[int, int], ...], ...]


@lru_cache(maxsize=256)
def _topology(graph: Multigraph) -> _Topology:
    nbrs = []
    for i in range(graph.n + 1):
        adj = graph._adj[i]
        order = sorted(adj, key=lambda j: (j == SINK, j))
        nbrs.append(tuple((j, adj[j]) for j in order))
    return _Topology(graph.n, graph.degrees, tuple(nbrs))


@dataclass(frozen=True)
class _Move:
    delta: tuple[int, ...]  # change applied to the configuration
    sent: tuple[tuple[int, int], ...]  # (neighbour, grains) with grains > 0
    count: int  # grains leaving the toppling vertex
    ways: int  # number of edge-copy subsets producing this move


@lru_cache(maxsize=4096)
def _moves(graph: Multigraph, i: int, stochastic: bool) -> tuple[_Move, ...]:
    """All toppling moves at ``i``; a single full toppling if deterministic.

    Stochastic moves cover every non-empty multiset of edge copies, grouped
    by how many copies go to each neighbour.
    """
    top = _topology(graph)
    nb = top.nbrs[i]
    choices = [range(m, m + 1) for _, m in nb] if not stochastic else [range(m + 1) for _, m in nb]
    moves = []
    for ks in itertools.product(*choices):
        total = sum(ks)
        if total == 0:
            continue
        delta = [0] * top.n
        delta[i - 1] -= total
        sent = []
        ways = 1
        for (j, m), k in zip(nb, ks):
            if k:
                sent.append((j, k))
                if j != SINK:
                    delta[j - 1] += k
            ways *= math.comb(m, k)
        moves.append(_Move(tuple(delta), tuple(sent), total, ways))
    return tuple(moves)


def _apply(c: Config, delta: tuple[int, ...]) -> Config:
    return tuple(a + b for a, b in zip(c, delta))


def _unstable(deg: tuple[int, ...], c: Sequence[int]) -> list[int]:
    return [i + 1 for i, v in enumerate(c) if v >= deg[i + 1]]


def _first_unstable(deg: tuple[int, ...], c: Sequence[int]) -> int:
    for i, v in enumerate(c):
        if v >= deg[i + 1]:
            return i + 1
    return 0


def _last_unstable(deg: tuple[int, ...], c: Sequence[int]) -> int:
    for i in range(len(c) - 1, -1, -1):
        if c[i] >= deg[i + 1]:
            return i + 1
    return 0


def _resolve_policy(policy) -> Policy:
    if policy is None or policy == "min":
        return min
    if policy == "max":
        return max
    if callable(policy):
        return policy
    raise ValueError(f"unknown policy {policy!r}")


# --------------------------------------------------------------------------
# deterministic dynamics


@dataclass
class StabilizationTrace:
    """Result of a stabilisation plus the toppling record that produced it.

    ``order`` lists ``(vertex, {neighbour: grains_sent})`` per toppling, with
    grains sent to the sink keyed by 0.
    """

    result: Config
    topple_counts: tuple[int, ...]
    order: list[tuple[int, dict[int, int]]] = field(default_factory=list)

    @property
    def absorbed(self) -> int:
        return sum(sent.get(SINK, 0) for _, sent in self.order)

    def to_json(self) -> dict:
        return {
            "result": list(self.result),
            "topple_counts": list(self.topple_counts),
            "order": [
                {"vertex": v, "sent": {str(j): k for j, k in sorted(sent.items())}}
                for v, sent in self.order
            ],
        }


def det_topple(graph: Multigraph, c: Sequence[int], i: int) -> Config:
    """Fire vertex ``i`` once, sending one grain along every incident edge copy."""
    if not is_unstable_at(graph, c, i):
        raise ValueError(f"vertex {i} is stable and cannot topple")
    return _apply(tuple(c), _moves(graph, i, False)[0].delta)


def det_stabilize(graph: Multigraph, c: Sequence[int], policy=None) -> StabilizationTrace:
    """Topple unstable vertices until stable.

    ``policy`` picks the next vertex from the sorted list of unstable ones;
    ``"min"`` (default) or ``"max"`` or any callable.
    """
    _check_length(graph, c)
    choose = _resolve_policy(policy)
    deg = graph.degrees
    cur = list(c)
    counts = [0] * graph.n
    order = []
    while True:
        unstable = _unstable(deg, cur)
        if not unstable:
            break
        i = choose(unstable)
        move = _moves(graph, i, False)[0]
        for k, d in enumerate(move.delta):
            cur[k] += d
        counts[i - 1] += 1
        order.append((i, dict(move.sent)))
    return StabilizationTrace(tuple(cur), tuple(counts), order)


def det_stabilize_fast(graph: Multigraph, c: Sequence[int]) -> Config:
    """Deterministic stabilisation without a trace (batched firings)."""
    cur = list(c)
    _det_fire_all(_topology(graph), cur)
    return tuple(cur)


def _det_fire_all(top: _Topology, cur: list[int]) -> int:
    """Stabilise ``cur`` in place; return the number of firings."""
    deg = top.deg
    queue = deque(i + 1 for i, v in enumerate(cur) if v >= deg[i + 1])
    queued = set(queue)
    fired = 0
    while queue:
        i = queue.popleft()
        queued.discard(i)
        times = cur[i - 1] // deg[i]
        if times == 0:
            continue
        fired += times
        cur[i - 1] -= times * deg[i]
        for j, m in top.nbrs[i]:
            if j != SINK:
                cur[j - 1] += times * m
                if cur[j - 1] >= deg[j] and j not in queued:
                    queue.append(j)
                    queued.add(j)
    return fired


def replay(graph: Multigraph, c: Sequence[int], order) -> Config:
    """Re-apply a recorded toppling order, checking each firing was legal."""
    deg = graph.degrees
    cur = list(c)
    for i, sent in order:
        if cur[i - 1] < deg[i]:
            raise ValueError(f"recorded toppling at stable vertex {i}")
        for j, k in sent.items():
            cur[i - 1] -= k
            if j != SINK:
                cur[j - 1] += k
    return tuple(cur)


# --------------------------------------------------------------------------
# sampled stochastic dynamics


class CoinTape:
    """Source of Bernoulli coins that records or replays its outcomes.

    With a numpy ``Generator`` every draw is appended to ``flips``; without
    one, the tape replays ``flips`` in order.
    """

    def __init__(self, rng: np.random.Generator | None = None, flips: Iterable[bool] = ()):
        self.rng = rng
        self.flips = [bool(f) for f in flips]
        self._pos = 0

    def draw(self, count: int, p: float) -> list[bool]:
        if self.rng is not None:
            out = (self.rng.random(count) < p).tolist()
            self.flips.extend(out)
            return out
        if self._pos + count > len(self.flips):
            raise ValueError("coin tape exhausted")
        out = self.flips[self._pos:self._pos + count]
        self._pos += count
        return out


def _draw(rng, count: int, p: float) -> list[bool]:
    if isinstance(rng, CoinTape):
        return rng.draw(count, p)
    return (rng.random(count) < p).tolist()


def _check_p(p) -> float:
    p = float(p)
    if not 0 < p < 1:
        raise ValueError(f"toppling probability must lie in (0, 1), got {p}")
    return p


def _sto_fire(top: _Topology, cur: list[int], i: int, p: float, rng) -> dict[int, int]:
    """Flip one coin per edge copy at ``i`` and move grains in place."""
    coins = _draw(rng, top.deg[i], p)
    sent: dict[int, int] = {}
    pos = 0
    for j, m in top.nbrs[i]:
        k = sum(coins[pos:pos + m])
        pos += m
        if k:
            sent[j] = k
            cur[i - 1] -= k
            if j != SINK:
                cur[j - 1] += k
    return sent


def sto_topple_sampled(graph: Multigraph, c: Sequence[int], i: int, p: float, rng) -> Config:
    """One stochastic toppling: each edge copy at ``i`` carries a grain w.p. ``p``.

    Coins are consumed in neighbour order (non-sink neighbours ascending,
    then the sink), one per edge copy. ``rng`` is a numpy ``Generator`` or a
    :class:`CoinTape`.
    """
    p = _check_p(p)
    if not is_unstable_at(graph, c, i):
        raise ValueError(f"vertex {i} is stable and cannot topple")
    cur = list(c)
    _sto_fire(_topology(graph), cur, i, p, rng)
    return tuple(cur)


def sto_stabilize_sampled(
    graph: Multigraph,
    c: Sequence[int],
    p: float,
    rng,
    stochastic: Iterable[int] | None = None,
    policy=None,
) -> StabilizationTrace:
    """Sample a stabilisation; vertices in ``stochastic`` (default: all) flip coins.

    Vertices outside ``stochastic`` topple deterministically. A stochastic
    toppling that moves nothing is kept out of ``order`` and simply retried.
    """
    _check_length(graph, c)
    p = _check_p(p)
    top = _topology(graph)
    sto = set(range(1, graph.n + 1)) if stochastic is None else set(stochastic)
    choose = _resolve_policy(policy)
    deg = top.deg
    cur = list(c)
    counts = [0] * graph.n
    order = []
    while True:
        unstable = _unstable(deg, cur)
        if not unstable:
            break
        i = choose(unstable)
        if i in sto:
            sent = _sto_fire(top, cur, i, p, rng)
            if not sent:
                continue
        else:
            move = _moves(graph, i, False)[0]
            for k, d in enumerate(move.delta):
                cur[k] += d
            sent = dict(move.sent)
        counts[i - 1] += 1
        order.append((i, sent))
    return StabilizationTrace(tuple(cur), tuple(counts), order)


# --------------------------------------------------------------------------
# branching engines


def stabilization_outcomes(
    graph: Multigraph,
    c: Sequence[int],
    stochastic_set: Iterable[int] = (),
    *,
    budget: int = DEFAULT_STATE_BUDGET,
    all_orders: bool = False,
) -> frozenset[Config]:
    """Stable configurations reachable from ``c`` with positive probability.

    Vertices in ``stochastic_set`` may topple along any non-empty set of edge
    copies; the rest fire fully. By default the lowest-index unstable vertex
    topples first; ``all_orders=True`` branches over every unstable vertex as
    well (an order-independence oracle, much slower).
    """
    _check_length(graph, c)
    sto = frozenset(stochastic_set)
    for v in sto:
        _check_vertex(graph, v)
    deg = graph.degrees
    start = tuple(c)
    seen = {start}
    stack = [start]
    stable = set()
    while stack:
        cur = stack.pop()
        unstable = _unstable(deg, cur)
        if not unstable:
            stable.add(cur)
            continue
        for i in (unstable if all_orders else unstable[:1]):
            for mv in _moves(graph, i, i in sto):
                nxt = _apply(cur, mv.delta)
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > budget:
                        raise GuardExceeded("stabilisation state space", budget)
                    stack.append(nxt)
    return frozenset(stable)


def _as_fraction(p) -> Fraction:
    if isinstance(p, float):
        raise TypeError("exact engine needs a rational p (Fraction, 'num/den' or (num, den)), not float")
    if isinstance(p, tuple):
        p = Fraction(*p)
    elif isinstance(p, str):
        if "/" not in p:
            raise ValueError(f"exact engine needs p as 'num/den', got {p!r}")
        p = Fraction(p)
    else:
        p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"toppling probability must lie in (0, 1), got {p}")
    return p


def exact_outcome_distribution(
    graph: Multigraph,
    c: Sequence[int],
    p,
    policy="min",
    *,
    budget: int = DEFAULT_STATE_BUDGET,
) -> dict[Config, Fraction]:
    """Exact law of the stochastic stabilisation of ``c`` under a toppling policy.

    Every vertex topples stochastically with rational probability ``p``. The
    all-tails toppling is a pure self-loop and is folded out by renormalising
    over the non-empty moves; cycles between unstable configurations are
    solved exactly, one strongly connected block at a time.
    """
    _check_length(graph, c)
    p = _as_fraction(p)
    if policy in (None, "min"):
        pick = _first_unstable
    elif policy == "max":
        pick = _last_unstable
    elif callable(policy):
        def pick(deg, cfg, _choose=policy):
            u = _unstable(deg, cfg)
            return _choose(u) if u else 0
    else:
        raise ValueError(f"unknown policy {policy!r}")

    deg = graph.degrees
    q = 1 - p
    start = tuple(c)
    trans: dict[Config, list[tuple[Config, Fraction]]] = {}
    stack = [start]
    seen = {start}
    while stack:
        cur = stack.pop()
        i = pick(deg, cur)
        if i == 0:
            continue
        d = deg[i]
        norm = 1 - q**d
        out = []
        for mv in _moves(graph, i, True):
            nxt = _apply(cur, mv.delta)
            out.append((nxt, mv.ways * p**mv.count * q ** (d - mv.count) / norm))
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > budget:
                    raise GuardExceeded("stabilisation state space", budget)
                stack.append(nxt)
        trans[cur] = out

    if start not in trans:
        return {start: Fraction(1)}
    dist = _absorb(trans)
    return dict(sorted(dist[start].items()))


def _absorb(trans):
    """Absorption laws for every transient state of a finite chain.

    ``trans`` maps transient states to ``[(next_state, prob), ...]``; states
    absent from ``trans`` are absorbing. Strongly connected blocks are
    processed in reverse topological order (Tarjan) and each block's linear
    system is solved by exact Gauss-Jordan elimination.
    """
    index: dict = {}
    low: dict = {}
    on_stack = set()
    tstack = []
    blocks = []
    counter = 0

    # iterative Tarjan
    for root in trans:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, k = work.pop()
            if k == 0:
                index[v] = low[v] = counter
                counter += 1
                tstack.append(v)
                on_stack.add(v)
            succ = [s for s, _ in trans[v] if s in trans]
            recurse = False
            while k < len(succ):
                w = succ[k]
                k += 1
                if w not in index:
                    work.append((v, k))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                block = []
                while True:
                    w = tstack.pop()
                    on_stack.discard(w)
                    block.append(w)
                    if w == v:
                        break
                blocks.append(block)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    dist: dict = {}

    def law(s):
        return dist[s] if s in trans else {s: Fraction(1)}

    for block in blocks:  # Tarjan emits blocks in reverse topological order
        members = {s: k for k, s in enumerate(block)}
        size = len(block)
        # rows: x_s - sum_{t in block} P(s,t) x_t = sum_{t outside} P(s,t) law(t)
        mat = [[Fraction(0)] * size for _ in range(size)]
        rhs: list[dict] = [dict() for _ in range(size)]
        for s, r in members.items():
            mat[r][r] += 1
            for t, pr in trans[s]:
                if t in members:
                    mat[r][members[t]] -= pr
                else:
                    for a, w in law(t).items():
                        rhs[r][a] = rhs[r].get(a, 0) + pr * w
        for col in range(size):
            piv = next(r for r in range(col, size) if mat[r][col] != 0)
            mat[col], mat[piv] = mat[piv], mat[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv = 1 / mat[col][col]
            mat[col] = [x * inv for x in mat[col]]
            rhs[col] = {a: w * inv for a, w in rhs[col].items()}
            for r in range(size):
                f = mat[r][col]
                if r == col or f == 0:
                    continue
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
                row = rhs[r]
                for a, w in rhs[col].items():
                    row[a] = row.get(a, 0) - f * w
        for s, r in members.items():
            dist[s] = {a: w for a, w in rhs[r].items() if w != 0}
    return dist
