"""Exhaustive enumeration of stable and recurrent states at desk scale."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .complete import is_dr_complete, is_sr_complete
from .dynamics import (
    DEFAULT_STATE_BUDGET,
    Config,
    _apply,
    _first_unstable,
    _moves,
    max_stable,
)
from .errors import GuardExceeded
from .graph import Multigraph, _EdgeView, complete_graph
from .orientation import all_orientations

STABLE_GUARD = 8
PSR_GUARD = 5


@dataclass
class RecurrentSetSummary:
    n: int
    model: str  # "DR", "SR", "PSR(k)", "minimal-DR", "minimal-SR"
    count: int
    states: list[Config] | None = None

    def state_set(self) -> frozenset[Config]:
        if self.states is None:
            raise ValueError("summary was built without explicit states")
        return frozenset(self.states)


def _guard(n: int, limit: int, what: str) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if n > limit:
        raise GuardExceeded(what, limit)


def enumerate_stable(n: int, guard: int = STABLE_GUARD) -> Iterator[Config]:
    """All stable configurations of ``K_n`` in lexicographic order (``n**n`` of them)."""
    _guard(n, guard, f"stable-state enumeration on K_{n}")
    return itertools.product(range(n), repeat=n)


def _filter_block(args) -> list[Config]:
    n, model, first = args
    test = is_dr_complete if model == "DR" else is_sr_complete
    return [
        (first,) + rest
        for rest in itertools.product(range(n), repeat=n - 1)
        if test(n, (first,) + rest)
    ]


def _filtered(n: int, model: str, guard: int, keep_states: bool, workers: int) -> RecurrentSetSummary:
    _guard(n, guard, f"stable-state enumeration on K_{n}")
    jobs = [(n, model, first) for first in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_filter_block, jobs))
    else:
        blocks = [_filter_block(j) for j in jobs]
    states = [s for block in blocks for s in block]  # blocks are already lexicographic
    return RecurrentSetSummary(n, model, len(states), states if keep_states else None)


def enumerate_dr(n: int, guard: int = STABLE_GUARD, keep_states: bool = True, workers: int = 1) -> RecurrentSetSummary:
    return _filtered(n, "DR", guard, keep_states, workers)


def enumerate_sr(n: int, guard: int = STABLE_GUARD, keep_states: bool = True, workers: int = 1) -> RecurrentSetSummary:
    return _filtered(n, "SR", guard, keep_states, workers)


def reachable_recurrent_set(
    graph: Multigraph,
    stochastic: Iterable[int] = (),
    budget: int = DEFAULT_STATE_BUDGET,
) -> frozenset[Config]:
    """Stable states reachable from the maximal stable state.

    Moves are grain additions at stable states and positive-probability
    topplings at unstable ones (lowest-index unstable vertex first; vertices
    in ``stochastic`` may send grains along any non-empty set of edge
    copies). Since the maximal state is recurrent, the result is the set of
    recurrent states of the corresponding chain.
    """
    sto = frozenset(stochastic)
    n = graph.n
    deg = graph.degrees
    start = max_stable(graph)
    units = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
    seen = {start}
    stack = [start]
    stable = []
    while stack:
        cur = stack.pop()
        i = _first_unstable(deg, cur)
        if i == 0:
            stable.append(cur)
            succ = [_apply(cur, u) for u in units]
        else:
            succ = [_apply(cur, mv.delta) for mv in _moves(graph, i, i in sto)]
        for nxt in succ:
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > budget:
                    raise GuardExceeded("recurrent-set state space", budget)
                stack.append(nxt)
    return frozenset(stable)


def enumerate_psr(n: int, k: int, guard: int = PSR_GUARD, budget: int = DEFAULT_STATE_BUDGET) -> RecurrentSetSummary:
    """Recurrent states of ``K_n`` when vertices ``1..k`` topple stochastically."""
    _guard(n, guard, f"partial stochastic closure on K_{n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}")
    states = sorted(reachable_recurrent_set(complete_graph(n), range(1, k + 1), budget))
    return RecurrentSetSummary(n, f"PSR({k})", len(states), states)


def enumerate_minimal(n: int, model: str = "SR", guard: int = STABLE_GUARD) -> RecurrentSetSummary:
    """Recurrent states of ``K_n`` with level zero (total grains ``n choose 2``)."""
    model = model.upper()
    if model not in ("DR", "SR"):
        raise ValueError(f"unknown model {model!r}")
    full = enumerate_dr(n, guard) if model == "DR" else enumerate_sr(n, guard)
    edges = n * (n - 1) // 2
    states = [s for s in full.states if sum(s) == edges]
    return RecurrentSetSummary(n, f"minimal-{model}", len(states), states)


def count_forests(n: int, guard: int = 12) -> int:
    """Labelled forests on ``n`` vertices.

    Condition on the tree holding vertex 1: choose its other ``k - 1``
    vertices, count the ``k**(k-2)`` trees on them, and recurse on the rest.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > guard:
        raise GuardExceeded("forest count", guard)
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(
            math.comb(m - 1, k - 1) * (k ** (k - 2) if k >= 2 else 1) * a[m - k]
            for k in range(1, m + 1)
        ))
    return a[n]


def count_score_classes(graph: _EdgeView, guard: int = 12) -> int:
    """Number of distinct in-degree vectors over all orientations of ``graph``."""
    if graph.num_edges > guard:
        raise GuardExceeded("orientation sweep", guard)
    verts = sorted(graph.vertices)
    scores = set()
    for o in all_orientations(graph):
        deg = o.in_degrees()
        scores.add(tuple(deg[v] for v in verts))
    return len(scores)


def count_tournament_scores(n: int, guard: int = 10) -> int:
    """Non-decreasing minimal SR states of ``K_n`` (tournament score sequences)."""
    _guard(n, guard, "tournament score enumeration")
    total = n * (n - 1) // 2
    count = 0
    for c in itertools.combinations_with_replacement(range(n), n):
        if sum(c) != total:
            continue
        acc = 0
        for i, v in enumerate(c):
            acc += v
            if acc < i * (i + 1) // 2:
                break
        else:
            count += 1
    return count


def table_counts(n_max: int) -> list[tuple[int, int, int, int]]:
    """Rows ``(n, |DR|, |PSR^1|, |SR|)`` for ``n = 1..n_max``."""
    _guard(n_max, PSR_GUARD, "table")
    rows = []
    for n in range(1, n_max + 1):
        rows.append((
            n,
            enumerate_dr(n, keep_states=False).count,
            enumerate_psr(n, 1).count,
            enumerate_sr(n, keep_states=False).count,
        ))
    return rows
