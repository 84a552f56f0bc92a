from __future__ import annotations

import itertools

import pytest

from sandpiles.enumeration import (
    count_forests,
    count_score_classes,
    count_tournament_scores,
    enumerate_dr,
    enumerate_minimal,
    enumerate_psr,
    enumerate_sr,
    enumerate_stable,
    reachable_recurrent_set,
    table_counts,
)
from sandpiles.errors import GuardExceeded
from sandpiles.graph import Multigraph, complete_graph, complete_graph_multi_sink
from sandpiles.recurrence import is_sr_flow


def test_enumerate_stable():
    assert list(enumerate_stable(1)) == [(0,)]
    assert len(list(enumerate_stable(2))) == 4
    assert len(list(enumerate_stable(3))) == 27
    with pytest.raises(GuardExceeded):
        list(enumerate_stable(9))


def test_recurrent_counts():
    assert [enumerate_dr(n).count for n in range(1, 6)] == [1, 3, 16, 125, 1296]
    assert [enumerate_sr(n).count for n in range(1, 6)] == [1, 3, 17, 144, 1623]


def test_parallel_enumeration_matches_serial():
    serial = enumerate_sr(5)
    par = enumerate_sr(5, workers=2)
    assert par.count == serial.count and par.states == serial.states


def test_psr_examples():
    assert [enumerate_psr(n, 1).count for n in range(1, 6)] == [1, 3, 17, 142, 1563]
    assert enumerate_psr(3, 0).state_set() == enumerate_dr(3).state_set()
    with pytest.raises(ValueError):
        enumerate_psr(3, 4)
    with pytest.raises(GuardExceeded):
        enumerate_psr(6, 1)


def test_reachable_set_on_other_graphs():
    g = complete_graph_multi_sink(3, 2)
    det = reachable_recurrent_set(g)
    sto = reachable_recurrent_set(g, range(1, 4))
    assert det <= sto
    for c in itertools.product(*(range(g.degree(i)) for i in (1, 2, 3))):
        assert (c in sto) == bool(is_sr_flow(g, c))


def test_minimal_examples():
    perms = set(itertools.permutations((0, 1, 2)))
    assert enumerate_minimal(3, "DR").state_set() == perms
    assert enumerate_minimal(3, "SR").state_set() == perms | {(1, 1, 1)}
    assert [enumerate_minimal(n, "SR").count for n in range(1, 6)] == [1, 2, 7, 38, 291]


def test_count_forests():
    assert [count_forests(n) for n in range(0, 6)] == [1, 1, 2, 7, 38, 291]
    # OEIS A001858 continues 2932, 36961
    assert count_forests(6) == 2932 and count_forests(7) == 36961


def test_count_score_classes():
    assert count_score_classes(complete_graph(3).induced_subgraph({1, 2, 3})) == 7
    assert count_score_classes(complete_graph(4).induced_subgraph({1, 2, 3, 4})) == 38
    for length in range(1, 5):
        path = Multigraph(length + 1, [(i, i + 1) for i in range(length + 1)])
        tree = path.induced_subgraph(range(1, length + 2))
        assert count_score_classes(tree) == 2 ** tree.num_edges


def test_tournament_scores():
    assert [count_tournament_scores(n) for n in (1, 2, 3)] == [1, 1, 2]
    # Landau sequences: OEIS A000571
    assert [count_tournament_scores(n) for n in range(4, 8)] == [4, 9, 22, 59]


def test_table_rows():
    rows = table_counts(4)
    assert rows[1] == (2, 3, 3, 3)
    assert rows[3] == (4, 125, 142, 144)
    with pytest.raises(GuardExceeded):
        table_counts(6)


def _closure_over_all_orders(graph, stochastic):
    from sandpiles.dynamics import add_grain, max_stable, stabilization_outcomes

    start = max_stable(graph)
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for i in range(1, graph.n + 1):
            for nxt in stabilization_outcomes(graph, add_grain(cur, i), stochastic, all_orders=True):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return frozenset(seen)


@pytest.mark.parametrize("n, k", [(2, 1), (3, 0), (3, 1), (3, 2), (3, 3), (4, 1)])
def test_psr_matches_closure_over_all_orders(n, k):
    g = complete_graph(n)
    assert enumerate_psr(n, k).state_set() == _closure_over_all_orders(g, range(1, k + 1))
