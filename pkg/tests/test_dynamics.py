from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sandpiles.dynamics import (
    CoinTape,
    add_grain,
    det_stabilize,
    det_stabilize_fast,
    det_topple,
    exact_outcome_distribution,
    format_config,
    is_stable,
    is_superstable,
    is_unstable_at,
    level,
    max_stable,
    parse_config,
    replay,
    stabilization_outcomes,
    sto_stabilize_sampled,
    sto_topple_sampled,
)
from sandpiles.errors import GuardExceeded
from sandpiles.graph import Multigraph, complete_graph, complete_graph_multi_sink, triangle_pendant_graph

from conftest import random_connected_graph

K3 = complete_graph(3)


def naive_stabilize(graph, c):
    """Independent oracle: fire the first unstable vertex, straight from adjacency."""
    c = list(c)
    while True:
        bad = [i for i in range(1, graph.n + 1) if c[i - 1] >= graph.degree(i)]
        if not bad:
            return tuple(c)
        i = bad[0]
        c[i - 1] -= graph.degree(i)
        for j, m in graph.neighbors(i).items():
            if j != 0:
                c[j - 1] += m


def test_config_text_round_trip():
    assert parse_config(" 1, 0,2") == (1, 0, 2)
    assert format_config((1, 0, 2)) == "1,0,2"
    for bad in ["", "1,,2", "a", "1,-1"]:
        with pytest.raises(ValueError):
            parse_config(bad)


def test_max_stable_examples():
    assert max_stable(K3) == (2, 2, 2)
    assert max_stable(complete_graph(4)) == (3, 3, 3, 3)
    assert max_stable(complete_graph_multi_sink(3, 2)) == (3, 3, 3)


def test_stability_predicates():
    assert is_stable(K3, (2, 2, 2))
    assert is_unstable_at(K3, (3, 0, 0), 1)
    assert is_stable(triangle_pendant_graph(), (1, 1, 1))
    assert is_superstable(K3, (1, 1, 1))
    assert not is_superstable(K3, (2, 1, 1))
    assert is_superstable(complete_graph(4), (0, 0, 0, 0))
    with pytest.raises(ValueError):
        is_unstable_at(K3, (0, 0, 0), 0)
    with pytest.raises(ValueError):
        is_stable(K3, (0, 0))


def test_level_examples():
    assert level(K3, (0, 1, 2)) == 0
    assert level(K3, (2, 2, 2)) == 3
    for n in range(2, 6):
        g = complete_graph(n)
        assert level(g, max_stable(g)) == g.num_edges - n


def test_add_grain():
    assert add_grain((0, 0, 0), 2) == (0, 1, 0)
    assert add_grain((2, 2, 2), 1) == (3, 2, 2)
    c = (0, 0, 0)
    for i in (1, 2, 3):
        c = add_grain(c, i)
    assert c == (1, 1, 1)
    with pytest.raises(ValueError):
        add_grain(c, 0)


def test_det_topple_examples():
    assert det_topple(K3, (3, 0, 0), 1) == (0, 1, 1)
    g = complete_graph_multi_sink(3, 2)
    assert det_topple(g, (4, 0, 0), 1) == (0, 1, 1)
    trace = det_stabilize(g, (4, 0, 0))
    assert trace.absorbed == 2
    assert det_topple(complete_graph(4), (4, 0, 0, 0), 1) == (0, 1, 1, 1)
    with pytest.raises(ValueError):
        det_topple(K3, (2, 0, 0), 1)


def test_det_stabilize_three_two_two():
    # worked by hand: 1 fires -> (0,3,3); 2 fires -> (1,0,4); 3 fires -> (2,1,1)
    trace = det_stabilize(K3, (3, 2, 2))
    assert trace.result == (2, 1, 1)
    assert trace.topple_counts == (1, 1, 1)
    assert [v for v, _ in trace.order] == [1, 2, 3]
    assert naive_stabilize(K3, (3, 2, 2)) == (2, 1, 1)


def test_stable_input_is_fixed_point():
    trace = det_stabilize(K3, (1, 0, 2))
    assert trace.result == (1, 0, 2) and trace.order == []


def test_trace_json_and_replay():
    trace = det_stabilize(complete_graph(4), (5, 3, 3, 3))
    data = trace.to_json()
    assert set(data) == {"result", "topple_counts", "order"}
    assert replay(complete_graph(4), (5, 3, 3, 3), trace.order) == trace.result
    with pytest.raises(ValueError):
        replay(K3, (0, 0, 0), [(1, {0: 1, 2: 1, 3: 1})])


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_abelian_under_random_policies(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, max_vertices=6, max_mult=3, extra_edges=5)
    c = tuple(rng.randrange(3 * g.degree(i)) for i in range(1, g.n + 1))
    expected = naive_stabilize(g, c)
    fast = det_stabilize_fast(g, c)
    traces = [det_stabilize(g, c, policy=rng.choice) for _ in range(5)]
    assert fast == expected
    assert all(t.result == expected for t in traces)
    assert len({t.topple_counts for t in traces}) == 1
    # grains are conserved up to what the sink absorbed
    for t in traces:
        assert sum(c) - sum(t.result) == t.absorbed


def test_sto_topple_all_heads_matches_det():
    tape = CoinTape(flips=[1, 1, 1])
    assert sto_topple_sampled(K3, (3, 0, 0), 1, 0.5, tape) == det_topple(K3, (3, 0, 0), 1)


def test_sto_topple_all_tails_is_identity():
    assert sto_topple_sampled(K3, (3, 0, 0), 1, 0.5, CoinTape(flips=[0, 0, 0])) == (3, 0, 0)


def test_sto_topple_coin_order():
    # coins land on edges to 2, 3 and the sink, in that order
    assert sto_topple_sampled(K3, (3, 0, 0), 1, 0.5, CoinTape(flips=[1, 0, 1])) == (1, 1, 0)
    assert sto_topple_sampled(K3, (3, 0, 0), 1, 0.5, CoinTape(flips=[0, 1, 0])) == (2, 0, 1)


def test_sto_topple_rejects_bad_input():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sto_topple_sampled(K3, (3, 0, 0), 1, 1.0, rng)
    with pytest.raises(ValueError):
        sto_topple_sampled(K3, (2, 0, 0), 1, 0.5, rng)
    with pytest.raises(ValueError):
        CoinTape(flips=[1]).draw(3, 0.5)


def test_sampled_stabilization_replays_from_tape():
    rec = CoinTape(np.random.default_rng(7))
    trace = sto_stabilize_sampled(K3, (3, 2, 2), 0.5, rec)
    again = sto_stabilize_sampled(K3, (3, 2, 2), 0.5, CoinTape(flips=rec.flips))
    assert trace.result == again.result and trace.order == again.order
    assert is_stable(K3, trace.result)
    assert replay(K3, (3, 2, 2), trace.order) == trace.result
    # level drops by exactly the grains absorbed at the sink
    assert level(K3, (3, 2, 2)) - level(K3, trace.result) == trace.absorbed


def test_sampled_stabilization_same_seed_same_result():
    a = sto_stabilize_sampled(complete_graph(4), (4, 3, 3, 3), 0.3, np.random.default_rng(11))
    b = sto_stabilize_sampled(complete_graph(4), (4, 3, 3, 3), 0.3, np.random.default_rng(11))
    assert a == b
    assert sto_stabilize_sampled(K3, (1, 1, 1), 0.5, np.random.default_rng(0)).result == (1, 1, 1)


def test_partial_sampling_keeps_deterministic_vertices_full():
    trace = sto_stabilize_sampled(K3, (3, 2, 2), 0.5, np.random.default_rng(3), stochastic={1})
    for v, sent in trace.order:
        if v != 1:
            assert sent == {0: 1, **{j: 1 for j in (1, 2, 3) if j != v}}


def test_outcomes_examples():
    assert stabilization_outcomes(K3, (3, 2, 2)) == {det_stabilize(K3, (3, 2, 2)).result}
    assert stabilization_outcomes(K3, (1, 1, 1), {1, 2, 3}) == {(1, 1, 1)}
    out = stabilization_outcomes(K3, (3, 2, 2), {1, 2, 3})
    assert out > {(2, 1, 1)}
    # every outcome keeps a non-negative level, so e.g. (1,0,0) (level -2) is out of reach
    assert all(level(K3, s) >= 0 for s in out)
    assert (1, 0, 0) not in out
    assert len(out) == 17


@pytest.mark.parametrize("c, sto", [((3, 2, 2), {1, 2, 3}), ((3, 2, 2), {1}), ((4, 3, 3, 3), {1, 2})])
def test_outcomes_do_not_depend_on_toppling_order(c, sto):
    g = complete_graph(len(c))
    assert stabilization_outcomes(g, c, sto) == stabilization_outcomes(g, c, sto, all_orders=True)


def test_outcomes_budget():
    with pytest.raises(GuardExceeded):
        stabilization_outcomes(complete_graph(4), (4, 3, 3, 3), {1, 2, 3, 4}, budget=10)


def test_exact_distribution_hand_case():
    # one vertex joined to the sink by two copies: send one grain (2pq) or two (p^2), renormalised
    g = Multigraph(1, [(0, 1, 2)])
    assert exact_outcome_distribution(g, (2,), "1/2") == {(0,): Fraction(1, 3), (1,): Fraction(2, 3)}
    p = Fraction(1, 3)
    q = 1 - p
    assert exact_outcome_distribution(g, (2,), p) == {
        (0,): p * p / (1 - q * q),
        (1,): 2 * p * q / (1 - q * q),
    }


def test_exact_distribution_stable_point_mass():
    assert exact_outcome_distribution(K3, (1, 1, 1), "1/2") == {(1, 1, 1): 1}


def test_exact_distribution_policy_invariant_and_consistent():
    dmin = exact_outcome_distribution(K3, (3, 2, 2), "1/2", "min")
    dmax = exact_outcome_distribution(K3, (3, 2, 2), "1/2", "max")
    drand = exact_outcome_distribution(K3, (3, 2, 2), "1/2", random.Random(5).choice)
    assert dmin == dmax == drand
    assert sum(dmin.values()) == 1
    assert set(dmin) == stabilization_outcomes(K3, (3, 2, 2), {1, 2, 3})


def test_exact_distribution_matches_sampling():
    exact = exact_outcome_distribution(K3, (3, 2, 2), (1, 2))
    rng = np.random.default_rng(2024)
    trials = 20_000
    freq = Counter(sto_stabilize_sampled(K3, (3, 2, 2), 0.5, rng).result for _ in range(trials))
    for state, prob in exact.items():
        assert abs(freq[state] / trials - float(prob)) < 0.015
    assert set(freq) <= set(exact)


def test_exact_distribution_requires_rational_p():
    with pytest.raises(TypeError):
        exact_outcome_distribution(K3, (3, 2, 2), 0.5)
    with pytest.raises(ValueError):
        exact_outcome_distribution(K3, (3, 2, 2), "3/2")
