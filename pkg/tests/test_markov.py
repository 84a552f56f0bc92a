from __future__ import annotations

import json

import pytest

from sandpiles.enumeration import enumerate_dr, enumerate_psr, enumerate_sr
from sandpiles.graph import complete_graph
from sandpiles.markov import (
    GENERATOR_VERSION,
    ChainSpec,
    empirical_recurrent_set,
    parse_mu,
    run_chain,
    stats_to_json,
    sweep,
    uniform_mu,
)

K2 = complete_graph(2)
K3 = complete_graph(3)


def test_det_chain_on_k3_stays_in_dr():
    stats = run_chain(ChainSpec(K3, "det", steps=10_000, seed=42))
    assert empirical_recurrent_set(stats) == enumerate_dr(3).state_set()


def test_sto_chain_covers_sr():
    stats = run_chain(ChainSpec(K3, "sto", p=0.5, steps=100_000, seed=42))
    assert empirical_recurrent_set(stats) == enumerate_sr(3).state_set()


def test_partial_chain_on_k4_stays_in_psr():
    stats = run_chain(ChainSpec(complete_graph(4), "partial", k=1, steps=1_000_000, seed=1))
    assert empirical_recurrent_set(stats) <= enumerate_psr(4, 1).state_set()


def test_k2_det_chain():
    stats = run_chain(ChainSpec(K2, "det", steps=5_000, seed=3))
    assert empirical_recurrent_set(stats) == {(0, 1), (1, 0), (1, 1)}


def test_no_post_burn_in_steps():
    assert empirical_recurrent_set(run_chain(ChainSpec(K3, "sto", steps=50, burn_in=50))) == frozenset()
    assert empirical_recurrent_set(run_chain(ChainSpec(K3, "sto", steps=0))) == frozenset()


def test_same_seed_same_run():
    spec = ChainSpec(K3, "sto", p=0.3, steps=3_000, seed=9)
    assert stats_to_json(spec, run_chain(spec)) == stats_to_json(spec, run_chain(spec))
    other = ChainSpec(K3, "sto", p=0.3, steps=3_000, seed=10)
    assert run_chain(other).visited != run_chain(spec).visited


def test_visits_count_post_burn_in_steps():
    stats = run_chain(ChainSpec(K3, "det", steps=1_000, burn_in=100, seed=0))
    assert sum(stats.visited.values()) == 900


def test_non_uniform_mu_is_respected():
    # nearly all grains land on vertex 1, so the chain still explores the DR set
    spec = ChainSpec(K3, "det", mu=(0.98, 0.01, 0.01), steps=20_000, seed=5)
    assert empirical_recurrent_set(run_chain(spec)) <= enumerate_dr(3).state_set()


def test_sweep_subset_of_theory():
    sr = enumerate_sr(3).state_set()
    for found in sweep(K3, "sto", range(10), 2_000, p=0.5):
        assert found <= sr


def test_stats_json():
    spec = ChainSpec(K3, "partial", k=1, steps=500, seed=1)
    data = json.loads(json.dumps(stats_to_json(spec, run_chain(spec))))
    assert data["generator"] == GENERATOR_VERSION
    assert data["spec"]["k"] == 1 and data["spec"]["mu"] == "uniform"
    assert data["distinct"] == len(data["visited"])


@pytest.mark.parametrize(
    "kw",
    [
        {"model": "bogus"},
        {"model": "sto", "p": 1.0},
        {"model": "partial", "k": 5},
        {"mu": (0.5, 0.5)},
        {"mu": (0.5, 0.6, -0.1)},
        {"mu": (0.2, 0.2, 0.2)},
        {"steps": -1},
        {"steps": 10, "burn_in": 11},
        {"seed": -1},
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(ValueError):
        ChainSpec(K3, **kw)


def test_mu_parsing():
    assert parse_mu("uniform", 3) is None
    assert parse_mu("0.5,0.25,0.25", 3) == (0.5, 0.25, 0.25)
    assert uniform_mu(4) == (0.25,) * 4
    with pytest.raises(ValueError):
        parse_mu("a,b", 2)
    with pytest.raises(ValueError):
        parse_mu("1", 2)
