"""Seeded simulation of the sandpile Markov chains.

Each step adds a grain at a vertex drawn from ``mu`` and stabilises with the
model's toppling rule. Randomness comes from numpy's counter-based Philox
generator; the seed is split into two independent streams, one for vertex
choices and one for toppling coins, so a run is a pure function of its spec.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    Config,
    _check_p,
    _det_fire_all,
    _moves,
    _sto_fire,
    _topology,
    _unstable,
    max_stable,
)
from .graph import Multigraph

GENERATOR = "numpy.random.Philox/SeedSequence.spawn(2)"
GENERATOR_VERSION = f"{GENERATOR} numpy-{np.__version__}"
_CHUNK = 4096


@dataclass(frozen=True)
class ChainSpec:
    """``model`` is ``"det"``, ``"sto"`` or ``"partial"`` (vertices ``1..k`` stochastic)."""

    graph: Multigraph
    model: str = "det"
    p: float = 0.5
    k: int = 0
    mu: tuple[float, ...] | None = None
    steps: int = 10_000
    burn_in: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("det", "sto", "partial"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.model != "det":
            _check_p(self.p)
        if self.model == "partial" and not 0 <= self.k <= self.graph.n:
            raise ValueError(f"k must lie in 0..{self.graph.n}")
        if self.mu is not None:
            mu = tuple(float(x) for x in self.mu)
            if len(mu) != self.graph.n:
                raise ValueError(f"mu has {len(mu)} entries, graph has {self.graph.n} non-sink vertices")
            if any(not x > 0 for x in mu):
                raise ValueError("mu must be strictly positive")
            if abs(sum(mu) - 1) > 1e-9:
                raise ValueError("mu must sum to 1")
            object.__setattr__(self, "mu", mu)
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.steps // 10)
        if not 0 <= self.burn_in <= self.steps:
            raise ValueError("burn_in must lie in 0..steps")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned value")

    @property
    def stochastic(self) -> frozenset[int]:
        if self.model == "det":
            return frozenset()
        if self.model == "sto":
            return frozenset(range(1, self.graph.n + 1))
        return frozenset(range(1, self.k + 1))

    def to_json(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": [list(e) for e in self.graph.edge_items()],
            "model": self.model,
            "p": self.p if self.model != "det" else None,
            "k": self.k if self.model == "partial" else None,
            "mu": list(self.mu) if self.mu is not None else "uniform",
            "steps": self.steps,
            "burn_in": self.burn_in,
            "seed": self.seed,
        }


@dataclass
class ChainStats:
    visited: dict[Config, int] = field(default_factory=dict)
    total_topplings: int = 0
    final_state: Config = ()


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    add_seq, coin_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.Philox(add_seq)), np.random.Generator(np.random.Philox(coin_seq))


def run_chain(spec: ChainSpec) -> ChainStats:
    graph = spec.graph
    n = graph.n
    top = _topology(graph)
    deg = top.deg
    sto = spec.stochastic
    add_rng, coin_rng = _streams(spec.seed)
    mu = None if spec.mu is None else np.asarray(spec.mu)

    state = list(max_stable(graph))
    visited: dict[Config, int] = {}
    topplings = 0
    step = 0
    while step < spec.steps:
        batch = min(_CHUNK, spec.steps - step)
        sites = add_rng.choice(n, size=batch, p=mu).tolist()
        for v in sites:
            state[v] += 1
            if spec.model == "det":
                if state[v] >= deg[v + 1]:
                    topplings += _det_fire_all(top, state)
            else:
                while True:
                    unstable = _unstable(deg, state)
                    if not unstable:
                        break
                    i = unstable[0]
                    if i in sto:
                        if not _sto_fire(top, state, i, spec.p, coin_rng):
                            continue
                    else:
                        for idx, d in enumerate(_moves(graph, i, False)[0].delta):
                            state[idx] += d
                    topplings += 1
            if step >= spec.burn_in:
                key = tuple(state)
                visited[key] = visited.get(key, 0) + 1
            step += 1
    return ChainStats(visited, topplings, tuple(state))


def empirical_recurrent_set(stats: ChainStats) -> frozenset[Config]:
    return frozenset(s for s, m in stats.visited.items() if m > 0)


def stats_to_json(spec: ChainSpec, stats: ChainStats) -> dict:
    return {
        "generator": GENERATOR_VERSION,
        "spec": spec.to_json(),
        "visited": [{"state": list(s), "count": m} for s, m in sorted(stats.visited.items())],
        "distinct": len(stats.visited),
        "total_topplings": stats.total_topplings,
        "final_state": list(stats.final_state),
    }


def uniform_mu(n: int) -> tuple[float, ...]:
    return tuple([1.0 / n] * n)


def parse_mu(text: str, n: int) -> tuple[float, ...] | None:
    """``"uniform"`` or a comma-separated probability vector."""
    if text.strip().lower() == "uniform":
        return None
    try:
        mu = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"malformed mu {text!r}") from None
    if len(mu) != n:
        raise ValueError(f"mu has {len(mu)} entries, graph has {n} non-sink vertices")
    return mu


def sweep(graph: Multigraph, model: str, seeds: Sequence[int], steps: int, **kw) -> list[frozenset[Config]]:
    """Empirical recurrent sets for several independent seeds."""
    return [
        empirical_recurrent_set(run_chain(ChainSpec(graph, model, steps=steps, seed=s, **kw)))
        for s in seeds
    ]
