"""Abelian, stochastic and partially stochastic sandpile models on multigraphs with a sink."""

from .complete import is_dr_complete, is_parking_function, is_sr_complete, stochastic_burning
from .dynamics import (
    CoinTape,
    StabilizationTrace,
    add_grain,
    det_stabilize,
    det_topple,
    exact_outcome_distribution,
    is_stable,
    is_superstable,
    is_unstable_at,
    level,
    max_stable,
    stabilization_outcomes,
    sto_stabilize_sampled,
    sto_topple_sampled,
)
from .enumeration import (
    RecurrentSetSummary,
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
from .errors import GuardExceeded, NotRecurrentError, SandpileError
from .graph import (
    Multigraph,
    complete_graph,
    complete_graph_multi_sink,
    degree,
    edges_within,
    induced_subgraph,
)
from .markov import ChainSpec, ChainStats, empirical_recurrent_set, run_chain
from .orientation import Orientation, flip_cycle, in_degrees, is_compatible, score_equivalent
from .polytope import (
    DecompositionCertificate,
    decompose,
    decompose_level_restricted,
    is_in_dr_polytope,
    split_superstable,
    verify_certificate,
)
from .recurrence import (
    BurnReport,
    RecurrenceVerdict,
    dhar_burning,
    find_compatible_acyclic_orientation,
    find_compatible_sink_rooted_orientation,
    is_dr,
    is_dr_subset_criterion,
    is_minimal_recurrent,
    is_sr_flow,
    is_sr_subset_criterion,
)

__version__ = "0.1.0"
