"""
rank2sim - simulation and verification toolkit for critical rank-2 multiplicative random graphs.
"""

from rank2sim.cadlag import (
    ExcursionSet,
    GridPath,
    JumpDriftPath,
    add,
    compose_monotone,
    excursion_marks,
    extract_excursions,
    first_passage,
    goodness_report,
    lengths_desc,
    running_min,
)
from rank2sim.errors import Rank2SimError
from rank2sim.exploration import (
    AdditiveField,
    ExplorationBundle,
    build_exploration,
    build_exploration_bp,
    field_hitting_time,
    single_process_T1,
)
from rank2sim.graphgen import ComponentMassList, Rank2Graph, components, ord_by, sample_graph
from rank2sim.harness import run_regime_experiment
from rank2sim.levy import limit_bipartite, limit_classic, limit_interacting, simulate_J, simulate_W, zeta
from rank2sim.params import (
    LimitTriple,
    ModelSpec,
    Regime,
    WeightVector,
    bip_er_to_rank2,
    bipartite_params,
    bipartite_reparam,
    classic_params,
    interacting_params,
    sbm_to_rank2,
)
from rank2sim.sizebias import exponential_embedding, size_biased_permutation

__version__ = '0.1.0'
