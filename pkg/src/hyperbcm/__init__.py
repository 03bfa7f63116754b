"""Asynchronous bounded-confidence opinion dynamics on hypergraphs."""

from .hypergraph import (
    BlockHypergraph,
    CompleteHypergraph,
    ExplicitHypergraph,
    Hypergraph,
    canonical_edge,
)
from .state import (
    ClusterSet,
    NormalInitial,
    OpinionState,
    UniformInitial,
    extract_clusters,
)
from .dynamics import (
    SimConfig,
    SimSummary,
    StepOutcome,
    StopRule,
    apply_update,
    default_stop,
    discordance,
    is_absorbing_clustered,
    is_absorbing_explicit,
    run,
    step,
)
from .generators import (
    GnmParams,
    HsbmParams,
    Partition,
    gen_complete,
    gen_gnm,
    gen_hsbm,
    load_hypergraph,
    save_hypergraph,
)

__version__ = "0.1.0"

__all__ = [
    "BlockHypergraph",
    "CompleteHypergraph",
    "ExplicitHypergraph",
    "Hypergraph",
    "canonical_edge",
    "ClusterSet",
    "NormalInitial",
    "OpinionState",
    "UniformInitial",
    "extract_clusters",
    "SimConfig",
    "SimSummary",
    "StepOutcome",
    "StopRule",
    "apply_update",
    "default_stop",
    "discordance",
    "is_absorbing_clustered",
    "is_absorbing_explicit",
    "run",
    "step",
    "GnmParams",
    "HsbmParams",
    "Partition",
    "gen_complete",
    "gen_gnm",
    "gen_hsbm",
    "load_hypergraph",
    "save_hypergraph",
    "__version__",
]
