"""Local verification of two-qubit pure entangled states."""
from .kernels import BACKEND
from .states import SourceModel, TargetState, emit, fidelity, make_target
from .statistics import (
    Inconclusive,
    VerdictBound,
    delta_from_counts,
    epsilon_from_confidence,
    kl_divergence,
    n_global,
    n_local,
)
from .strategy import (
    Strategy,
    StrategyError,
    build_strategy,
    global_strategy,
    omega,
    partial_strategy,
    product_strategy,
    singlet_strategy,
)

__version__ = "0.1.0"
