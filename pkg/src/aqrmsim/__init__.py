"""Steady-state photon statistics of the dissipative anisotropic quantum
Rabi model, with level-crossing detection for first-order phase transitions."""

from .correlations import (
    G2Result,
    XOperator,
    g2_approx_four_level,
    g2_near_crossing,
    g2_standard,
    g2_zero,
    photon_statistics,
    x_plus,
)
from .dme import (
    BathParams,
    Generator,
    RateSet,
    bose_occupation,
    build_generator,
    steady_state,
    transition_rates,
)
from .errors import (
    AqrmError,
    EigensolverError,
    LeakageError,
    ReducibleGeneratorError,
    TruncationError,
)
from .model import (
    ModelParams,
    OperatorSet,
    Truncation,
    build_hamiltonian,
    build_operators,
    parity_operator,
)
from .spectrum import (
    Crossing,
    CrossingList,
    EigenSystem,
    SolverSettings,
    converge_truncation,
    diagonalize,
    find_crossings,
    ground_parity,
)
from .sweep import (
    Axis,
    SweepConfig,
    SweepRow,
    emit,
    evaluate_point,
    fig1_preset,
    fig2_preset,
    run_sweep,
)

__version__ = "0.1.0"
