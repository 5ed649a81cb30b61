"""Collision-model thermalization of finite spin systems.

Two engines share one experiment surface: an exact repeated-interaction
simulator (joint unitary + partial trace over fresh thermal ancillae)
and a windowed time-dependent Lindblad master equation, cross-validated
against each other.  A transition analyzer decides steady-state
uniqueness from the commutant of the jump operators.
"""

from .collision import CollisionSchedule, Trajectory, collide, run
from .config import ConfigError, ExperimentConfig, default_config
from .hamiltonians import (
    AncillaSpec,
    IsingChain,
    TLS,
    XYDM,
    build,
    collision_hamiltonian,
    ising_transition_frequencies,
    xydm_eigenbasis,
)
from .lindblad import (
    JumpTerm,
    NumericalValidationError,
    dissipator,
    integrate,
    ising_rhs,
    tls_rhs,
)
from .linalg import EigenDecomposition, eig_hermitian, kron, partial_trace, propagator
from .spectra import SpectrumQuery, detuned_rate, gamma, kms_ratio
from .states import (
    fidelity,
    maximally_mixed,
    populations,
    purity,
    thermal_state,
    trace_distance,
    validate_density_matrix,
)
from .transitions import (
    MMatrix,
    TransitionTable,
    UniquenessReport,
    decompose,
    jump_set,
    m_matrix,
    transition_operators,
    uniqueness_check,
)

__version__ = "0.1.0"

__all__ = [
    "AncillaSpec",
    "CollisionSchedule",
    "ConfigError",
    "EigenDecomposition",
    "ExperimentConfig",
    "IsingChain",
    "JumpTerm",
    "MMatrix",
    "NumericalValidationError",
    "SpectrumQuery",
    "TLS",
    "Trajectory",
    "TransitionTable",
    "UniquenessReport",
    "XYDM",
    "build",
    "collide",
    "collision_hamiltonian",
    "decompose",
    "default_config",
    "detuned_rate",
    "dissipator",
    "eig_hermitian",
    "fidelity",
    "gamma",
    "integrate",
    "ising_rhs",
    "ising_transition_frequencies",
    "jump_set",
    "kms_ratio",
    "kron",
    "m_matrix",
    "maximally_mixed",
    "partial_trace",
    "populations",
    "propagator",
    "purity",
    "run",
    "thermal_state",
    "tls_rhs",
    "trace_distance",
    "transition_operators",
    "uniqueness_check",
    "validate_density_matrix",
    "xydm_eigenbasis",
]
