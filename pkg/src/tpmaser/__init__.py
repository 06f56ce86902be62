"""Driven two-photon micromaser simulator on a truncated Fock basis.

A sequence of two-level atoms, each classically driven while it crosses a
single-mode cavity, acts on the field as a repeated quantum channel.  This
package builds that channel exactly on a truncated number basis, iterates it,
and tracks the purification and nonclassicality of the field.
"""

from .dynamics import (
    AtomFieldUnitary,
    AtomPrep,
    KrausPair,
    ModelParams,
    RabiFrequencies,
    apply_atom,
    block_unitary,
    full_unitary,
    kraus_pair,
    rabi_frequencies,
    recursion_oracle,
    unitary_exponential_oracle,
)
from .errors import (
    ConfigError,
    CutoffTooSmall,
    GridOutsideTruncation,
    LeakageExceeded,
    SimulationError,
    UndefinedForVacuum,
)
from .experiments import (
    AtomExitRecord,
    ConvergenceReport,
    ObservableSeries,
    OptimizeResult,
    RunConfig,
    atom_exit_states,
    convergence_audit,
    optimize_interaction_time,
    parity_reflection_check,
    run_sequence,
)
from .fock import (
    DensityOperator,
    DisplacementMatrix,
    FockSpace,
    displacement_exponential_oracle,
    displacement_matrix,
    laguerre_assoc,
    thermal_state,
)
from .observables import (
    PhotonDistribution,
    QGrid,
    QGridSpec,
    g2_zero,
    linear_entropy,
    mean_photon,
    photon_distribution,
    q_function,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "AtomExitRecord", "AtomFieldUnitary", "AtomPrep", "ConfigError",
    "ConvergenceReport", "CutoffTooSmall", "DensityOperator",
    "DisplacementMatrix", "FockSpace", "GridOutsideTruncation", "KrausPair",
    "LeakageExceeded", "ModelParams", "ObservableSeries", "OptimizeResult",
    "PhotonDistribution", "QGrid", "QGridSpec", "RabiFrequencies",
    "RunConfig", "SimulationError", "UndefinedForVacuum", "apply_atom",
    "atom_exit_states", "block_unitary", "convergence_audit",
    "displacement_exponential_oracle", "displacement_matrix", "full_unitary",
    "g2_zero", "kraus_pair", "laguerre_assoc", "linear_entropy",
    "mean_photon", "optimize_interaction_time", "parity_reflection_check",
    "photon_distribution", "q_function", "rabi_frequencies",
    "recursion_oracle", "run_sequence", "thermal_state",
    "unitary_exponential_oracle", "von_neumann_entropy",
]
