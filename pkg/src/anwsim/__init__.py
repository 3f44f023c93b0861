"""Gaussian-state simulation for arrays of coupled nonlinear waveguides.

The package models parametric down-conversion in evanescently coupled
chi(2) waveguides at the covariance-matrix level: symplectic propagators
in the individual, linear-supermode and nonlinear-supermode bases,
homodyne measurement statistics, multipartite-entanglement and
cluster-state certification, and evolution-strategy synthesis of pump
and detection profiles.
"""

__version__ = "0.1.0"

from .symplectic import (
    SYMPLECTIC_TOL,
    BlochMessiahFactorization,
    TakagiFactorization,
    bloch_messiah,
    bogoliubov_to_symplectic,
    d_lo,
    euler_orthogonal,
    mat_exp,
    omega,
    orthogonal_to_euler,
    require_symplectic,
    symplectic_error,
    symplectic_to_bogoliubov,
    takagi,
    unitary_to_symplectic,
)
from .model import (
    BASES,
    ArrayConfig,
    FlatPumpSolution,
    GaussianState,
    LinearSupermodes,
    PumpProfile,
    coupling_matrix_L,
    coupling_tridiagonal,
    flat_pump_analytic,
    integrated_L,
    linear_supermodes,
    nonlinear_supermodes,
    propagator_exact,
    propagator_no_ordering,
    quad_generator,
    rk4_propagate,
    rk4_propagate_batch,
)
from .measurement import (
    MeasurementConfig,
    QuadratureCombination,
    change_basis,
    combination_variance,
    max_variance,
    min_variance,
    squeezing_db,
    variance_at,
)
from .entanglement import (
    PRESETS,
    CertificationReport,
    ClusterTransform,
    GraphSpec,
    certify,
    cluster_nullifier_variances,
    cluster_transform,
    emulation_error,
    graph_preset,
    nullifiers_for,
    s_lo,
    vlf_rho,
    vlf_values,
)
from .optimize import (
    ETA_MAX,
    GAIN_LIMIT,
    ClusterSynthesis,
    EmulationSynthesis,
    ESConfig,
    OptimizationProblem,
    OptimizationResult,
    ParameterSpace,
    VLFOptimum,
    cluster_problem,
    emulation_problem,
    evolve,
    fitness_FC,
    fitness_FM,
    fitness_FP,
    optimize_vlf,
    synthesize_cluster,
    synthesize_emulation,
    vlf_problem,
)
from .config import ScenarioConfig, load_config, parse_config

__all__ = [
    "__version__",
    # symplectic
    "SYMPLECTIC_TOL",
    "BlochMessiahFactorization",
    "TakagiFactorization",
    "bloch_messiah",
    "bogoliubov_to_symplectic",
    "d_lo",
    "euler_orthogonal",
    "mat_exp",
    "omega",
    "orthogonal_to_euler",
    "require_symplectic",
    "symplectic_error",
    "symplectic_to_bogoliubov",
    "takagi",
    "unitary_to_symplectic",
    # model
    "BASES",
    "ArrayConfig",
    "FlatPumpSolution",
    "GaussianState",
    "LinearSupermodes",
    "PumpProfile",
    "coupling_matrix_L",
    "coupling_tridiagonal",
    "flat_pump_analytic",
    "integrated_L",
    "linear_supermodes",
    "nonlinear_supermodes",
    "propagator_exact",
    "propagator_no_ordering",
    "quad_generator",
    "rk4_propagate",
    "rk4_propagate_batch",
    # measurement
    "MeasurementConfig",
    "QuadratureCombination",
    "change_basis",
    "combination_variance",
    "max_variance",
    "min_variance",
    "squeezing_db",
    "variance_at",
    # entanglement
    "PRESETS",
    "CertificationReport",
    "ClusterTransform",
    "GraphSpec",
    "certify",
    "cluster_nullifier_variances",
    "cluster_transform",
    "emulation_error",
    "graph_preset",
    "nullifiers_for",
    "s_lo",
    "vlf_rho",
    "vlf_values",
    # optimize
    "ETA_MAX",
    "GAIN_LIMIT",
    "ClusterSynthesis",
    "EmulationSynthesis",
    "ESConfig",
    "OptimizationProblem",
    "OptimizationResult",
    "ParameterSpace",
    "VLFOptimum",
    "cluster_problem",
    "emulation_problem",
    "evolve",
    "fitness_FC",
    "fitness_FM",
    "fitness_FP",
    "optimize_vlf",
    "synthesize_cluster",
    "synthesize_emulation",
    "vlf_problem",
    # config
    "ScenarioConfig",
    "load_config",
    "parse_config",
]
