"""Variational compilation of short-time many-body dynamics into shallow circuits.

The package trains brickwall circuits of two-site SU(4) gates to reproduce
the action of a Hamiltonian's time evolution on random product states,
certifies the learned unitary through in/out-of-distribution risk bounds,
and accounts CNOT resources against Trotterization baselines.
"""

__version__ = "0.1.0"

from .circuits import (
    ParameterizedCircuit,
    ResourceReport,
    apply_circuit,
    brickwall_1d,
    brickwall_snake_2d,
    circuit_to_dense,
    count_resources,
    su4_from_params,
)
from .errors import (
    BondDimensionError,
    ConfigError,
    DecompositionError,
    DenseSizeError,
    EmbeddingError,
    NonHermitianError,
    NonUnitaryError,
    NumericalError,
    ShapeError,
    VqcError,
)
from .models import (
    HamiltonianSpec,
    TrotterScheme,
    bond_terms,
    dense_evolution_operator,
    dense_hamiltonian,
    tebd_evolve,
    trotter_circuit,
)
from .mps import (
    EnsembleSpec,
    MatrixProductState,
    local_expectation,
    overlap,
    random_product_state,
    sample_ensemble_state,
    two_point_correlator,
    u1_rqc_state,
)
from .rng import RandomStream
from .tensorops import TruncatedSVD, contract, hermitian_exponential, svd_truncated
from .training import (
    TrainConfig,
    TrainingDataset,
    TrainState,
    adam_step,
    empirical_risk,
    generate_dataset,
    generalization_gap_diagnostic,
    gradient,
    local_cost,
    local_sweep_train,
    per_site_risk,
    train,
    warm_start_double_space,
    warm_start_double_time,
    warm_start_trotter,
)
from .verify import (
    BoundCheckReport,
    expected_risk_mc,
    first_moment_test,
    haar_average_fidelity,
    prop1_bound_check,
    u1_light_cone_test,
    unitary_infidelity,
)

__all__ = [
    "BondDimensionError",
    "BoundCheckReport",
    "ConfigError",
    "DecompositionError",
    "DenseSizeError",
    "EmbeddingError",
    "EnsembleSpec",
    "HamiltonianSpec",
    "MatrixProductState",
    "NonHermitianError",
    "NonUnitaryError",
    "NumericalError",
    "ParameterizedCircuit",
    "RandomStream",
    "ResourceReport",
    "ShapeError",
    "TrainConfig",
    "TrainState",
    "TrainingDataset",
    "TrotterScheme",
    "TruncatedSVD",
    "VqcError",
    "adam_step",
    "apply_circuit",
    "bond_terms",
    "brickwall_1d",
    "brickwall_snake_2d",
    "circuit_to_dense",
    "contract",
    "count_resources",
    "dense_evolution_operator",
    "dense_hamiltonian",
    "empirical_risk",
    "expected_risk_mc",
    "first_moment_test",
    "generalization_gap_diagnostic",
    "generate_dataset",
    "gradient",
    "haar_average_fidelity",
    "hermitian_exponential",
    "local_cost",
    "local_expectation",
    "local_sweep_train",
    "overlap",
    "per_site_risk",
    "prop1_bound_check",
    "random_product_state",
    "sample_ensemble_state",
    "su4_from_params",
    "svd_truncated",
    "tebd_evolve",
    "total_z_expectation",
    "train",
    "trotter_circuit",
    "two_point_correlator",
    "u1_light_cone_test",
    "u1_rqc_state",
    "unitary_infidelity",
    "warm_start_double_space",
    "warm_start_double_time",
    "warm_start_trotter",
]

from .mps import total_z_expectation  # noqa: E402  (re-export)
