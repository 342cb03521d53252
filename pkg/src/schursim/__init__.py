"""Simulator for permutation-symmetric qubit systems in the sector basis.

Operators that commute with every qubit permutation block-diagonalize into
one small matrix per sector label m (dimension n - 2m + 1), so circuits made
of collective generators run in polynomial time and memory.  The package
provides the block representations, exact layered evolution, the collective
XY-model adiabatic experiments, two randomized-measurement protocols, and a
dense brute-force oracle for cross-checks on few qubits.
"""

from .irreps import (
    IrrepLabel,
    SchurIndex,
    WeightVector,
    commutant_dim,
    enumerate_irreps,
    enumerate_weight_vectors,
    num_weight_vectors,
    total_dimension,
)
from .blocks import (
    GENERATOR_KINDS,
    BlockOperator,
    compose,
    frobenius_norm_squared,
    generator,
    generator_block,
    spectral_norm,
    twirl_block,
    twirl_operator,
    two_local,
)
from .evolve import (
    CircuitLayer,
    SchurState,
    eigendecompose,
    expectation,
    heisenberg_evolve,
    schrodinger_evolve,
    unitary_block,
)
from .lmg import (
    LmgParams,
    ScheduleParams,
    aqc_layers,
    aqc_run,
    concurrence,
    lmg_operator,
    order_parameter,
    order_parameter_limit,
    pair_correlations,
    rescaled_concurrence,
    rescaled_concurrence_limit,
    transverse_field_operator,
    two_qubit_rdm,
)
from .shadows import (
    ChannelMatrix,
    DeepSnapshot,
    EulerAngles,
    SymmetrizedSnapshot,
    a_coeff,
    aggregate_mean,
    aggregate_median_of_means,
    alpha_coeff,
    channel_matrix,
    collect_deep,
    collect_symmetrized,
    estimate_deep,
    estimate_symmetrized,
    estimator_deep,
    estimator_symmetrized,
    haar_unitary,
    measurement_vector,
    observable_coords,
    register_row,
    rotated_hamming_distribution,
    rotation_block,
    sample_deep,
    sample_euler,
    variance_bound_deep,
    variance_bound_symmetrized,
    word_norm_factor,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
