"""Random rank-r extensions of bipartite states and the wedge test for entanglement."""

from .errors import NumericalError, ResourceGuardError, ValidationError
from .experiments import ExperimentConfig, ExperimentReport, omega_from_spec, run_experiment
from .sampling import (
    IsometryTuple,
    SeededRng,
    act_left,
    act_right,
    act_scalar,
    random_unitary,
    sample_haar_tuple,
    tuple_rank,
)
from .separability import (
    ProductDecomposition,
    SeparabilityVerdict,
    Status,
    ball_test,
    decide,
    ppt_test,
    separable_sample,
    verify_product_decomposition,
    verify_separating_unitary,
    wedge_test,
    witness_from_pure,
)
from .states import (
    DensityMatrix,
    MarginalState,
    Purification,
    decomposition_unitary,
    operator_from_vector,
    purify,
    state_from_tuple,
    tuple_from_state,
    tuples_equivalent,
    ucp_map,
)
from .tensor import (
    antisym_basis,
    kron,
    numerical_rank,
    partial_trace,
    partial_transpose,
    sym_basis,
)
from .wedge import WedgeInvariant, wedge_invariants, wedge_operator, wedge_restricted, witness_tuple

__version__ = "0.1.0"
