"""
entsub: completely entangled subspaces and local unambiguous discrimination.

Numerical checks of when random subspaces contain product states, and
constructive certificates for when random pure states can be told apart
unambiguously by local measurements.
"""

from .bounds import (
    ThresholdReport,
    determinantal_degree,
    locc_threshold,
    min_copies,
    product_count_formula,
    s_max,
    schmidt_smax,
    segre_degree,
)
from .discrimination import (
    Certificate,
    StateSet,
    UnambiguousPovm,
    build_povm,
    chefles_certificate,
    generic_verdict,
    multicopy_certificate,
    predicted_success,
    simulate,
    validate_certificate,
)
from .errors import (
    CountingUnsupported,
    DegeneratePencilError,
    EmptyComplementError,
    EntsubError,
    IndefiniteRemainderError,
    InvalidInput,
    LinearDependenceError,
    NumericalConsistencyError,
    SearchFailure,
)
from .hilbert import (
    ProductState,
    SchmidtData,
    SpaceSpec,
    StateVector,
    Subspace,
    orthonormal_complement,
    overlap,
    schmidt,
    span,
    subspace_overlap,
    tensor,
)
from .sampling import RngStream, random_product_state, random_state, random_states, random_subspace
from .search import (
    SearchConfig,
    count_rank_deficient_pencil,
    enumerate_low_rank,
    enumerate_products,
    find_low_rank_in_subspace,
    find_product_in_subspace,
    pencil_roots,
    seesaw_step,
)

__version__ = "0.1.0"
