"""Edge-state decomposition and nondecomposable entanglement witnesses for bipartite states."""

from .decomposition import (
    EdgeDecomposition,
    SubspacePair,
    decompose_edge,
    is_edge,
    subtract_product,
    validate_subspace_pair,
)
from .errors import (
    DegenerateEdgeError,
    EdgewitError,
    InvalidOperatorError,
    NotAWitnessError,
    ParameterError,
    PreconditionError,
    RangeCriterionError,
    SamplingError,
)
from .family import FamilyScanRow, default_grid, rho_b, scan_family
from .maps import ChoiMap, apply_map, choi_of, detect_via_map, map_to_witness, witness_to_map
from .operators import (
    BipartiteDims,
    DensityMatrix,
    HermitianOperator,
    ProductVector,
    SpectralSplit,
    identity,
    partial_transpose,
    ppt_check,
    pseudo_inverse,
    sample,
    spectral_split,
)
from .product_search import (
    ProductMinResult,
    ZeroSet,
    collect_zero_set,
    min_product_expectation,
    range_product_search,
    span_dimension,
)
from .witness import (
    DecomposableOperator,
    WitnessConstruction,
    WitnessReport,
    canonical_form_check,
    compute_lambda0,
    construct_edge_witness,
    detects,
    extremality_necessary,
    nondecomposability_certificate,
    optimize_witness,
    shift_to_tangent,
)

__version__ = "0.1.0"
