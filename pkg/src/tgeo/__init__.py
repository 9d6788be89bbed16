"""Distance geometry driven by a world function sigma(P, Q)."""
from .errors import (
    CFLViolation,
    DegenerateLink,
    DegenerateTube,
    DimensionMismatch,
    KindMismatch,
    NegativeSigma,
    NonFiniteState,
    NonTimelike,
    NoSolutionFound,
    NotEquivalent,
    SpacelikeUnsupported,
    TGeoError,
    ZeroDensity,
)
from .geometry import (
    PairVector,
    WorldFunctionSpec,
    distorted,
    euclidean,
    load_scene,
    minkowski,
    parse_spec,
    scalar_product,
    sigma,
    squared_length,
)
from .vectors import (
    gram_determinant,
    gram_matrix,
    is_antiparallel,
    is_collinear,
    is_equivalent,
    is_linearly_dependent,
    is_parallel,
)

__version__ = "0.1.0"
