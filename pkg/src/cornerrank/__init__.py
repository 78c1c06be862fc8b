"""Normal matrices whose off-diagonal corners have prescribed unequal ranks."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .linalg import (  # noqa: F401
    DEFAULT_TOL,
    RankResult,
    ToleranceProfile,
    commuting_mn_factorization,
    frobenius_norm,
    haar_random_projection,
    haar_unitary,
    hadamard,
    hermitian_eig,
    max_entry_norm,
    numerical_rank,
    operator_norm,
)
from .corners import (  # noqa: F401
    CornerDecomposition,
    CornerReport,
    NoViolationFound,
    Witness,
    corner_identity_check,
    cr_distance_bound_check,
    cr_sample_test,
    decompose,
    normality_defect,
    rank_distance,
    spectrum_line_circle_classify,
)
from .construct import (  # noqa: F401
    ConstructionCertificate,
    GammaSpec,
    TargetRanks,
    build_unequal_corners,
    compose_target_ranks,
    perturb_and_rebuild,
    search_m2,
)
