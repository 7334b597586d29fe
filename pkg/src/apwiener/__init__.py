"""Almost periodic Wiener algebra toolkit: factorization and Toeplitz corona problems."""

from .apcore import (
    ApMatrix,
    ApPolynomial,
    Frequency,
    FrequencyBasis,
    bohr_inner,
    bohr_mean,
    sup_norm_estimate,
    wiener_norm,
)
from .errors import ApwError
from .factorization import (
    ApFactorization,
    FactorizationReport,
    augment_to_square,
    canonical_test,
    factorize,
    row_factorize,
    scalar_factorize,
    trivial_representation,
    verify_factorization,
)
from .geometry import Halfspace, SpectralMask, contains, project, y_vector
from .toepcorona import (
    CoronaSolution,
    TruncatedToeplitz,
    corona_parametrize,
    corona_solve,
    gram_test,
    kernel_range_check,
    right_coprime_from_left,
    symmetric_factorize,
    toeplitz_truncate,
)

__all__ = [
    "ApFactorization", "ApMatrix", "ApPolynomial", "ApwError", "CoronaSolution", "FactorizationReport",
    "Frequency", "FrequencyBasis", "Halfspace", "SpectralMask", "TruncatedToeplitz", "augment_to_square",
    "bohr_inner", "bohr_mean", "canonical_test", "contains", "corona_parametrize", "corona_solve", "factorize",
    "gram_test", "kernel_range_check", "project", "right_coprime_from_left", "row_factorize",
    "scalar_factorize", "sup_norm_estimate", "symmetric_factorize", "toeplitz_truncate",
    "trivial_representation", "verify_factorization", "wiener_norm", "y_vector",
]
