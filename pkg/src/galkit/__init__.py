"""Multivariate generalized asymmetric Laplace (GAL) distributions.

Density, characteristic function, moments, convolution, two independent
samplers (gamma mixture and Gaussian matrix times Gaussian vector) and the
Monte Carlo checks that tie them together.
"""

from .core import GalParams, MatrixProductParams, SpdFactor, asym_const, factorize, quad_form, validate_params
from .dist import Moments, cf, cf_inversion_pdf_1d, convolve_params, logpdf, moments, pdf
from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyGrid,
    GalError,
    IncompatibleParams,
    NonPositiveShape,
    NonSymmetric,
    NotPsd,
    QuadratureError,
    SingularSigma,
    TooFewSamples,
)
from .rng import RngStream
from .sample import (
    SampleMatrix,
    gen_gamma,
    gen_mvn,
    gen_std_normal,
    sample_column_term,
    sample_isotropic_product,
    sample_matrix_product,
    sample_mixture,
)
from .specfun import log_bessel_k, log_bessel_k_general, log_bessel_k_half_int, log_gamma

__version__ = "0.1.0"
