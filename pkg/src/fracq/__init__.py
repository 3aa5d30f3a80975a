"""Quantization errors of discrete-time fGn and fBm signals.

Synthesis of fractional Gaussian noise / fractional Brownian motion,
uniform quantization, and numerical verification that the normalized
quantization error behaves like uniform white noise uncorrelated with
the signal.
"""

from fracq.errors import (
    DomainError,
    FormatError,
    FracqError,
    InconclusiveError,
    OutOfRegimeError,
    ResourceError,
)
from fracq.weights import (
    WeightSequence,
    classify_tail,
    lower_bound_holds,
    partial_sums,
    weights,
)
from fracq.synthesis import SignalPath, fbm, fgn, gaussian_white
from fracq.quantization import (
    ErrorSeries,
    QuantizerSpec,
    high_resolution_spec,
    quantize,
    sigma_delta_error,
)
from fracq.analytics import (
    CorrelationReport,
    SpectrumEstimate,
    UniformityResult,
    correlation_report,
    periodogram,
    uniformity_test,
)
from fracq.eigen import (
    EigenSpectrum,
    covariance_matrix,
    crossover_detect,
    eigen_spectrum,
    eigenvalues_symmetric,
    fit_power_law,
    hurst_from_slope,
)
from fracq.cf import (
    CFProfile,
    cf_magnitude_profile,
    cumulative_coeffs,
    verify_limit_dichotomy,
)

__version__ = "0.1.0"
