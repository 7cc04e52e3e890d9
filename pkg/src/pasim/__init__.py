"""Predictor-antenna moving-relay link simulator."""

__version__ = "0.1.0"

from .channel import (
    ConditionalGainDist,
    MismatchState,
    PhysicalConfig,
    RngStream,
    conditional_gain_cdf,
    mismatch_distance,
    sample_conditional_gain,
    sample_gain_pair,
    sample_predictor_gain,
    sigma_from_distance,
)
from .fbl import ErrorEstimate, FblConfig, fbl_average_error, fbl_error_given_gain, fbl_throughput
from .rate_adapt import (
    RateSolution,
    ThroughputEstimate,
    UnreachableTargetError,
    expected_throughput,
    full_csit_throughput,
    no_csit_throughput,
    optimal_rate_given_ghat,
    required_snr,
)
from .selection import AntennaArray, LinkMode, SelectionResult, select_antenna, speed_sweep
from .specfun import (
    Accuracy,
    ConvergenceError,
    DomainError,
    bessel_i0,
    bessel_j0,
    gaussian_q,
    marcum_q1,
)
