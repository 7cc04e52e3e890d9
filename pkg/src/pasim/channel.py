"""
Spatial mismatch geometry and the correlated base-station to receive-antenna
channel.

The receive antenna (RA) trails the predictor antenna (PA) by ``d_a`` meters.
After the processing time ``T`` the RA sits ``d = |v T - d_a|`` away from the
point where the PA measured the channel. The RA channel is modelled as

    h = sqrt(1 - sigma^2) * h_pa + sigma * q,    h_pa, q ~ CN(0, 1),

with sigma^2 = 1 - J0(2 pi d / lambda)^2 (isotropic-scattering correlation).
Given the predictor gain ``g_hat = (1 - sigma^2)|h_pa|^2`` the RA gain
``g = |h|^2`` is a scaled noncentral chi-square with two degrees of freedom,

    P(g <= x | g_hat) = 1 - Q1(sqrt(2 g_hat) / sigma, sqrt(2 x) / sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import Accuracy, DomainError, bessel_j0, marcum_q1

SPEED_OF_LIGHT = 3.0e8

# Argument of the first zero of J0; sigma(d) reaches 1 at 2 pi d / lambda = J0_FIRST_ZERO.
J0_FIRST_ZERO = 2.404825557695773

# Small sigma gives very wide Poisson windows in the Marcum series.
_CHANNEL_ACCURACY = Accuracy(abs_tol=1e-12, max_terms=50_000_000)


@dataclass(frozen=True)
class PhysicalConfig:
    carrier_frequency: float
    processing_time_T: float
    propagation_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("carrier_frequency", "processing_time_T", "propagation_speed"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value}")

    @property
    def wavelength(self) -> float:
        return self.propagation_speed / self.carrier_frequency

    def matched_speed(self, d_a: float) -> float:
        """Speed (m/s) at which an RA ``d_a`` meters behind the PA has zero mismatch."""
        return d_a / self.processing_time_T


@dataclass(frozen=True)
class MismatchState:
    d: float
    sigma: float

    def __post_init__(self):
        if not self.d >= 0:
            raise DomainError(f"mismatch distance must be >= 0, got {self.d}")
        if not 0.0 <= self.sigma <= 1.0:
            raise DomainError(f"sigma must lie in [0, 1], got {self.sigma}")

    @classmethod
    def from_distance(cls, d: float, wavelength: float) -> "MismatchState":
        return cls(d=d, sigma=sigma_from_distance(d, wavelength))


@dataclass(frozen=True)
class ConditionalGainDist:
    """Law of the RA gain given the predictor gain ``g_hat``."""

    g_hat: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.g_hat) and self.g_hat >= 0):
            raise DomainError(f"g_hat must be >= 0, got {self.g_hat}")
        if not 0.0 <= self.sigma <= 1.0:
            raise DomainError(f"sigma must lie in [0, 1], got {self.sigma}")

    @property
    def mean(self) -> float:
        return self.g_hat + self.sigma**2

    def cdf(self, x):
        return conditional_gain_cdf(self, x)

    def sf(self, x):
        return conditional_gain_sf(self.g_hat, self.sigma, x)


@dataclass
class RngStream:
    """Seeded random stream; identical ``(seed, stream_id)`` give identical draws."""

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value < 2**64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.Generator(np.random.PCG64(seq))


def mismatch_distance(v, T: float, d_a: float):
    """Distance between the PA measurement point and the RA position, |v T - d_a|."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v_arr)) or not (math.isfinite(T) and math.isfinite(d_a)):
        raise DomainError("mismatch_distance inputs must be finite")
    if np.any(v_arr < 0):
        raise DomainError("speed must be nonnegative")
    if T <= 0 or d_a <= 0:
        raise DomainError(f"need T > 0 and d_a > 0, got T={T}, d_a={d_a}")
    d = np.abs(v_arr * T - d_a)
    if d.ndim == 0:
        return float(d)
    return d


def sigma_from_distance(d: float, wavelength: float) -> float:
    """Mismatch parameter sigma = sqrt(1 - J0(2 pi d / lambda)^2)."""
    if not (math.isfinite(d) and d >= 0):
        raise DomainError(f"distance must be finite and >= 0, got {d}")
    if not (math.isfinite(wavelength) and wavelength > 0):
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    rho = bessel_j0(2.0 * math.pi * d / wavelength)
    return math.sqrt(max(0.0, 1.0 - rho * rho))


def conditional_gain_sf(g_hat, sigma: float, x):
    """P(g > x | g_hat) for scalar ``sigma``; ``g_hat`` and ``x`` broadcast."""
    g_hat = np.asarray(g_hat, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("gain threshold must be >= 0")
    if sigma == 0.0:
        out = (x < g_hat).astype(float)
    else:
        a = np.sqrt(2.0 * g_hat) / sigma
        b = np.sqrt(2.0 * x) / sigma
        out = np.asarray(marcum_q1(a, b, _CHANNEL_ACCURACY))
    if out.ndim == 0:
        return float(out)
    return out


def conditional_gain_cdf(dist: ConditionalGainDist, x):
    """CDF of the RA gain given the predictor gain; a unit step at g_hat when sigma = 0."""
    sf = conditional_gain_sf(dist.g_hat, dist.sigma, x)
    return 1.0 - sf


def sample_conditional_gain(dist: ConditionalGainDist, rng: RngStream, size=None):
    """Draw g = |sqrt(g_hat) + sigma w|^2 with w ~ CN(0, 1)."""
    if dist.sigma == 0.0:
        if size is None:
            return dist.g_hat
        return np.full(size, dist.g_hat)
    shape = () if size is None else tuple(np.atleast_1d(size))
    w = math.sqrt(0.5) * rng.generator.standard_normal((2,) + shape)
    g = (math.sqrt(dist.g_hat) + dist.sigma * w[0]) ** 2 + (dist.sigma * w[1]) ** 2
    if size is None:
        return float(g)
    return g


def sample_predictor_gain(sigma: float, rng: RngStream, size=None):
    """Draw g_hat = (1 - sigma^2)|h_pa|^2, i.e. exponential with mean 1 - sigma^2."""
    if not 0.0 <= sigma <= 1.0:
        raise DomainError(f"sigma must lie in [0, 1], got {sigma}")
    e = rng.generator.standard_exponential(size)
    if size is None:
        return (1.0 - sigma * sigma) * float(e)
    return (1.0 - sigma * sigma) * e


def sample_gain_pair(sigma: float, rng: RngStream, size: int):
    """Joint draw of the predictor gain and the RA gain, ``(g_hat, g)``.

    Both channels are built from the same two complex Gaussians, so ``g`` is
    Exp(1) marginally and follows the conditional law given ``g_hat``.
    """
    if not 0.0 <= sigma <= 1.0:
        raise DomainError(f"sigma must lie in [0, 1], got {sigma}")
    h = rng.generator.standard_normal((4, size)) * math.sqrt(0.5)
    h_pa = h[0] + 1j * h[1]
    q = h[2] + 1j * h[3]
    rho = math.sqrt(1.0 - sigma * sigma)
    g_hat = (1.0 - sigma * sigma) * np.abs(h_pa) ** 2
    g = np.abs(rho * h_pa + sigma * q) ** 2
    return g_hat, g
