"""
Finite-blocklength (FBL) error probability and throughput.

A codeword of ``L`` channel uses sent at rate ``r`` over gain ``g`` fails with
probability given by the normal approximation

    eps(g, r) = Q_G( sqrt(L / V(g)) * (log(1 + g P) - r) ),
    V(g) = 1 - (1 + g P)^(-2)           (dispersion, nats^2)

The O(log L / L) correction is left out.

The error averaged over the RA gain given the predictor gain,
E[eps(g, r) | g_hat], is computed without sampling. Writing
eps = P(Z > s(g)) with Z standard normal and s the (increasing) normal score
above gives E[eps | g_hat] = E_Z[F(s^-1(Z))], a Gauss-Hermite sum over the
exact conditional CDF F. That sum is smooth when F is wider than the error
kernel; when the kernel is the wider one the expectation is instead taken
over the complex Gaussian that perturbs the predictor channel, with a tensor
Gauss-Hermite rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .channel import RngStream, conditional_gain_sf, sample_gain_pair
from .numerics import exponential_rule, maximize_scan_golden
from .specfun import DomainError, gaussian_q

CAPACITY = "capacity"
OPTIMAL = "optimal"

_HERMITE_NODES = 32
_BRACKET_SPREAD = 10.0


@dataclass(frozen=True)
class FblConfig:
    codeword_length_L: int
    rate_r: float = 0.0

    def __post_init__(self):
        L = self.codeword_length_L
        if int(L) != L or L < 1:
            raise DomainError(f"codeword length must be a positive integer, got {L}")
        if not (math.isfinite(self.rate_r) and self.rate_r >= 0):
            raise DomainError(f"rate must be >= 0, got {self.rate_r}")


@dataclass(frozen=True)
class ErrorEstimate:
    value: float
    std_error: float
    draws: int


@lru_cache(maxsize=None)
def _hermite_rule(n):
    z, w = np.polynomial.hermite_e.hermegauss(n)
    return z, w / math.sqrt(2.0 * math.pi)


def channel_dispersion(g, P):
    """V(g) = 1 - (1 + g P)^-2 for the complex AWGN channel."""
    return -np.expm1(-2.0 * np.log1p(np.asarray(g, dtype=float) * P))


def fbl_error(g, P: float, L, r):
    """Vectorized normal-approximation error probability."""
    g = np.asarray(g, dtype=float)
    r = np.asarray(r, dtype=float)
    g, r = np.broadcast_arrays(g, r)
    cap = np.log1p(g * P)
    V = channel_dispersion(g, P)
    zero = V <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.sqrt(L / np.where(zero, 1.0, V)) * (cap - r)
    eps = np.asarray(gaussian_q(score), dtype=float)
    eps = np.where(zero, (r > 0).astype(float), eps)
    return eps


def fbl_error_given_gain(g: float, P: float, cfg: FblConfig) -> float:
    """Error probability of one codeword over a known gain."""
    if not (math.isfinite(g) and g >= 0):
        raise DomainError(f"gain must be >= 0, got {g}")
    if not (math.isfinite(P) and P > 0):
        raise DomainError(f"SNR must be positive, got {P}")
    return float(fbl_error(g, P, cfg.codeword_length_L, cfg.rate_r))


@njit(cache=True)
def _inverse_score(z, r, sqrt_L, out):
    # solve sqrt(L) (t - r) / sqrt(1 - e^(-2t)) = z for t = log(1 + g P) >= 0
    for i in range(z.size):
        zi = z[i]
        ri = r[i]
        if ri == 0.0 and zi <= 0.0:
            out[i] = 0.0
            continue
        # safeguarded Newton; the score is increasing in t
        lo = 0.0
        hi = ri + max(zi, 0.0) / sqrt_L + 1e-300
        t = ri + zi / sqrt_L
        if not (lo < t < hi):
            t = 0.5 * (lo + hi)
        for _ in range(100):
            v = -math.expm1(-2.0 * t)
            sv = math.sqrt(v)
            f = sqrt_L * (t - ri) / sv - zi
            if abs(f) <= 1e-12 * (1.0 + abs(zi)):
                break
            if f < 0.0:
                lo = t
            else:
                hi = t
            df = sqrt_L * (1.0 / sv - (t - ri) * math.exp(-2.0 * t) / (v * sv))
            t_new = t - f / df if df > 0.0 else 0.5 * (lo + hi)
            if not (lo < t_new < hi):
                t_new = 0.5 * (lo + hi)
            if abs(t_new - t) <= 1e-14 * t:
                t = t_new
                break
            t = t_new
        out[i] = t


def _mean_error_by_score(g_hat, sigma, P, L, r):
    z, w = _hermite_rule(_HERMITE_NODES)
    shape = r.shape + z.shape
    zz = np.broadcast_to(z, shape).ravel()
    rr = np.broadcast_to(r[..., None], shape).ravel()
    t = np.empty(zz.size)
    _inverse_score(zz, rr, math.sqrt(L), t)
    g = np.expm1(t.reshape(shape)) / P
    cdf = 1.0 - conditional_gain_sf(g_hat[..., None], sigma, g)
    return cdf @ w


def _mean_error_by_perturbation(g_hat, sigma, P, L, r):
    z, w = _hermite_rule(_HERMITE_NODES)
    u = z[:, None] * math.sqrt(0.5)
    v = z[None, :] * math.sqrt(0.5)
    w2 = (w[:, None] * w[None, :]).ravel()
    # g = |sqrt(g_hat) + sigma (u + i v)|^2 at the tensor nodes
    g = (np.sqrt(g_hat)[..., None, None] + sigma * u) ** 2 + (sigma * v) ** 2
    g = g.reshape(g_hat.shape + (-1,))
    eps = fbl_error(g, P, L, r[..., None])
    return eps @ w2


def mean_error_given_ghat(g_hat, sigma: float, P: float, L: int, r):
    """E[eps(g, r) | g_hat]; ``g_hat`` and ``r`` broadcast to a common shape."""
    g_hat, r = np.broadcast_arrays(np.asarray(g_hat, dtype=float), np.asarray(r, dtype=float))
    if sigma == 0.0:
        return fbl_error(g_hat, P, L, r)
    g_hat = g_hat.ravel()
    r_flat = r.ravel()
    out = np.empty(r_flat.shape)

    spread = np.sqrt(2.0 * sigma * sigma * g_hat + sigma**4)
    g_star = np.expm1(r_flat) / P
    kernel = np.sqrt(channel_dispersion(g_star, P) / L) * (1.0 + g_star * P) / P
    by_score = spread >= kernel
    if np.any(by_score):
        out[by_score] = _mean_error_by_score(g_hat[by_score], sigma, P, L, r_flat[by_score])
    if np.any(~by_score):
        out[~by_score] = _mean_error_by_perturbation(g_hat[~by_score], sigma, P, L, r_flat[~by_score])
    return np.clip(out, 0.0, 1.0).reshape(r.shape)


def optimal_fbl_rates(g_hat, sigma: float, P: float, L: int):
    """Per-g_hat rate maximizing r (1 - E[eps | g_hat]); returns ``(r, throughput)``."""
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    col = g_hat[:, None]

    def objective(r):
        return r * (1.0 - mean_error_given_ghat(np.broadcast_to(col, r.shape), sigma, P, L, r))

    hi = np.log1p((g_hat + _BRACKET_SPREAD * sigma * sigma) * P)
    return maximize_scan_golden(objective, np.zeros_like(g_hat), hi)


def _check(sigma, P, L):
    if not 0.0 <= sigma <= 1.0:
        raise DomainError(f"sigma must lie in [0, 1], got {sigma}")
    if not (math.isfinite(P) and P > 0):
        raise DomainError(f"SNR must be positive, got {P}")
    FblConfig(L)


def fbl_throughput(sigma: float, P: float, L: int, rate: float | None = None, n_nodes: int = 64) -> float:
    """FBL throughput averaged over g_hat ~ Exp(1 - sigma^2).

    With ``rate=None`` the rate is optimized for every predictor gain; a
    number fixes the rate for all realizations instead.
    """
    _check(sigma, P, L)
    mean_ghat = 1.0 - sigma * sigma
    if mean_ghat == 0.0:
        g_hat, w = np.zeros(1), np.ones(1)
    else:
        x, w = exponential_rule(n_nodes)
        g_hat = mean_ghat * x
    if rate is None:
        _, thr = optimal_fbl_rates(g_hat, sigma, P, L)
    else:
        FblConfig(L, rate)
        thr = rate * (1.0 - mean_error_given_ghat(g_hat, sigma, P, L, rate))
    return float(np.dot(w, thr))


def _rate_policy(rate, sigma, P, L, g_hat_draws):
    if isinstance(rate, str):
        if rate == CAPACITY:
            return np.log1p(g_hat_draws * P)
        if rate == OPTIMAL:
            mean_ghat = 1.0 - sigma * sigma
            if mean_ghat == 0.0:
                r0, _ = optimal_fbl_rates([0.0], sigma, P, L)
                return np.full_like(g_hat_draws, r0[0])
            # interpolate the per-g_hat optimum; the result is itself a valid policy
            grid = mean_ghat * np.concatenate([[0.0], np.geomspace(1e-6, 20.0, 63)])
            r_grid, _ = optimal_fbl_rates(grid, sigma, P, L)
            return np.interp(g_hat_draws, grid, r_grid)
        raise DomainError(f"unknown rate policy {rate!r}")
    FblConfig(L, float(rate))
    return np.full_like(g_hat_draws, float(rate))


def fbl_average_error(
    sigma: float,
    P: float,
    L: int,
    rate=OPTIMAL,
    draws: int = 100_000,
    rng: RngStream | None = None,
) -> ErrorEstimate:
    """Monte Carlo average codeword error over the joint law of (g_hat, g).

    ``rate`` is a fixed rate in npcu, ``"capacity"`` (r = log(1 + g_hat P))
    or ``"optimal"`` (the per-g_hat FBL-throughput-optimal rate).
    """
    _check(sigma, P, L)
    if draws < 2:
        raise DomainError("need at least 2 draws")
    rng = RngStream(0) if rng is None else rng
    g_hat, g = sample_gain_pair(sigma, rng, draws)
    r = _rate_policy(rate, sigma, P, L, g_hat)
    eps = fbl_error(g, P, L, r)
    return ErrorEstimate(float(eps.mean()), float(eps.std(ddof=1) / math.sqrt(draws)), draws)
