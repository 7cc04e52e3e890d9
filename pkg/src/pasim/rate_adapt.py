"""
Rate adaptation from the predictor-antenna gain.

For each predictor gain ``g_hat`` the transmitter picks the rate that maximizes
the outage-limited throughput

    r * P(log(1 + g P) >= r | g_hat) = r * Q1(sqrt(2 g_hat)/sigma, sqrt(2 (e^r - 1)/P)/sigma),

and the long-run throughput averages that optimum over g_hat ~ Exp(1 - sigma^2).
Full-CSIT (ergodic capacity) and no-CSIT (best fixed rate over Rayleigh
fading) baselines bracket the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import lambertw

from .channel import RngStream, conditional_gain_sf, sample_predictor_gain
from .numerics import exponential_rule, maximize_scan_golden
from .specfun import DomainError
from .units import db_to_linear

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"

# Upper end of the rate bracket: log(1 + (g_hat + SPREAD * sigma^2) P).
_BRACKET_SPREAD = 10.0


class UnreachableTargetError(RuntimeError):
    """The throughput target cannot be met inside the SNR search bracket."""

    def __init__(self, target, achieved, snr_db):
        super().__init__(target, achieved, snr_db)
        self.target = target
        self.achieved = achieved
        self.snr_db = snr_db

    def __str__(self):
        return f"target {self.target:g} npcu unreachable: {self.achieved:g} npcu at {self.snr_db:g} dB"


@dataclass(frozen=True)
class RateSolution:
    r_opt: float
    success_prob: float
    conditional_throughput: float


@dataclass(frozen=True)
class ThroughputEstimate:
    value: float
    std_error: float = 0.0
    method: str = QUADRATURE


def _check_snr(P):
    if not (math.isfinite(P) and P > 0):
        raise DomainError(f"SNR must be positive and finite, got {P}")


def _check_sigma(sigma):
    if not 0.0 <= sigma <= 1.0:
        raise DomainError(f"sigma must lie in [0, 1], got {sigma}")


def optimal_rates(g_hat, sigma: float, P: float):
    """Vectorized rate optimization over an array of predictor gains.

    Returns ``(r_opt, success_prob)`` arrays.
    """
    _check_snr(P)
    _check_sigma(sigma)
    g_hat = np.atleast_1d(np.asarray(g_hat, dtype=float))
    if sigma == 0.0:
        return np.log1p(g_hat * P), np.ones_like(g_hat)

    col = g_hat[:, None]

    def objective(r):
        return r * conditional_gain_sf(col, sigma, np.expm1(r) / P)

    hi = np.log1p((g_hat + _BRACKET_SPREAD * sigma * sigma) * P)
    r_opt, _ = maximize_scan_golden(objective, np.zeros_like(g_hat), hi)
    success = np.asarray(conditional_gain_sf(g_hat, sigma, np.expm1(r_opt) / P))
    return r_opt, success


def optimal_rate_given_ghat(g_hat: float, sigma: float, P: float) -> RateSolution:
    """Rate maximizing the outage-limited throughput for one predictor gain."""
    if not (math.isfinite(g_hat) and g_hat >= 0):
        raise DomainError(f"g_hat must be >= 0, got {g_hat}")
    r, s = optimal_rates([g_hat], sigma, P)
    r, s = float(r[0]), float(s[0])
    return RateSolution(r_opt=r, success_prob=s, conditional_throughput=r * s)


def conditional_throughput(g_hat, sigma: float, P: float):
    r, s = optimal_rates(g_hat, sigma, P)
    return r * s


def expected_throughput(
    sigma: float,
    P: float,
    method: str = QUADRATURE,
    *,
    n_nodes: int = 64,
    draws: int = 10_000,
    rng: RngStream | None = None,
) -> ThroughputEstimate:
    """Throughput averaged over the predictor gain g_hat ~ Exp(1 - sigma^2).

    ``quadrature`` uses an ``n_nodes`` rule for the exponential law;
    ``monte_carlo`` draws ``draws`` predictor gains from ``rng`` and reports
    the standard error of the mean.
    """
    _check_snr(P)
    _check_sigma(sigma)
    mean_ghat = 1.0 - sigma * sigma
    if method == QUADRATURE:
        if sigma == 1.0:
            return ThroughputEstimate(no_csit_throughput(P), 0.0, QUADRATURE)
        x, w = exponential_rule(n_nodes)
        value = float(np.dot(w, conditional_throughput(mean_ghat * x, sigma, P)))
        return ThroughputEstimate(value, 0.0, QUADRATURE)
    if method == MONTE_CARLO:
        if draws < 2:
            raise DomainError("monte_carlo needs at least 2 draws")
        rng = RngStream(0) if rng is None else rng
        g_hat = sample_predictor_gain(sigma, rng, draws)
        eta = conditional_throughput(g_hat, sigma, P)
        return ThroughputEstimate(
            float(eta.mean()), float(eta.std(ddof=1) / math.sqrt(draws)), MONTE_CARLO
        )
    raise DomainError(f"unknown method {method!r}")


def no_csit_throughput(P: float) -> float:
    """Best fixed-rate outage throughput over unit-mean Rayleigh fading.

    The maximizer solves r e^r = P (Lambert W).
    """
    if not (math.isfinite(P) and P >= 0):
        raise DomainError(f"SNR must be >= 0, got {P}")
    if P == 0.0:
        return 0.0
    r = float(lambertw(P).real)
    return r * math.exp(-math.expm1(r) / P)


def no_csit_rate(P: float) -> float:
    _check_snr(P)
    return float(lambertw(P).real)


def full_csit_throughput(P: float) -> float:
    """Ergodic capacity E[log(1 + g P)], g ~ Exp(1), equal to e^(1/P) E1(1/P)."""
    _check_snr(P)

    def f(x):
        return math.log1p(P * x) * math.exp(-x)

    head, _ = integrate.quad(f, 0.0, 1.0, points=[min(1.0 / P, 0.5)], epsabs=0.0, epsrel=1e-12, limit=200)
    tail, _ = integrate.quad(f, 1.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return head + tail


def required_snr(
    target_throughput: float,
    throughput_fn,
    tol_db: float = 0.01,
    lo_db: float = -10.0,
    hi_db: float = 60.0,
) -> float:
    """Smallest SNR (linear) in ``[lo_db, hi_db]`` meeting the target.

    Bisection in dB on a nondecreasing ``throughput_fn(P)``; stops when the
    bracket is at most ``tol_db`` wide and returns its upper end.
    """
    if tol_db <= 0:
        raise DomainError("tol_db must be positive")
    achieved = throughput_fn(db_to_linear(hi_db))
    if achieved < target_throughput:
        raise UnreachableTargetError(target_throughput, achieved, hi_db)
    if throughput_fn(db_to_linear(lo_db)) >= target_throughput:
        return db_to_linear(lo_db)
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if throughput_fn(db_to_linear(mid)) >= target_throughput:
            hi = mid
        else:
            lo = mid
    return db_to_linear(hi)
