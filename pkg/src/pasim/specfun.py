"""
Special functions used by the channel model.

Provides the ordinary Bessel function J0, the modified Bessel function I0
(optionally exponentially scaled), the first-order Marcum Q-function and the
Gaussian tail function.

J0 and I0 are evaluated from their integral representations with the midpoint
rule; the integrands are periodic and analytic, so the rule converges
geometrically once the node count exceeds the argument.

The Marcum Q-function uses the Poisson-mixture form

    Q1(a, b) = sum_k Pois(k; a^2/2) * P(Pois(b^2/2) <= k)
             = P(M <= N),   N ~ Pois(a^2/2), M ~ Pois(b^2/2) independent,

summed over windows around the two Poisson means whose widths come from
Bernstein tail bounds, so the truncation error is bounded by ``abs_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.special import erfc


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class ConvergenceError(ArithmeticError):
    """A series needed more terms than allowed."""


@dataclass(frozen=True)
class Accuracy:
    """Truncation control for series evaluations."""

    abs_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms}")


DEFAULT_ACCURACY = Accuracy()


def _check_finite(x, name="x"):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero.

    Uses J0(x) = (1/pi) * int_0^pi cos(x cos t) dt with ``40 + |x|`` midpoint
    nodes; the aliasing error is of the order of J_{2n}(x).
    """
    x = float(x)
    _check_finite(x)
    n = 40 + int(math.ceil(abs(x)))
    theta = (np.arange(n) + 0.5) * (math.pi / n)
    return float(np.mean(np.cos(x * np.cos(theta))))


def bessel_i0(x: float, scaled: bool = False) -> float:
    """Modified Bessel function I0(x) for x >= 0.

    With ``scaled=True`` returns exp(-x) * I0(x), which stays finite for any
    x; the unscaled value overflows (``OverflowError``) beyond x ~ 713.
    """
    x = float(x)
    _check_finite(x)
    if x < 0:
        raise DomainError(f"bessel_i0 needs x >= 0, got {x}")
    # integrand exp(x (cos t - 1)) has width ~ 1/sqrt(x) around t = 0
    n = 40 + int(math.ceil(6.0 * math.sqrt(x)))
    theta = (np.arange(n) + 0.5) * (math.pi / n)
    value = float(np.mean(np.exp(x * (np.cos(theta) - 1.0))))
    if scaled:
        return value
    return value * math.exp(x)


@njit(cache=True)
def _poisson_half_width(mu, log_inv_tol):
    # P(|X - mu| >= t) <= exp(-t^2 / (2 (mu + t/3))) for X ~ Pois(mu)
    L = log_inv_tol
    return L / 3.0 + math.sqrt(L * L / 9.0 + 2.0 * mu * L)


@njit(cache=True)
def _log_poisson_pmf(k, mu):
    return -mu + k * math.log(mu) - math.lgamma(k + 1.0)


@njit(cache=True)
def _marcum_q1_kernel(a, b, tol, max_terms, extra):
    lam = 0.5 * a * a
    beta = 0.5 * b * b
    if beta == 0.0:
        # also covers b so small that b^2 underflows; Q1 >= exp(-b^2/2) = 1
        return 1.0
    if lam == 0.0:
        return math.exp(-beta)
    # four truncations (two tails of N, two of M), each allowed tol / 4
    log_inv = math.log(4.0 / tol)
    wl = _poisson_half_width(lam, log_inv)
    wb = _poisson_half_width(beta, log_inv)
    k_lo = max(0, int(math.floor(lam - wl)) - extra)
    k_hi = int(math.ceil(lam + wl)) + extra
    j_lo = max(0, int(math.floor(beta - wb)) - extra)
    j_hi = int(math.ceil(beta + wb)) + extra
    if j_lo > k_hi:
        # M exceeds every likely N
        return 0.0
    n_terms = (k_hi - k_lo + 1) + (min(j_hi, k_hi) - j_lo + 1)
    if n_terms > max_terms:
        return math.nan

    q = math.exp(_log_poisson_pmf(j_lo, beta))
    j = j_lo
    cdf_m = 0.0
    p = math.exp(_log_poisson_pmf(k_lo, lam))
    total = 0.0
    for k in range(k_lo, k_hi + 1):
        while j <= k and j <= j_hi:
            cdf_m += q
            q *= beta / (j + 1.0)
            j += 1
        total += p * min(cdf_m, 1.0)
        p *= lam / (k + 1.0)
    return min(max(total, 0.0), 1.0)


@njit(cache=True)
def _marcum_q1_array(a, b, tol, max_terms, extra, out):
    for i in range(a.size):
        out[i] = _marcum_q1_kernel(a[i], b[i], tol, max_terms, extra)


def marcum_q1(a, b, accuracy: Accuracy | None = None, *, _extra_terms: int = 0):
    """First-order Marcum Q-function Q1(a, b) for a, b >= 0.

    Accepts scalars or broadcastable arrays. The truncation error is at most
    ``accuracy.abs_tol``; a ``ConvergenceError`` is raised if that would take
    more than ``accuracy.max_terms`` terms.
    """
    acc = DEFAULT_ACCURACY if accuracy is None else accuracy
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise DomainError("marcum_q1 arguments must be finite")
    if np.any(a_arr < 0) or np.any(b_arr < 0):
        raise DomainError("marcum_q1 arguments must be nonnegative")
    flat_a = np.ascontiguousarray(a_arr, dtype=float).ravel()
    flat_b = np.ascontiguousarray(b_arr, dtype=float).ravel()
    out = np.empty(flat_a.size)
    _marcum_q1_array(flat_a, flat_b, float(acc.abs_tol), int(acc.max_terms), int(_extra_terms), out)
    if np.any(np.isnan(out)):
        raise ConvergenceError(
            f"marcum_q1 needs more than max_terms={acc.max_terms} terms for these arguments"
        )
    out = out.reshape(a_arr.shape)
    if out.ndim == 0:
        return float(out)
    return out


def gaussian_q(x):
    """Standard normal tail probability P(Z > x)."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("gaussian_q argument must not be NaN")
    out = 0.5 * erfc(arr / math.sqrt(2.0))
    if out.ndim == 0:
        return float(out)
    return out
