"""
Vectorized scalar maximization and quadrature against the exponential law.

``maximize_scan_golden`` solves many independent one-dimensional problems at
once: row ``i`` of the objective is maximized over ``[lo[i], hi[i]]``. The
objectives met here are not guaranteed unimodal, so each interval is first
scanned on a uniform grid and golden-section search runs on the neighbourhood
of the best scan point, followed by a small local grid.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# Below this weight a node of the exponential rule cannot move any result
# computed in this package (integrands grow at most logarithmically).
_NEGLIGIBLE_WEIGHT = 1e-20


def maximize_scan_golden(objective, lo, hi, n_scan=64, xtol=1e-10, n_refine=21):
    """Maximize ``objective`` row-wise.

    ``objective`` maps an array ``r`` of shape ``(n, m)`` to values of the
    same shape, row ``i`` belonging to problem ``i``. Returns ``(x, f)``
    arrays of shape ``(n,)``. Ties go to the smallest argument.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    rows = np.arange(n)

    t = np.linspace(0.0, 1.0, n_scan)
    grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    vals = objective(grid)
    i_best = np.argmax(vals, axis=1)
    best_x = grid[rows, i_best]
    best_f = vals[rows, i_best]

    a = grid[rows, np.maximum(i_best - 1, 0)]
    b = grid[rows, np.minimum(i_best + 1, n_scan - 1)]
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = objective(c[:, None])[:, 0]
    fd = objective(d[:, None])[:, 0]

    width = float(np.max(b - a)) if n else 0.0
    n_iter = 0
    if width > xtol:
        n_iter = int(math.ceil(math.log(xtol / width) / math.log(INV_PHI)))
    for _ in range(n_iter):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - INV_PHI * (b - a)
        new_d = a + INV_PHI * (b - a)
        x_new = np.where(left, new_c, new_d)
        f_new = objective(x_new[:, None])[:, 0]
        c, fc, d, fd = (
            np.where(left, new_c, d),
            np.where(left, f_new, fd),
            np.where(left, c, new_d),
            np.where(left, fc, f_new),
        )

    for x_cand, f_cand in ((c, fc), (d, fd)):
        better = f_cand > best_f
        best_x = np.where(better, x_cand, best_x)
        best_f = np.where(better, f_cand, best_f)

    # local grid over the last golden bracket
    half = np.maximum(b - a, xtol)
    s = np.linspace(-1.0, 1.0, n_refine)
    local = np.clip(best_x[:, None] + half[:, None] * s[None, :], lo[:, None], hi[:, None])
    lvals = objective(local)
    j = np.argmax(lvals, axis=1)
    better = lvals[rows, j] > best_f
    best_x = np.where(better, local[rows, j], best_x)
    best_f = np.where(better, lvals[rows, j], best_f)
    return best_x, best_f


@lru_cache(maxsize=None)
def exponential_rule(n_nodes=64, split=1.0, log_floor=-30.0):
    """Nodes and weights for E[f(X)] with X ~ Exp(1).

    Half the nodes are Gauss-Legendre in log(x) on [exp(log_floor), split],
    which resolves the logarithmic features near zero that a plain
    Gauss-Laguerre rule misses; the rest are Gauss-Laguerre on the shifted
    tail [split, inf). Nodes with negligible weight are dropped.
    """
    n_head = n_nodes // 2
    n_tail = n_nodes - n_head
    xl, wl = np.polynomial.legendre.leggauss(n_head)
    span = math.log(split) - log_floor
    u = log_floor + 0.5 * (xl + 1.0) * span
    head_x = np.exp(u)
    head_w = 0.5 * span * wl * head_x * np.exp(-head_x)
    y, wy = np.polynomial.laguerre.laggauss(n_tail)
    tail_x = split + y
    tail_w = wy * math.exp(-split)
    x = np.concatenate([head_x, tail_x])
    w = np.concatenate([head_w, tail_w])
    keep = w > _NEGLIGIBLE_WEIGHT
    x, w = x[keep], w[keep]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w
