"""Vectorized numpy versions of the running-bound kernels.

Both functions take the per-round accept flags of one trial and return
``(m, bound, inconclusive)`` arrays indexed by round (round k at index k-1).
Inconclusive rounds carry NaN in ``bound``.
"""
from __future__ import annotations

import numpy as np

MAX_ITER = 200


def _log_delta(n, x, y):
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0) / y), 0.0)
        b = np.where(x < 1, (1 - x) * np.log(np.where(x < 1, 1 - x, 1.0) / (1 - y)), 0.0)
    d = np.maximum(a + b, 0.0)
    with np.errstate(divide="ignore"):
        d = np.where(x == 1.0, -np.log(np.where(y > 0, y, 1.0)), d)
    out = -n * d
    at_zero = y <= 0.0
    if np.any(at_zero):
        out = np.where(at_zero, np.where(x > 0, -np.inf, 0.0), out)
    return out


def _prepare(accepts):
    acc = np.ascontiguousarray(accepts, dtype=np.uint8)
    m = np.cumsum(acc, dtype=np.int64)
    n = np.arange(1, acc.size + 1, dtype=np.int64)
    return n, m


def running_delta(accepts, epsilon: float, f: float):
    n, m = _prepare(accepts)
    x = m / n
    y = 1.0 - f * epsilon
    flag = x < y
    bound = np.minimum(np.exp(_log_delta(n, x, y)), 1.0)
    bound[flag] = np.nan
    return m, bound, flag


def running_epsilon(accepts, delta: float, f: float):
    n, m = _prepare(accepts)
    target = np.log(delta)
    eps = np.full(n.size, np.nan)

    full = m == n
    eps[full] = -np.expm1(target / n[full]) / f

    idx = np.flatnonzero(~full)
    if idx.size:
        nn, x = n[idx], m[idx] / n[idx]
        lo = (1.0 - x) / f
        hi = np.full(idx.size, min(1.0, 1.0 / f))
        ok = (lo < hi) & ~(_log_delta(nn, x, 1.0 - f * hi) > target)
        active = ok.copy()
        for _ in range(MAX_ITER):
            mid = 0.5 * (lo + hi)
            active &= (mid > lo) & (mid < hi)
            if not active.any():
                break
            above = _log_delta(nn, x, 1.0 - f * mid) > target
            lo = np.where(active & above, mid, lo)
            hi = np.where(active & ~above, mid, hi)
        eps[idx] = np.where(ok, hi, np.nan)

    eps[eps >= 1.0] = np.nan
    return m, eps, np.isnan(eps)
