"""Sample-complexity and confidence bounds for local state verification.

All logarithms are natural. ``f`` is the efficiency constant of the
strategy (1 for the globally optimal one). With ``m`` accepts out of ``n``
rounds, a source whose every state has infidelity at least ``epsilon`` passes
each round with probability at most ``1 - f*epsilon``; the Chernoff bound
``exp(-n * D(m/n || 1 - f*epsilon))`` is the reported failure probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

BISECTION_MAX_ITER = 200


class Inconclusive(ValueError):
    """The observed accept frequency supports no statement at the requested level."""


def _check_unit(name: str, value: float, closed: bool = False) -> float:
    value = float(value)
    ok = 0.0 <= value <= 1.0 if closed else 0.0 < value < 1.0
    if not (math.isfinite(value) and ok):
        interval = "[0, 1]" if closed else "(0, 1)"
        raise ValueError(f"{name} must lie in {interval}, got {value!r}")
    return value


def _check_f(f: float) -> float:
    f = float(f)
    if not (math.isfinite(f) and 0.0 < f <= 1.0):
        raise ValueError(f"f must lie in (0, 1], got {f!r}")
    return f


def _check_counts(n: int, m: int) -> None:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    if not 0 <= m <= n:
        raise ValueError(f"m must satisfy 0 <= m <= n, got m={m!r}, n={n!r}")


def _xlogy(x: float, ratio: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(ratio)


def kl_divergence(x: float, y: float) -> float:
    """Relative entropy between Bernoulli(x) and Bernoulli(y)."""
    x = _check_unit("x", x, closed=True)
    y = _check_unit("y", y)
    if x == 1.0:
        return -math.log(y)  # avoids rounding 1/y
    d = _xlogy(x, x / y) + _xlogy(1.0 - x, (1.0 - x) / (1.0 - y))
    return max(d, 0.0)


def n_global_real(epsilon: float, delta: float) -> float:
    epsilon = _check_unit("epsilon", epsilon)
    delta = _check_unit("delta", delta)
    return math.log(1.0 / delta) / -math.log1p(-epsilon)


def n_global(epsilon: float, delta: float) -> int:
    """Rounds needed by the globally optimal strategy."""
    return math.ceil(n_global_real(epsilon, delta))


def n_local_real(epsilon: float, delta: float, f: float) -> float:
    epsilon = _check_unit("epsilon", epsilon)
    delta = _check_unit("delta", delta)
    f = _check_f(f)
    if f * epsilon >= 1.0:
        raise ValueError("f * epsilon must be below 1")
    return math.log(1.0 / delta) / -math.log1p(-f * epsilon)


def n_local(epsilon: float, delta: float, f: float) -> int:
    """Rounds needed by a strategy with efficiency ``f`` when every round accepts."""
    return math.ceil(n_local_real(epsilon, delta, f))


def _log_delta(n: int, x: float, y: float) -> float:
    if y <= 0.0:
        return -math.inf if x > 0.0 else 0.0
    return -n * kl_divergence(x, y)


def log_delta_from_counts(n: int, m: int, epsilon: float, f: float) -> float:
    """Natural log of :func:`delta_from_counts`; stays accurate where delta underflows."""
    _check_counts(n, m)
    epsilon = _check_unit("epsilon", epsilon)
    f = _check_f(f)
    x = m / n
    y = 1.0 - f * epsilon
    if x < y:
        raise Inconclusive(
            f"accept frequency {x:.6g} is below 1 - f*epsilon = {y:.6g}; no statement at epsilon={epsilon:g}"
        )
    return min(0.0, _log_delta(n, x, y))


def delta_from_counts(n: int, m: int, epsilon: float, f: float) -> float:
    """Failure probability for the claim "infidelity below epsilon".

    Raises :class:`Inconclusive` when ``m/n < 1 - f*epsilon``.
    """
    return math.exp(log_delta_from_counts(n, m, epsilon, f))


def epsilon_from_confidence(n: int, m: int, delta: float, f: float) -> float:
    """Smallest infidelity certified at failure probability ``delta``.

    Bisection on epsilon over ((1 - m/n)/f, min(1, 1/f)), run until the
    bracket is one ulp wide; the bound is strictly decreasing there.
    All-accept runs use the closed form ``(1 - delta**(1/n)) / f``. Raises :class:`Inconclusive` when no
    epsilon below 1 reaches ``delta``.
    """
    _check_counts(n, m)
    delta = _check_unit("delta", delta)
    f = _check_f(f)
    target = math.log(delta)
    if m == n:
        eps = -math.expm1(target / n) / f
    else:
        x = m / n
        lo = (1.0 - x) / f
        hi = min(1.0, 1.0 / f)
        if lo >= hi or _log_delta(n, x, 1.0 - f * hi) > target:
            raise Inconclusive(
                f"no epsilon below 1 reaches delta={delta:g} with m={m}, n={n}, f={f:g}"
            )
        for _ in range(BISECTION_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _log_delta(n, x, 1.0 - f * mid) > target:
                lo = mid
            else:
                hi = mid
        eps = hi
    if eps >= 1.0:
        raise Inconclusive(f"certified infidelity {eps:.6g} is not below 1 (n={n}, delta={delta:g})")
    return eps


@dataclass(frozen=True)
class VerdictBound:
    """An (epsilon, delta) guarantee backed by m accepts out of n rounds."""

    n: int
    m: int
    epsilon: float
    delta: float
    f: float

    def __post_init__(self):
        _check_counts(self.n, self.m)
        _check_unit("epsilon", self.epsilon)
        _check_unit("delta", self.delta)
        _check_f(self.f)

    @property
    def fidelity(self) -> float:
        return 1.0 - self.epsilon


def verdict_at_epsilon(n: int, m: int, epsilon: float, f: float) -> VerdictBound:
    delta = delta_from_counts(n, m, epsilon, f)
    if delta >= 1.0:
        raise Inconclusive(f"zero divergence at epsilon={epsilon:g}; delta = 1 carries no confidence")
    return VerdictBound(n, m, epsilon, delta, f)


def verdict_at_delta(n: int, m: int, delta: float, f: float) -> VerdictBound:
    return VerdictBound(n, m, epsilon_from_confidence(n, m, delta, f), delta, f)
