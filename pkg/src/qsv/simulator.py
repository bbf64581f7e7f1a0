"""Monte Carlo runs of the verification protocol.

Each round draws a setting with its strategy weight, then accepts with
probability tr(P sigma) for the source state sigma. Randomness per trial comes
from a PCG64 generator seeded with ``seed XOR splitmix64(trial_index)``;
every round consumes exactly two uniforms, setting draw first and outcome
draw second.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .states import SourceModel, emit
from .strategy import Strategy, omega

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64((int(seed) & MASK64) ^ splitmix64(int(trial_index))))


@dataclass(frozen=True)
class FixedEpsilon:
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")


@dataclass(frozen=True)
class FixedDelta:
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")


@dataclass(frozen=True)
class TrialConfig:
    strategy: Strategy
    source: SourceModel
    n_max: int
    mode: FixedEpsilon | FixedDelta
    seed: int = 0
    trial_index: int = 0

    def __post_init__(self):
        if int(self.n_max) < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max!r}")
        if not isinstance(self.mode, (FixedEpsilon, FixedDelta)):
            raise TypeError("mode must be FixedEpsilon or FixedDelta")


@dataclass
class TrialRecord:
    """Per-round log of one trial. Arrays are indexed by round - 1."""

    labels: list[str]
    setting: np.ndarray
    accepted: np.ndarray
    m: np.ndarray
    bound: np.ndarray
    inconclusive: np.ndarray
    mode: FixedEpsilon | FixedDelta = field(repr=False)

    def __len__(self) -> int:
        return int(self.accepted.size)

    @property
    def accept_frequency(self) -> float:
        return float(self.m[-1]) / len(self)

    @property
    def final_bound(self) -> float:
        return float(self.bound[-1])

    def rows(self):
        for k in range(len(self)):
            yield (
                k + 1,
                self.labels[self.setting[k]],
                "accept" if self.accepted[k] else "reject",
                int(self.m[k]),
                float(self.bound[k]),
                bool(self.inconclusive[k]),
            )

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "setting", "outcome", "m", "bound", "inconclusive"])
        for step, label, outcome, m, bound, flag in self.rows():
            writer.writerow([step, label, outcome, m, format_float(bound), int(flag)])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def format_float(x: float) -> str:
    return "nan" if math.isnan(x) else format(x, ".17g")


def accept_probability(strategy: Strategy, state) -> float:
    """tr(Omega state), clamped to [0, 1]."""
    p = float(np.real(np.trace(omega(strategy) @ np.asarray(state, dtype=complex))))
    if not -1e-12 <= p <= 1.0 + 1e-12:
        raise ValueError(f"accept probability {p!r} is outside [0, 1]; is the state a density matrix?")
    return min(1.0, max(0.0, p))


def setting_accept_probabilities(strategy: Strategy, state) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    probs = np.array(
        [np.real(np.trace(s.accept_projector @ state)) for s in strategy.settings]
    )
    return np.clip(probs, 0.0, 1.0)


def sample_outcomes(strategy: Strategy, state, n: int, rng: np.random.Generator):
    """Setting indices and accept flags for ``n`` rounds."""
    u = rng.random((n, 2))
    cumulative = np.cumsum(strategy.weights)
    cumulative[-1] = 1.0
    setting = np.searchsorted(cumulative, u[:, 0], side="right")
    setting = np.minimum(setting, len(strategy.settings) - 1)
    accepted = u[:, 1] < setting_accept_probabilities(strategy, state)[setting]
    return setting, accepted


def run_trial(config: TrialConfig) -> TrialRecord:
    strategy = config.strategy
    sigma = emit(config.source)
    rng = trial_rng(config.seed, config.trial_index)
    setting, accepted = sample_outcomes(strategy, sigma, int(config.n_max), rng)
    acc = accepted.astype(np.uint8)
    if isinstance(config.mode, FixedEpsilon):
        m, bound, flag = kernels.running_delta(acc, config.mode.epsilon, strategy.f)
    else:
        m, bound, flag = kernels.running_epsilon(acc, config.mode.delta, strategy.f)
    return TrialRecord(strategy.labels, setting, accepted, m, bound, flag, config.mode)


@dataclass
class ScalingSummary:
    n: np.ndarray
    epsilon_mean: np.ndarray
    epsilon_std: np.ndarray
    counted: np.ndarray
    inconclusive_count: np.ndarray
    trials: int
    delta: float
    slope: float
    intercept: float

    @property
    def n_range(self) -> tuple[int, int]:
        return int(self.n[0]), int(self.n[-1])

    @property
    def flagged(self) -> list[int]:
        """Round counts at which every trial was excluded."""
        return [int(k) for k, c in zip(self.n, self.counted) if c == 0]

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "epsilon_mean", "epsilon_stddev", "inconclusive_count"])
        for k, mean, std, bad in zip(self.n, self.epsilon_mean, self.epsilon_std, self.inconclusive_count):
            writer.writerow([int(k), format_float(mean), format_float(std), int(bad)])
        fh.write(f"# slope={format_float(self.slope)},intercept={format_float(self.intercept)}\n")

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def run_scaling(
    strategy: Strategy,
    source: SourceModel,
    trials: int,
    n_range: tuple[int, int],
    delta: float,
    base_seed: int = 0,
    exclude_after_rejection: bool = True,
) -> ScalingSummary:
    """Average the certified epsilon at each round count over independent trials.

    A trial's value at round n is excluded (and counted in
    ``inconclusive_count``) when it is inconclusive or, with
    ``exclude_after_rejection``, when any of its first n rounds rejected.
    """
    n_lo, n_hi = (int(v) for v in n_range)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials!r}")
    if not 1 <= n_lo < n_hi:
        raise ValueError(f"n range must satisfy 1 <= n_lo < n_hi, got {n_range!r}")
    mode = FixedDelta(delta)

    values = np.empty((trials, n_hi - n_lo + 1))
    keep = np.empty_like(values, dtype=bool)
    for t in range(trials):
        rec = run_trial(TrialConfig(strategy, source, n_hi, mode, base_seed, t))
        window = slice(n_lo - 1, n_hi)
        values[t] = rec.bound[window]
        ok = ~rec.inconclusive[window]
        if exclude_after_rejection:
            clean = np.cumsum(~rec.accepted) == 0
            ok &= clean[window]
        keep[t] = ok

    counted = keep.sum(axis=0)
    masked = np.where(keep, values, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = masked.sum(axis=0) / counted
        dev = np.where(keep, values - mean, 0.0)
        std = np.where(counted > 1, np.sqrt((dev ** 2).sum(axis=0) / np.maximum(counted - 1, 1)), 0.0)
    mean = np.where(counted > 0, mean, np.nan)
    std = np.where(counted > 0, std, np.nan)

    n = np.arange(n_lo, n_hi + 1)
    good = counted > 0
    if good.sum() >= 2:
        slope, intercept = np.polyfit(np.log(n[good]), np.log(mean[good]), 1)
    else:
        slope = intercept = math.nan
    return ScalingSummary(n, mean, std, counted, trials - counted, trials, float(delta), float(slope), float(intercept))
