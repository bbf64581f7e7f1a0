"""Verification strategies: weighted binary tests whose average Omega has the
target as its unique top eigenvector.

Every constructor runs a spectral self-check (weights normalized, projectors
idempotent, Omega|psi> = |psi>, second eigenvalue equal to 1 - f) and raises
:class:`StrategyError` with the residuals if any of them fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jones
from .jones import NOT_BOTH_TRANSMITTED, Waveplates
from .linalg import (
    I4,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    frozen,
    hermitian_eigensystem,
    is_projector,
    kron,
    kron_ket,
    outer,
)
from .states import TargetState

WEIGHT_TOL = 1e-12
PROJECTOR_TOL = 1e-10
SPECTRAL_TOL = 1e-8
TABLE_TOL = 1e-6

STRATEGY_CHOICES = ("auto", "singlet", "partial", "product", "global")


class StrategyError(ValueError):
    """A constructed strategy failed its spectral self-check."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass(frozen=True)
class MeasurementSetting:
    accept_projector: np.ndarray = field(repr=False, compare=False)
    weight: float
    label: str
    waveplates: Waveplates | None = None

    def __post_init__(self):
        if not is_projector(self.accept_projector, PROJECTOR_TOL):
            raise StrategyError(f"accept projector of setting {self.label!r} is not a projector")
        if not 0.0 < self.weight <= 1.0:
            raise StrategyError(f"weight of setting {self.label!r} must lie in (0, 1], got {self.weight!r}")
        object.__setattr__(self, "accept_projector", frozen(self.accept_projector))


@dataclass(frozen=True)
class Strategy:
    name: str
    target: TargetState
    settings: tuple[MeasurementSetting, ...]
    f: float
    residuals: dict = field(default_factory=dict, compare=False)

    @property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.settings])

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.settings]

    @property
    def penalty(self) -> float:
        return 1.0 / self.f


def omega(strategy: Strategy) -> np.ndarray:
    """Weighted sum of the accept projectors."""
    out = np.zeros((4, 4), dtype=complex)
    for s in strategy.settings:
        out += s.weight * s.accept_projector
    return out


def spectrum(strategy: Strategy) -> np.ndarray:
    return np.array([lam for lam, _ in hermitian_eigensystem(omega(strategy))])


def self_check_residuals(strategy: Strategy) -> dict:
    om = omega(strategy)
    psi = strategy.target.ket
    eig = [lam for lam, _ in hermitian_eigensystem(om)]
    return {
        "weight_sum": abs(float(np.sum(strategy.weights)) - 1.0),
        "projector": max(
            float(np.max(np.abs(s.accept_projector @ s.accept_projector - s.accept_projector)))
            for s in strategy.settings
        ),
        "target_eigenvector": float(np.max(np.abs(om @ psi - psi))),
        "top_eigenvalue": abs(eig[0] - 1.0),
        "second_eigenvalue": abs(eig[1] - (1.0 - strategy.f)),
        "min_eigenvalue": eig[-1],
    }


def _checked(name, target, settings, f) -> Strategy:
    strategy = Strategy(name, target, tuple(settings), float(f))
    r = self_check_residuals(strategy)
    failures = []
    if r["weight_sum"] > WEIGHT_TOL:
        failures.append(f"weights sum off by {r['weight_sum']:.3e}")
    if r["projector"] > PROJECTOR_TOL:
        failures.append(f"projector residual {r['projector']:.3e}")
    if r["target_eigenvector"] > SPECTRAL_TOL or r["top_eigenvalue"] > SPECTRAL_TOL:
        failures.append(f"target is not the top eigenvector (residual {r['target_eigenvector']:.3e})")
    if r["second_eigenvalue"] > SPECTRAL_TOL:
        failures.append(f"second eigenvalue differs from 1 - f by {r['second_eigenvalue']:.3e}")
    if r["min_eigenvalue"] < -1e-12:
        failures.append(f"negative eigenvalue {r['min_eigenvalue']:.3e}")
    if failures:
        raise StrategyError(f"{name} strategy failed its self-check: " + "; ".join(failures), r)
    object.__setattr__(strategy, "residuals", r)
    return strategy


def global_strategy(target: TargetState) -> Strategy:
    """Project onto the target itself; requires an entangled measurement in general."""
    setting = MeasurementSetting(outer(target.ket), 1.0, "target")
    return _checked("global", target, [setting], 1.0)


def pauli_minus(pauli: np.ndarray) -> np.ndarray:
    """Projector onto the -1 eigenspace of pauli (x) pauli."""
    return (I4 - kron(pauli, pauli)) / 2


def singlet_strategy() -> Strategy:
    target = TargetState(math.pi / 4)
    settings = [
        MeasurementSetting(pauli_minus(PAULI_X), 1 / 3, "XX", Waveplates(*jones.XX_SYMMETRIC)),
        MeasurementSetting(pauli_minus(PAULI_Y), 1 / 3, "YY", Waveplates(*jones.TABLE_ANGLES["YY"])),
        MeasurementSetting(pauli_minus(PAULI_Z), 1 / 3, "ZZ", Waveplates(*jones.TABLE_ANGLES["ZZ"])),
    ]
    return _checked("singlet", target, settings, 2 / 3)


def partial_efficiency(theta: float) -> float:
    return 1.0 / (2.0 + math.sin(theta) * math.cos(theta))


def partial_weights(theta: float) -> tuple[float, float]:
    """(weight of the ZZ test, weight of each of the three product tests)."""
    s = math.sin(2 * theta)
    return (2 - s) / (4 + s), 2 * (1 + s) / (3 * (4 + s))


def product_factors(theta: float, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Alice and Bob factors of the k-th product state orthogonal to the target.

    Amplitude products u0*v1 and u1*v0 are chosen so that
    u0*v1*cos(theta) == u1*v0*sin(theta).
    """
    phase = np.exp(2j * math.pi * k / 3)
    t = math.tan(theta)
    a = np.array([1 / math.sqrt(1 + 1 / t), phase / math.sqrt(1 + t)])
    b = np.array([1 / math.sqrt(1 + t), phase / math.sqrt(1 + 1 / t)])
    return a, b


def partial_strategy(theta: float) -> Strategy:
    if not 0.0 < theta < math.pi / 2:
        raise ValueError(f"partial strategy needs theta in (0, pi/2), got {theta!r}")
    if abs(theta - math.pi / 4) < 1e-12:
        raise ValueError("theta = pi/4 is the singlet; use singlet_strategy()")
    target = TargetState(theta)
    w_zz, w_phi = partial_weights(theta)
    annotate = abs(math.degrees(theta) - jones.TABLE_THETA_DEGREES) < 1e-9

    settings = [
        MeasurementSetting(
            pauli_minus(PAULI_Z), w_zz, "ZZ", Waveplates(*jones.TABLE_ANGLES["ZZ"])
        )
    ]
    for k in (1, 2, 3):
        phi = kron_ket(*product_factors(theta, k))
        label = f"phi{k}"
        plates = None
        if annotate:
            plates = Waveplates(*jones.TABLE_ANGLES[label], accept=NOT_BOTH_TRANSMITTED)
        settings.append(MeasurementSetting(I4 - outer(phi), w_phi, label, plates))
    return _checked("partial", target, settings, partial_efficiency(theta))


def product_strategy(theta: float = 0.0) -> Strategy:
    """Locally optimal strategy for the product targets |01> and -|10>."""
    if theta == 0.0:
        label, outcome = "01", (0, 1)
        proj = kron(np.diag([1, 0]), np.diag([0, 1]))
    elif abs(theta - math.pi / 2) < 1e-12:
        label, outcome = "10", (1, 0)
        proj = kron(np.diag([0, 1]), np.diag([1, 0]))
        theta = math.pi / 2
    else:
        raise ValueError(f"product strategy needs theta = 0 or pi/2, got {theta!r}")
    plates = Waveplates(0.0, 0.0, 0.0, 0.0, accept=frozenset({outcome}))
    setting = MeasurementSetting(proj.astype(complex), 1.0, label, plates)
    return _checked("product", TargetState(theta), [setting], 1.0)


def build_strategy(theta_degrees: float, choice: str = "auto") -> Strategy:
    """Strategy by name; "auto" picks singlet at 45 deg, product at 0/90 deg, partial otherwise."""
    if choice not in STRATEGY_CHOICES:
        raise ValueError(f"unknown strategy {choice!r}; expected one of {STRATEGY_CHOICES}")
    if not math.isfinite(theta_degrees) or not 0.0 <= theta_degrees <= 90.0:
        raise ValueError(f"theta must lie in [0, 90] degrees, got {theta_degrees!r}")
    if choice == "auto":
        if theta_degrees == 45.0:
            choice = "singlet"
        elif theta_degrees in (0.0, 90.0):
            choice = "product"
        else:
            choice = "partial"
    theta = math.radians(theta_degrees)
    if choice == "global":
        return global_strategy(TargetState(theta))
    if choice == "singlet":
        if theta_degrees != 45.0:
            raise ValueError("the singlet strategy only verifies theta = 45 deg")
        return singlet_strategy()
    if choice == "product":
        return product_strategy(math.pi / 2 if theta_degrees == 90.0 else theta)
    return partial_strategy(theta)


@dataclass(frozen=True)
class TableRow:
    label: str
    waveplates: Waveplates
    realized: np.ndarray = field(repr=False)
    intended: np.ndarray = field(repr=False)
    deviation: float
    flagged: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "waveplates": self.waveplates.as_dict(),
            "max_deviation": self.deviation,
            "flagged": self.flagged,
            "note": self.note,
        }


def _row(label, plates, intended, note="") -> TableRow:
    realized = plates.realized_projector()
    dev = float(np.max(np.abs(realized - intended)))
    return TableRow(label, plates, realized, np.array(intended), dev, dev > TABLE_TOL, note)


def check_table(strategy: Strategy) -> list[TableRow]:
    """Compare each setting's wave-plate realization with its accept projector.

    Projectors carry no global phase, so the entrywise deviation is already
    phase independent. The XX setting is also checked against the printed
    4 deg reading of Bob's quarter-wave plate.
    """
    missing = [s.label for s in strategy.settings if s.waveplates is None]
    if missing:
        raise ValueError(f"settings without wave-plate annotations: {', '.join(missing)}")
    rows = []
    for s in strategy.settings:
        rows.append(_row(s.label, s.waveplates, s.accept_projector))
        if s.label == "XX":
            printed = Waveplates(*jones.TABLE_ANGLES["XX"], accept=s.waveplates.accept)
            rows.append(_row("XX (printed Bob QWP 4 deg)", printed, s.accept_projector,
                             "reported only; the symmetric 45 deg reading is the one checked"))
    return rows


def table_report(strategy: Strategy) -> dict:
    return {
        "convention": (
            "retarder = R(-a) diag(1, exp(-i*g)) R(a), R(a) = [[cos a, sin a], [-sin a, cos a]]; "
            "light passes QWP, HWP, then a PBS transmitting H; outcome 0 = transmitted"
        ),
        "tolerance": TABLE_TOL,
        "rows": [row.as_dict() for row in check_table(strategy)],
    }


def strategy_to_dict(strategy: Strategy) -> dict:
    def mat(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]

    return {
        "name": strategy.name,
        "theta_degrees": strategy.target.degrees,
        "f": strategy.f,
        "penalty": strategy.penalty,
        "settings": [
            {
                "label": s.label,
                "weight": s.weight,
                "accept_projector": mat(s.accept_projector),
                "waveplates": None if s.waveplates is None else s.waveplates.as_dict(),
            }
            for s in strategy.settings
        ],
        "omega_eigenvalues": [float(x) for x in spectrum(strategy)],
        "self_check": dict(strategy.residuals),
    }

