"""Jones-calculus model of one measurement arm: QWP -> HWP -> PBS.

Convention (the one under which the Pauli rows of the wave-plate table
reproduce their projectors):

* a retarder with retardance ``g`` and fast axis at angle ``a`` is
  ``R(-a) @ diag(1, exp(-1j*g)) @ R(a)`` with ``R(a) = [[cos a, sin a], [-sin a, cos a]]``;
* light meets the quarter-wave plate first, then the half-wave plate, then
  a PBS whose transmitted port is H = |0>;
* outcome 0 means "transmitted", outcome 1 "reflected". The transmitted
  state in the lab basis is therefore ``(HWP @ QWP)^dagger |H>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import dagger, kron, outer

OPPOSITE = frozenset({(0, 1), (1, 0)})


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]], dtype=complex)


def retarder(retardance: float, angle: float) -> np.ndarray:
    return rotation(-angle) @ np.diag([1.0, np.exp(-1j * retardance)]) @ rotation(angle)


def quarter_wave(angle: float) -> np.ndarray:
    return retarder(math.pi / 2, angle)


def half_wave(angle: float) -> np.ndarray:
    return retarder(math.pi, angle)


def projector_from_waveplates(qwp: float, hwp: float) -> np.ndarray:
    """Single-arm state sent to the transmitted PBS port; angles in degrees."""
    if not (math.isfinite(qwp) and math.isfinite(hwp)):
        raise ValueError("wave-plate angles must be finite")
    u = half_wave(math.radians(hwp)) @ quarter_wave(math.radians(qwp))
    state = dagger(u) @ np.array([1.0, 0.0], dtype=complex)
    return state / np.linalg.norm(state)


def arm_projectors(qwp: float, hwp: float) -> tuple[np.ndarray, np.ndarray]:
    """Projectors for outcomes 0 (transmitted) and 1 (reflected)."""
    p0 = outer(projector_from_waveplates(qwp, hwp))
    return p0, np.eye(2, dtype=complex) - p0


@dataclass(frozen=True)
class Waveplates:
    """Per-arm plate angles (degrees) and the joint outcomes counted as accept."""

    qwp_a: float
    hwp_a: float
    qwp_b: float
    hwp_b: float
    accept: frozenset = OPPOSITE

    def realized_projector(self) -> np.ndarray:
        alice = arm_projectors(self.qwp_a, self.hwp_a)
        bob = arm_projectors(self.qwp_b, self.hwp_b)
        return sum(kron(alice[a], bob[b]) for a, b in sorted(self.accept))

    def as_dict(self) -> dict:
        return {
            "qwp_alice": self.qwp_a,
            "hwp_alice": self.hwp_a,
            "qwp_bob": self.qwp_b,
            "hwp_bob": self.hwp_b,
            "accept_outcomes": [list(pair) for pair in sorted(self.accept)],
        }


NOT_BOTH_TRANSMITTED = frozenset({(0, 1), (1, 0), (1, 1)})

# Wave-plate table for the singlet settings and the theta = 30 deg product
# settings, as printed. Bob's XX quarter-wave plate is printed as 4 deg.
TABLE_ANGLES = {
    "XX": (45.0, 22.5, 4.0, 22.5),
    "YY": (0.0, 67.5, 0.0, 67.5),
    "ZZ": (0.0, 0.0, 0.0, 0.0),
    "phi1": (30.1564, 45.9801, 59.8436, 60.8237),
    "phi2": (30.1564, 74.1763, 59.8436, 89.0199),
    "phi3": (52.9551, 26.4774, 37.0449, 18.5226),
}
# Symmetric reading of the XX column (Bob's QWP at 45 deg).
XX_SYMMETRIC = (45.0, 22.5, 45.0, 22.5)
TABLE_THETA_DEGREES = 30.0
