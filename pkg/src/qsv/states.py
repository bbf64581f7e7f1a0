"""Target states cos(t)|01> - sin(t)|10> and noisy i.i.d. sources around them."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .linalg import (
    I4,
    dagger,
    frozen,
    kron,
    outer,
    require_density,
    trace_product,
)

SOURCE_KINDS = ("pure", "werner", "rotated", "custom")


@dataclass(frozen=True)
class TargetState:
    """Pure two-qubit target parameterized by the angle ``theta`` (radians)."""

    theta: float
    ket: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.theta) or not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        v = np.zeros(4, dtype=complex)
        v[1] = math.cos(self.theta)
        v[2] = -math.sin(self.theta)
        object.__setattr__(self, "ket", frozen(v))

    @property
    def degrees(self) -> float:
        return math.degrees(self.theta)

    @property
    def density(self) -> np.ndarray:
        return outer(self.ket)


def make_target(theta: float) -> TargetState:
    return TargetState(float(theta))


def target_from_degrees(degrees: float) -> TargetState:
    return TargetState(math.radians(degrees))


def euler_unitary(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Single-qubit Rz(alpha) Ry(beta) Rz(gamma), angles in radians."""

    def rz(a):
        return np.array([[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]])

    ry = np.array(
        [[math.cos(beta / 2), -math.sin(beta / 2)], [math.sin(beta / 2), math.cos(beta / 2)]],
        dtype=complex,
    )
    return rz(alpha) @ ry @ rz(gamma)


@dataclass(frozen=True)
class SourceModel:
    """An i.i.d. source emitting the same density matrix on every round.

    Use the ``pure``, ``werner``, ``rotated`` and ``custom`` constructors.
    Rotation angles are Euler (z, y, z) triples in radians, one per arm.
    """

    kind: str
    target: TargetState
    p: float = 0.0
    alice: tuple[float, float, float] = (0.0, 0.0, 0.0)
    bob: tuple[float, float, float] = (0.0, 0.0, 0.0)
    matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}; expected one of {SOURCE_KINDS}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"Werner mixing weight must lie in [0, 1], got {self.p!r}")
        if len(self.alice) != 3 or len(self.bob) != 3:
            raise ValueError("rotations need three Euler angles per arm")
        if self.kind == "custom":
            if self.matrix is None:
                raise ValueError("custom source needs an explicit density matrix")
            rho = require_density(self.matrix, "custom source matrix")
            object.__setattr__(self, "matrix", frozen(rho))

    @classmethod
    def pure(cls, target: TargetState) -> SourceModel:
        return cls("pure", target)

    @classmethod
    def werner(cls, target: TargetState, p: float) -> SourceModel:
        return cls("werner", target, p=float(p))

    @classmethod
    def rotated(cls, target: TargetState, alice, bob) -> SourceModel:
        return cls("rotated", target, alice=tuple(map(float, alice)), bob=tuple(map(float, bob)))

    @classmethod
    def custom(cls, target: TargetState, matrix) -> SourceModel:
        return cls("custom", target, matrix=np.asarray(matrix, dtype=complex))


def emit(source: SourceModel) -> np.ndarray:
    """The density matrix produced by ``source`` on each round."""
    psi = source.target.density
    if source.kind == "pure":
        return psi
    if source.kind == "werner":
        return (1.0 - source.p) * psi + source.p * I4 / 4.0
    if source.kind == "rotated":
        u = kron(euler_unitary(*source.alice), euler_unitary(*source.bob))
        return u @ psi @ dagger(u)
    return np.array(source.matrix)


def fidelity(state, target: TargetState) -> float:
    """<psi|state|psi>, clipped to [0, 1] against rounding."""
    psi = target.ket
    value = np.vdot(psi, np.asarray(state, dtype=complex) @ psi).real
    return float(min(1.0, max(0.0, value)))


def werner_fidelity(p: float) -> float:
    return 1.0 - 0.75 * p


def density_to_json(rho) -> list:
    """4x4 complex array as nested [re, im] pairs, row-major."""
    rho = np.asarray(rho, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in rho]


def density_from_json(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"density matrix must be a 4x4 array of [re, im] pairs: {exc}") from None
    if arr.shape != (4, 4, 2):
        raise ValueError(f"density matrix must be a 4x4 array of [re, im] pairs, got shape {arr.shape}")
    return require_density(arr[..., 0] + 1j * arr[..., 1], "density matrix")


def load_density(path) -> np.ndarray:
    with open(Path(path)) as fh:
        return density_from_json(json.load(fh))


def state_probability(projector, state) -> float:
    """tr(P rho) for a Hermitian P and density rho, as a real number."""
    return trace_product(projector, state).real
