"""Small dense complex linear algebra for qubit and two-qubit objects.

Matrices are plain ``numpy.ndarray`` of dtype complex128 with shape (2, 2)
or (4, 4). Kets are 1-d arrays of length 2 or 4 in the computational basis
order |0>,|1> and |00>,|01>,|10>,|11>, first tensor factor = Alice.
"""
from __future__ import annotations

import math

import numpy as np

HERMITIAN_TOL = 1e-12
PROJECTOR_TOL = 1e-10
DENSITY_TOL = 1e-10

JACOBI_THRESHOLD = 1e-14
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
for _m in (I2, I4, PAULI_X, PAULI_Y, PAULI_Z, SWAP):
    _m.flags.writeable = False


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweep cap is hit before the off-diagonal norm vanishes."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal norm {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite complex 2x2 or 4x4 array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise ValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_ket(v, name: str = "ket") -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.shape[0] not in (2, 4):
        raise ValueError(f"{name} must have length 2 or 4, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def outer(ket) -> np.ndarray:
    """|v><v|."""
    v = as_ket(ket)
    return np.outer(v, np.conj(v))


def normalize(ket) -> np.ndarray:
    v = as_ket(ket)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / norm


def kron(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit operators (Alice first)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 matrices, got {a.shape} and {b.shape}")
    out = np.empty((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = a[i, j] * b
    return out


def kron_ket(a, b) -> np.ndarray:
    a = as_ket(a)
    b = as_ket(b)
    if a.shape != (2,) or b.shape != (2,):
        raise ValueError("kron_ket expects two single-qubit kets")
    return np.array([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])


def trace_product(a, b) -> complex:
    """tr(a @ b) without forming the product."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.T))


def hermiticity_residual(m) -> float:
    a = as_matrix(m)
    return float(np.max(np.abs(a - dagger(a))))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_residual(m) <= tol


def is_projector(m, tol: float = PROJECTOR_TOL) -> bool:
    a = as_matrix(m)
    return (
        hermiticity_residual(a) <= tol
        and float(np.max(np.abs(a @ a - a))) <= tol
    )


def density_violation(m) -> str | None:
    """Return a description of the first failed density-matrix invariant, or None."""
    a = as_matrix(m, "density")
    herm = hermiticity_residual(a)
    if herm > DENSITY_TOL:
        return f"not Hermitian (max |M - M^dagger| = {herm:.3e})"
    tr = np.trace(a).real
    if abs(tr - 1.0) > DENSITY_TOL:
        return f"trace {tr!r} differs from 1"
    lowest = min(lam for lam, _ in hermitian_eigensystem((a + dagger(a)) / 2))
    if lowest < -DENSITY_TOL:
        return f"negative eigenvalue {lowest:.3e}"
    return None


def require_density(m, name: str = "density") -> np.ndarray:
    a = as_matrix(m, name)
    problem = density_violation(a)
    if problem is not None:
        raise ValueError(f"{name} is not a valid density matrix: {problem}")
    return a


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eigensystem(m) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(eigenvalue, eigenvector)`` pairs sorted by descending
    eigenvalue. Within a degenerate cluster the eigenvectors are an arbitrary
    orthonormal basis of the eigenspace.
    """
    a = as_matrix(m)
    herm = hermiticity_residual(a)
    if herm > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError(f"matrix is not Hermitian (max |M - M^dagger| = {herm:.3e})")
    a = (a + dagger(a)) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _off_diagonal_norm(a) > JACOBI_THRESHOLD * scale:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise ConvergenceError(_off_diagonal_norm(a), sweeps)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                # rotation zeroing the (p, q) element after removing its phase
                tau = float(a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[q, q] = c
                g[p, q] = s * phase
                g[q, p] = -s * np.conj(phase)
                a = dagger(g) @ a @ g
                a[p, q] = a[q, p] = 0.0
                v = v @ g

    values = np.diag(a).real
    order = np.argsort(-values, kind="stable")
    return [(float(values[i]), v[:, i].copy()) for i in order]


def eigenvalues(m) -> np.ndarray:
    return np.array([lam for lam, _ in hermitian_eigensystem(m)])
