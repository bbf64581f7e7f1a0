import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsv.linalg import (
    I2,
    I4,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SWAP,
    ConvergenceError,
    hermitian_eigensystem,
    is_projector,
    kron,
    require_density,
    trace_product,
)
from qsv import linalg

from conftest import random_density


def test_kron_identity():
    np.testing.assert_array_equal(kron(I2, I2), I4)


def test_kron_zz_is_diagonal():
    np.testing.assert_array_equal(kron(PAULI_Z, PAULI_Z), np.diag([1, -1, -1, 1]))


def test_kron_xx_hand_expanded():
    # X (x) X maps |ab> -> |(1-a)(1-b)>: 00<->11, 01<->10
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[1, 2] = expected[2, 1] = expected[3, 0] = 1
    np.testing.assert_array_equal(kron(PAULI_X, PAULI_X), expected)


def test_kron_matches_alice_first_ordering():
    ket0, ket1 = np.diag([1, 0]), np.diag([0, 1])
    # |0><0| (x) |1><1| projects on |01>, the second basis vector
    np.testing.assert_array_equal(kron(ket0, ket1), np.diag([0, 1, 0, 0]))


def test_kron_rejects_wrong_shapes():
    with pytest.raises(ValueError):
        kron(I4, I2)


def test_kron_bilinear(rng):
    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        alpha = complex(*rng.normal(size=2))
        np.testing.assert_allclose(kron(alpha * a, b), alpha * kron(a, b), atol=1e-14)
        np.testing.assert_allclose(kron(a, alpha * b), alpha * kron(a, b), atol=1e-14)
        np.testing.assert_allclose(kron(a, b), np.kron(a, b), atol=1e-14)


def _values(m):
    return [lam for lam, _ in hermitian_eigensystem(m)]


def test_eigensystem_diagonal():
    np.testing.assert_allclose(_values(np.diag([0, 1, 1, 0])), [1, 1, 0, 0], atol=1e-14)


def test_eigensystem_pauli_projector_against_characteristic_polynomial():
    m = (I4 - kron(PAULI_X, PAULI_X)) / 2
    # brute-force oracle: roots of det(lambda I - M)
    oracle = np.sort(np.roots(np.poly(m)).real)[::-1]
    np.testing.assert_allclose(oracle, [1, 1, 0, 0], atol=1e-7)
    np.testing.assert_allclose(_values(m), [1, 1, 0, 0], atol=1e-12)


def test_eigensystem_singlet_omega():
    # (2I - SWAP)/3 from SWAP = (I + XX + YY + ZZ)/2
    paulis = [kron(p, p) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
    np.testing.assert_allclose(SWAP, (I4 + sum(paulis)) / 2, atol=1e-15)
    omega = (2 * I4 - SWAP) / 3
    np.testing.assert_allclose(_values(omega), [1, 1 / 3, 1 / 3, 1 / 3], atol=1e-12)


def test_eigensystem_random_hermitian_against_numpy(rng):
    for _ in range(200):
        n = rng.choice([2, 4])
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = a + a.conj().T
        pairs = hermitian_eigensystem(h)
        values = [lam for lam, _ in pairs]
        np.testing.assert_allclose(values, np.linalg.eigvalsh(h)[::-1], atol=1e-10)
        assert values == sorted(values, reverse=True)
        vecs = np.array([v for _, v in pairs]).T
        for lam, v in pairs:
            assert np.max(np.abs(h @ v - lam * v)) < 1e-10
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(n), atol=1e-10)
        recon = sum(lam * np.outer(v, v.conj()) for lam, v in pairs)
        assert np.max(np.abs(recon - h)) < 1e-9


def test_eigensystem_projector_eigenvalues_are_zero_or_one(rng):
    for _ in range(50):
        v = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        q, _ = np.linalg.qr(v)
        p = q @ q.conj().T
        assert is_projector(p)
        for lam in _values(p):
            assert min(abs(lam), abs(lam - 1)) < 1e-10


def test_eigensystem_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        hermitian_eigensystem(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eigensystem_reports_convergence_failure(monkeypatch):
    monkeypatch.setattr(linalg, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError) as info:
        hermitian_eigensystem(PAULI_X)
    assert info.value.residual > 0


def test_trace_product_examples(rng):
    rho = random_density(rng)
    assert trace_product(I4, rho) == pytest.approx(1.0, abs=1e-12)
    ket01 = np.diag([0, 1, 0, 0]).astype(complex)
    assert trace_product(np.diag([0, 1, 1, 0]), ket01) == pytest.approx(1.0)
    omega = (2 * I4 - SWAP) / 3
    assert trace_product(omega, I4 / 4) == pytest.approx(0.5, abs=1e-15)


def test_trace_product_imaginary_part_vanishes(rng):
    for _ in range(50):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = a + a.conj().T
        assert abs(trace_product(h, random_density(rng)).imag) <= 1e-12


def test_trace_product_dimension_mismatch():
    with pytest.raises(ValueError):
        trace_product(I2, I4)


def test_require_density():
    require_density(I4 / 4)
    with pytest.raises(ValueError, match="trace"):
        require_density(I4)
    with pytest.raises(ValueError, match="negative"):
        require_density(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(ValueError, match="non-finite"):
        require_density(np.full((4, 4), np.nan))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=16, max_size=16))
def test_eigensystem_real_symmetric_property(entries):
    a = np.array(entries).reshape(4, 4)
    h = (a + a.T).astype(complex)
    np.testing.assert_allclose(_values(h), np.linalg.eigvalsh(h)[::-1], atol=1e-9)
