import math

import mpmath
import numpy as np
import pytest

from macrocoh import numerics
from macrocoh.sampling import apply_kraus, random_density_matrix, random_kraus, random_pure_state

from oracles import partial_trace_second


def test_eig_identity():
    w, v = numerics.eig_hermitian(np.eye(3))
    np.testing.assert_allclose(w, [1, 1, 1])
    np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_eig_diagonal_sorted():
    w, _ = numerics.eig_hermitian(np.diag([2.0, -1.0, 0.0]))
    np.testing.assert_allclose(w, [-1, 0, 2])


def test_eig_pauli_x():
    w, _ = numerics.eig_hermitian([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [-1, 1], atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        numerics.eig_hermitian([[0, 1], [0, 0]])


def test_eig_random_reconstruction():
    rng = np.random.default_rng(11)
    for _ in range(500):
        d = int(rng.integers(1, 17))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g + g.conj().T
        dec = numerics.eig_hermitian(m)
        assert np.linalg.norm(dec.reconstruct() - m) < 1e-10 * d
        v = dec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) < 1e-12


@pytest.mark.parametrize("m, expected", [
    (np.diag([4.0, 9.0]), np.diag([2.0, 3.0])),
    (np.eye(3), np.eye(3)),
    (0.5 * np.ones((2, 2)), 0.5 * np.ones((2, 2))),
])
def test_matrix_sqrt_examples(m, expected):
    np.testing.assert_allclose(numerics.matrix_sqrt_psd(m), expected, atol=1e-12)


def test_matrix_sqrt_squares_back():
    rng = np.random.default_rng(3)
    for _ in range(100):
        d = int(rng.integers(1, 10))
        rho = random_density_matrix(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        s = numerics.matrix_sqrt_psd(rho)
        assert np.linalg.norm(s @ s - rho) < 1e-9 * d


def test_matrix_sqrt_clamps_roundoff_and_rejects_negative():
    near = np.diag([1.0, -1e-13])
    np.testing.assert_allclose(numerics.matrix_sqrt_psd(near), np.diag([1.0, 0.0]))
    with pytest.raises(ValueError, match="positive semidefinite"):
        numerics.matrix_sqrt_psd(np.diag([1.0, -1e-6]))


def test_fidelity_examples():
    rho = random_density_matrix(4, seed=0)
    assert numerics.fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)
    zero, one = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert numerics.fidelity(zero, one) == pytest.approx(0.0, abs=1e-15)
    # pure second argument: F = <0|rho|0>
    assert numerics.fidelity(np.diag([0.5, 0.5]), zero) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_rejects_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        numerics.fidelity(np.eye(2) / 2, np.eye(3) / 3)


def test_fidelity_pure_overlap_symmetry_and_nested_form():
    rng = np.random.default_rng(5)
    for _ in range(100):
        d = int(rng.integers(2, 8))
        psi, phi = random_pure_state(d, rng), random_pure_state(d, rng)
        f = numerics.fidelity(np.outer(psi, psi.conj()), np.outer(phi, phi.conj()))
        assert f == pytest.approx(abs(np.vdot(psi, phi)) ** 2, abs=1e-9)
        rho, tau = random_density_matrix(d, seed=rng), random_density_matrix(d, seed=rng)
        assert abs(numerics.fidelity(rho, tau) - numerics.fidelity(tau, rho)) < 1e-9
        assert abs(numerics.fidelity(rho, tau) - numerics.fidelity_nested(rho, tau)) < 1e-9


def test_fidelity_monotone_under_partial_trace():
    rng = np.random.default_rng(7)
    for _ in range(200):
        rho, tau = random_density_matrix(4, seed=rng), random_density_matrix(4, seed=rng)
        f_full = numerics.fidelity(rho, tau)
        f_red = numerics.fidelity(partial_trace_second(rho, 2, 2), partial_trace_second(tau, 2, 2))
        assert 0.0 <= f_full <= 1.0
        assert f_red >= f_full - 1e-9


def test_bures_examples():
    rho = random_density_matrix(3, seed=1)
    assert numerics.bures_distance(rho, rho) == pytest.approx(0.0, abs=1e-7)
    assert numerics.bures_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(2.0)
    # F = 1/2
    assert numerics.bures_distance(np.diag([0.5, 0.5]), np.diag([1.0, 0])) == pytest.approx(
        2 - math.sqrt(2), abs=1e-12)
    assert 2 - math.sqrt(2) == pytest.approx(0.585786, abs=1e-6)


def test_bures_contractive_under_random_channels():
    rng = np.random.default_rng(9)
    for _ in range(200):
        d = int(rng.integers(2, 6))
        rho, tau = random_density_matrix(d, seed=rng), random_density_matrix(d, seed=rng)
        kraus = random_kraus(d, int(rng.integers(1, 4)), rng)
        before = numerics.bures_distance(rho, tau)
        after = numerics.bures_distance(apply_kraus(rho, kraus), apply_kraus(tau, kraus))
        assert after <= before + 1e-9


def test_relative_entropy_examples():
    rho = random_density_matrix(3, seed=2)
    assert numerics.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)
    assert numerics.relative_entropy(np.diag([1.0, 0]), np.diag([0.5, 0.5])) == pytest.approx(math.log(2))
    assert numerics.relative_entropy(np.diag([0.5, 0.5]), np.diag([1.0, 0])) == math.inf


def test_relative_entropy_nonnegative_and_matches_logm():
    from scipy.linalg import logm
    rng = np.random.default_rng(4)
    for _ in range(50):
        d = int(rng.integers(2, 6))
        rho, tau = random_density_matrix(d, seed=rng), random_density_matrix(d, seed=rng)
        s = numerics.relative_entropy(rho, tau)
        ref = np.trace(rho @ (logm(rho) - logm(tau))).real
        assert s >= 0
        assert s == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 0.3, 1.0, 2.5, 6.0, 12.0])
def test_erfc_against_mpmath(x):
    assert abs(numerics.erfc(x) - float(mpmath.erfc(x))) <= 1e-12


def test_erfc_examples():
    assert numerics.erfc(0.0) == 1.0
    assert 0 <= numerics.erfc(40.0) < 1e-300
    assert numerics.erfc(1.0) == pytest.approx(0.157299207, abs=1e-9)
