"""Dense Hermitian linear algebra, state distances and special functions."""

import math
from typing import NamedTuple

import numpy as np
from scipy import special

HERMITIAN_ATOL = 1e-12
PSD_RTOL = 1e-10
SUPPORT_CUTOFF = 1e-12
# eigenvalues below this fraction of the largest are roundoff for fidelity purposes
RANK_RTOL = 1e-13


class EigenDecomposition(NamedTuple):
    """Ascending real eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``m`` as a square complex array, symmetrized.

    The Hermiticity check is scaled by the largest entry magnitude so that
    generators with large entries (tens to hundreds) are judged fairly.

    Raises:
        ValueError: if ``m`` is not square or deviates from its adjoint by
            more than ``atol`` (relative to the entry scale).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > atol * scale:
        raise ValueError(
            f"matrix is not Hermitian: max |m - m^H| = {dev:.3e} "
            f"exceeds tolerance {atol * scale:.1e}"
        )
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_hermitian(m)
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(w, v)


def _clamped_spectrum(m) -> EigenDecomposition:
    w, v = eig_hermitian(m)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    tol = PSD_RTOL * max(scale, np.finfo(float).tiny)
    if w.size and w[0] < -tol:
        raise ValueError(
            f"matrix is not positive semidefinite: smallest eigenvalue {w[0]:.3e} "
            f"below tolerance -{tol:.1e}"
        )
    return EigenDecomposition(np.clip(w, 0.0, None), v)


def matrix_sqrt_psd(m, rank_rtol: float = 0.0) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``(-1e-10 * max|λ|, 0)`` are roundoff and get clamped to
    zero; anything more negative is rejected.

    Args:
        m: Hermitian PSD matrix.
        rank_rtol: eigenvalues below ``rank_rtol * max λ`` are also zeroed.
            A rank-deficient input carries eigenvalues of order 1e-16 whose
            square roots (1e-8) would otherwise leak into the result.
    """
    w, v = _clamped_spectrum(m)
    if rank_rtol and w.size:
        w = np.where(w < rank_rtol * w[-1], 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def _check_same_shape(rho, tau):
    rho = np.asarray(rho, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    if rho.shape != tau.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {tau.shape}")
    return rho, tau


def fidelity(rho, tau) -> float:
    """Uhlmann fidelity ``[Tr sqrt(sqrt(rho) tau sqrt(rho))]^2``.

    Evaluated as the squared nuclear norm of ``sqrt(rho) @ sqrt(tau)``, which
    is the same quantity but avoids a nested square root.

    Args:
        rho: density matrix.
        tau: density matrix of the same dimension.

    Returns:
        float in ``[0, 1]``.
    """
    rho, tau = _check_same_shape(rho, tau)
    s = np.linalg.svd(matrix_sqrt_psd(rho, RANK_RTOL) @ matrix_sqrt_psd(tau, RANK_RTOL), compute_uv=False)
    return float(min(1.0, max(0.0, np.sum(s) ** 2)))


def fidelity_nested(rho, tau) -> float:
    """Fidelity straight from the nested-square-root definition.

    Slower and slightly less accurate than :func:`fidelity`; kept as an
    independent cross-check.
    """
    rho, tau = _check_same_shape(rho, tau)
    sr = matrix_sqrt_psd(rho)
    inner = sr @ tau @ sr
    return float(np.real(np.trace(matrix_sqrt_psd(inner))) ** 2)


def bures_distance(rho, tau) -> float:
    """``2 - 2 sqrt(F(rho, tau))``, in ``[0, 2]``."""
    return 2.0 - 2.0 * math.sqrt(fidelity(rho, tau))


def relative_entropy(rho, tau) -> float:
    """Quantum relative entropy ``Tr rho ln rho - Tr rho ln tau`` in nats.

    Returns ``math.inf`` when the support of ``rho`` is not contained in the
    support of ``tau``, i.e. ``rho`` puts weight above ``1e-12`` on an
    eigenvector of ``tau`` whose eigenvalue is below ``1e-12``.
    """
    rho, tau = _check_same_shape(rho, tau)
    lam, psi = _clamped_spectrum(rho)
    mu, phi = _clamped_spectrum(tau)

    keep = lam > SUPPORT_CUTOFF
    neg_entropy = float(np.sum(lam[keep] * np.log(lam[keep])))

    # weight of rho on each eigenvector of tau
    overlap = np.abs(psi.conj().T @ phi) ** 2
    weight = lam @ overlap
    null = mu <= SUPPORT_CUTOFF
    if np.any(weight[null] > SUPPORT_CUTOFF):
        return math.inf
    cross = float(np.sum(weight[~null] * np.log(mu[~null])))
    return max(0.0, neg_entropy - cross)


def erfc(x: float) -> float:
    """Complementary error function."""
    return float(special.erfc(x))
