"""Skew information, quantum Fisher information and fidelity lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .core import (
    DensityMatrix,
    ObservableSpectrum,
    apply_channel,
    normalized_amplitudes,
)

FISHER_PAIR_CUTOFF = 1e-12


def _spectrum_of(rho, spectrum):
    if spectrum is None:
        spectrum = rho.spectrum
    elif not isinstance(spectrum, ObservableSpectrum):
        spectrum = ObservableSpectrum(spectrum)
    return spectrum


def skew_information(rho: DensityMatrix, spectrum: ObservableSpectrum | None = None) -> float:
    """Wigner-Yanase-Dyson skew information ``-1/2 Tr [sqrt(rho), A]^2``.

    Evaluated as ``1/2 sum_ij (a_i - a_j)^2 |sqrt(rho)_ij|^2``.
    """
    spectrum = _spectrum_of(rho, spectrum)
    sq = numerics.matrix_sqrt_psd(np.asarray(rho), numerics.RANK_RTOL)
    return float(0.5 * np.sum(spectrum.gap_matrix ** 2 * np.abs(sq) ** 2))


def fisher_information(rho: DensityMatrix, spectrum: ObservableSpectrum | None = None) -> float:
    """Quantum Fisher information of ``rho`` for rotations generated by ``A``.

    ``2 sum_{k != l} (λ_k - λ_l)^2 / (λ_k + λ_l) |<ψ_k|A|ψ_l>|^2`` over the
    eigendecomposition of ``rho``; pairs with ``λ_k + λ_l < 1e-12`` are
    skipped.
    """
    spectrum = _spectrum_of(rho, spectrum)
    lam, v = numerics.eig_hermitian(np.asarray(rho))
    lam = np.clip(lam, 0.0, None)
    a_eig = (v.conj().T * spectrum.eigenvalues) @ v
    lsum = lam[:, None] + lam[None, :]
    ldiff = lam[:, None] - lam[None, :]
    ok = lsum >= FISHER_PAIR_CUTOFF
    ratio = np.zeros_like(lsum)
    ratio[ok] = ldiff[ok] ** 2 / lsum[ok]
    return float(2.0 * np.sum(ratio * np.abs(a_eig) ** 2))


def variance(amplitudes, spectrum: ObservableSpectrum) -> float:
    """Variance of the observable in a pure state."""
    psi = normalized_amplitudes(amplitudes)
    if not isinstance(spectrum, ObservableSpectrum):
        spectrum = ObservableSpectrum(spectrum)
    p = np.abs(psi) ** 2
    a = spectrum.eigenvalues
    mean = p @ a
    return float(max(0.0, p @ (a - mean) ** 2))


def _check_sigma(sigma):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")


def bound_w(i_w: float, sigma: float) -> float:
    """Skew-information lower bound on ``sqrt(F)``: ``exp(-I_W / (4 sigma^2))``."""
    _check_sigma(sigma)
    return math.exp(-i_w / (4.0 * sigma ** 2))


def bound_w_pure(var: float, sigma: float) -> float:
    """Pure-state lower bound on ``sqrt(F)``: ``exp(-Var / (8 sigma^2))``."""
    _check_sigma(sigma)
    return math.exp(-var / (8.0 * sigma ** 2))


def bound_f(i_f: float, sigma: float) -> float:
    """Fisher-information lower bound on ``sqrt(F)``; negative when trivial.

    ``exp(-I_F / (32 sigma^2)) - erfc(sqrt(2) pi sigma / sqrt(I_F))``, taken
    as 1 at ``I_F = 0``.
    """
    _check_sigma(sigma)
    if i_f <= 0:
        return 1.0
    return math.exp(-i_f / (32.0 * sigma ** 2)) - numerics.erfc(
        math.sqrt(2.0) * math.pi * sigma / math.sqrt(i_f)
    )


def bound_f_ratio(r: float) -> float:
    """``bound_f`` as a function of ``r = I_F / sigma^2`` alone."""
    return bound_f(r, 1.0)


def bound_f_threshold(lo: float = 1.0, hi: float = 100.0, tol: float = 1e-12) -> float:
    """``I_F / sigma^2`` above which the Fisher bound turns negative (bisection)."""
    flo, fhi = bound_f_ratio(lo), bound_f_ratio(hi)
    if flo <= 0 or fhi >= 0:
        raise ValueError(f"root not bracketed by [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bound_f_ratio(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sandwich_check(rho: DensityMatrix, spectrum: ObservableSpectrum | None = None,
                   rtol: float = 1e-8) -> tuple[float, float, bool]:
    """Check ``4 I_W <= I_F <= 8 I_W`` up to ``rtol * (1 + I_F)``."""
    i_w = skew_information(rho, spectrum)
    i_f = fisher_information(rho, spectrum)
    tol = rtol * (1.0 + i_f)
    holds = (4.0 * i_w <= i_f + tol) and (i_f <= 8.0 * i_w + tol)
    return i_w, i_f, holds


@dataclass(frozen=True)
class BoundReport:
    sigma: float
    fidelity_sqrt: float
    bound_w: float
    bound_f: float
    i_w: float
    i_f: float
    variance: float | None = None

    @property
    def bound_pure(self) -> float | None:
        if self.variance is None:
            return None
        return bound_w_pure(self.variance, self.sigma)


def bound_report(rho: DensityMatrix, sigma: float, *, pure_amplitudes=None) -> BoundReport:
    """Exact ``sqrt(F(rho, Phi(rho)))`` next to both lower bounds."""
    _check_sigma(sigma)
    fs = math.sqrt(numerics.fidelity(rho, apply_channel(rho, sigma)))
    i_w = skew_information(rho)
    i_f = fisher_information(rho)
    var = None if pure_amplitudes is None else variance(pure_amplitudes, rho.spectrum)
    return BoundReport(sigma, fs, bound_w(i_w, sigma), bound_f(i_f, sigma), i_w, i_f, var)


def bound_crossings(sigmas, b_w, b_f) -> list[float]:
    """Sigma values where ``b_w - b_f`` changes sign, by linear interpolation in log sigma.

    Exact ties are not crossings by themselves; a run of ties between
    opposite signs reports the first tied sigma.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    diff = np.asarray(b_w, dtype=float) - np.asarray(b_f, dtype=float)
    nz = np.flatnonzero(diff)
    out = []
    for k, m in zip(nz[:-1], nz[1:]):
        if diff[k] * diff[m] > 0:
            continue
        if m > k + 1:
            out.append(float(sigmas[k + 1]))
            continue
        t = diff[k] / (diff[k] - diff[m])
        ls = np.log(sigmas[k]) + t * (np.log(sigmas[m]) - np.log(sigmas[k]))
        out.append(float(np.exp(ls)))
    return out
