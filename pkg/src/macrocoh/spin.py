"""Permutation-symmetric N-spin states in the Dicke basis.

Dicke index ``k`` counts spins in ``|1>``; the collective magnetization
``sum_i s_z^(i)`` has eigenvalue ``(n - 2k) / 2`` on ``|n, k>``.  Everything
lives in the ``n + 1`` dimensional symmetric subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from . import numerics
from .core import DensityMatrix, ObservableSpectrum


@dataclass(frozen=True)
class SpinEnsemble:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"number of spins must be a positive integer, got {self.n!r}")

    @property
    def dim(self) -> int:
        return self.n + 1

    @cached_property
    def magnetization(self) -> np.ndarray:
        k = np.arange(self.n + 1)
        return (self.n - 2 * k) / 2.0

    @cached_property
    def spectrum(self) -> ObservableSpectrum:
        return ObservableSpectrum(self.magnetization, label=f"magnetization N={self.n}")

    @cached_property
    def excitation_raising(self) -> np.ndarray:
        """Collective ladder operator mapping ``|n,k>`` to ``|n,k+1>``.

        Matrix element ``sqrt((j + m)(j - m + 1))`` with ``j = n/2``,
        ``m = (n - 2k)/2``; this is the standard spin lowering operator.
        """
        j = self.n / 2.0
        m = self.magnetization[:-1]
        k = np.arange(self.n)
        op = np.zeros((self.dim, self.dim))
        op[k + 1, k] = np.sqrt((j + m) * (j - m + 1))
        return op


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _ensemble(ens) -> SpinEnsemble:
    return ens if isinstance(ens, SpinEnsemble) else SpinEnsemble(int(ens))


def product_state(ens: SpinEnsemble, theta: float) -> np.ndarray:
    """``(cos θ |0> + sin θ |1>)^{⊗n}`` projected on the Dicke basis.

    Amplitudes ``sqrt(C(n,k)) cos^{n-k}θ sin^kθ`` are formed in log space so
    that large ``n`` does not overflow.
    """
    ens = _ensemble(ens)
    n = ens.n
    k = np.arange(n + 1)
    c, s = math.cos(theta), math.sin(theta)
    amp = np.zeros(n + 1)
    # handle exact zeros of cos/sin without log(0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = 0.5 * _log_binom(n, k) + (n - k) * np.log(abs(c)) + k * np.log(abs(s))
    finite = np.isfinite(log_mag)
    sign = np.sign(c) ** (n - k) * np.sign(s) ** k
    amp[finite] = sign[finite] * np.exp(log_mag[finite])
    if c == 0:
        amp[:] = 0.0
        amp[n] = np.sign(s) ** n
    elif s == 0:
        amp[:] = 0.0
        amp[0] = np.sign(c) ** n
    return amp.astype(complex)


def ghz_state(ens: SpinEnsemble) -> np.ndarray:
    ens = _ensemble(ens)
    amp = np.zeros(ens.dim, dtype=complex)
    amp[0] = amp[-1] = 1.0 / math.sqrt(2.0)
    return amp


def dicke_state(ens: SpinEnsemble, k: int) -> np.ndarray:
    ens = _ensemble(ens)
    if not 0 <= k <= ens.n:
        raise ValueError(f"Dicke index must lie in [0, {ens.n}], got {k}")
    amp = np.zeros(ens.dim, dtype=complex)
    amp[k] = 1.0
    return amp


def rotation(ens: SpinEnsemble, theta: float, phi: float = 0.0) -> np.ndarray:
    """Collective rotation ``exp(ξ E+ - ξ* E-)`` with ``ξ = θ e^{iφ} / 2``.

    ``E+`` raises the excitation number.  For ``φ = 0`` this equals
    ``exp(-i θ J_y)``, a rotation by angle ``θ``.  The exponential is taken
    through the eigendecomposition of the Hermitian matrix ``i G``.
    """
    ens = _ensemble(ens)
    xi = 0.5 * theta * complex(math.cos(phi), math.sin(phi))
    up = ens.excitation_raising
    gen = xi * up - np.conj(xi) * up.T
    w, v = numerics.eig_hermitian(1j * gen)
    return (v * np.exp(-1j * w)) @ v.conj().T


def rotated_dicke(ens: SpinEnsemble, k: int, theta: float, phi: float = 0.0) -> np.ndarray:
    ens = _ensemble(ens)
    return rotation(ens, theta, phi) @ dicke_state(ens, k)


def decohered_ghz(ens: SpinEnsemble, gamma: float) -> DensityMatrix:
    """GHZ state with its coherence scaled by ``gamma`` in ``[0, 1]``."""
    ens = _ensemble(ens)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    rho = np.zeros((ens.dim, ens.dim), dtype=complex)
    rho[0, 0] = rho[-1, -1] = 0.5
    rho[0, -1] = rho[-1, 0] = 0.5 * gamma
    return DensityMatrix(rho, ens.spectrum)
