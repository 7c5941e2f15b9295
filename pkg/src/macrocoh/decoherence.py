"""Decoherence from linear coupling ``g A (x) p_E`` to a Gaussian environment.

Tracing out an environment whose momentum distribution goes like
``exp(-mu^2 p^2)`` damps the ``delta`` mode by
``exp(-(g t)^2 delta^2 / (4 mu^2))``, the same as a coarse-grained
measurement with ``sigma = mu / (sqrt(2) g t)``.  hbar = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, DistanceMeasure, measure_M


@dataclass(frozen=True)
class CouplingParams:
    g: float
    t: float
    mu: float

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g!r}")
        if not self.mu > 0:
            raise ValueError(f"environment width mu must be positive, got {self.mu!r}")
        if not self.t >= 0:
            raise ValueError(f"time t must be non-negative, got {self.t!r}")

    @property
    def effective_sigma(self) -> float:
        """Equivalent measurement precision; infinite at ``t = 0``."""
        if self.t == 0:
            return math.inf
        return self.mu / (math.sqrt(2.0) * self.g * self.t)


@dataclass(frozen=True)
class ThermalBathParams:
    """Single-mode thermal oscillator bath coupled through its momentum."""

    beta: float
    omega: float
    g: float
    t: float

    def __post_init__(self):
        for name in ("beta", "omega", "g", "t"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")


def decohere(rho: DensityMatrix, p: CouplingParams) -> DensityMatrix:
    gt = p.g * p.t
    damp = np.exp(-(gt ** 2) * rho.spectrum.gap_matrix ** 2 / (4.0 * p.mu ** 2))
    return rho.with_data(np.asarray(rho) * damp, check=False)


def sigma_from_thermal(tb: ThermalBathParams) -> float:
    """``sigma`` solving ``2 sigma^2 = tanh(beta omega / 2) / (g t)^2``."""
    return math.sqrt(math.tanh(0.5 * tb.beta * tb.omega) / (2.0 * (tb.g * tb.t) ** 2))


def fragility(rho: DensityMatrix, p: CouplingParams, distance=DistanceMeasure.BURES) -> float:
    """Distance between the initial state and its decohered image."""
    d = distance if isinstance(distance, DistanceMeasure) else DistanceMeasure(distance)
    return d(rho, decohere(rho, p))


def fragility_via_measure(rho: DensityMatrix, p: CouplingParams, distance=DistanceMeasure.BURES) -> float:
    if p.t == 0:
        return 0.0
    return measure_M(rho, p.effective_sigma, distance)


def decohere_joint_unitary(rho: DensityMatrix, p: CouplingParams, env_points: int = 128,
                           env_extent: float | None = None) -> DensityMatrix:
    """Small-dimension oracle: evolve system plus environment, then trace out.

    The environment is a pure Gaussian wavepacket on a momentum grid with
    ``|<p|psi_E>|^2`` proportional to ``exp(-mu^2 p^2)``; the coupling
    ``exp(-i g t A (x) p_E)`` is diagonal in the product basis.
    """
    d = rho.dim
    if d * env_points > 1024:
        raise ValueError("joint-unitary oracle limited to system dim * env grid <= 1024")
    extent = 8.0 / p.mu if env_extent is None else env_extent
    pk = np.linspace(-extent, extent, env_points)
    env = np.exp(-0.5 * p.mu ** 2 * pk ** 2)
    env /= np.linalg.norm(env)
    joint = np.kron(np.asarray(rho), np.outer(env, env))
    phase = np.exp(-1j * p.g * p.t * np.outer(rho.spectrum.eigenvalues, pk)).ravel()
    joint = phase[:, None] * joint * phase.conj()[None, :]
    reduced = np.trace(joint.reshape(d, env_points, d, env_points), axis1=1, axis2=3)
    return rho.with_data(reduced, check=False)
