"""Single-mode bosonic states and the X-quadrature coarse-grained measurement.

Quadrature convention ``X = (a + a^dag) / sqrt(2)``, so the vacuum has
``Var(X) = 1/2``.  States are Fock-basis amplitude vectors; the measurement
acts on their position-representation wavefunctions sampled on a uniform
grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import DistanceMeasure, normalized_amplitudes

DEFAULT_POINTS = 2048
MASS_ATOL = 1e-8


class ConvergenceError(RuntimeError):
    """Grid or Fock cutoff too coarse for the requested accuracy."""


@dataclass(frozen=True)
class FockSpace:
    cutoff: int

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError(f"cutoff must be a positive integer, got {self.cutoff!r}")


def required_cutoff(alpha: complex) -> int:
    """Smallest cutoff accepted for a coherent amplitude ``alpha``."""
    n2 = abs(alpha) ** 2
    return int(math.ceil(n2 + 10.0 * math.sqrt(n2 + 1.0)))


def _check_cutoff(fs: FockSpace, alpha: complex):
    need = required_cutoff(alpha)
    if fs.cutoff < need:
        raise ValueError(f"cutoff {fs.cutoff} too small for |alpha|={abs(alpha):g}; need >= {need}")


def coherent_state(fs: FockSpace, alpha: complex) -> np.ndarray:
    """``e^{-|α|²/2} α^n / sqrt(n!)`` with factorials in log space."""
    _check_cutoff(fs, alpha)
    n = np.arange(fs.cutoff)
    amp = np.zeros(fs.cutoff, dtype=complex)
    if alpha == 0:
        amp[0] = 1.0
        return amp
    r = abs(alpha)
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def cat_state(fs: FockSpace, alpha: float) -> np.ndarray:
    """Even cat ``|α> + |-α>``, normalized; only even Fock levels populated."""
    if not alpha > 0:
        raise ValueError(f"cat amplitude must be positive, got {alpha!r}")
    amp = coherent_state(fs, alpha)
    amp[1::2] = 0.0
    return amp / np.linalg.norm(amp)


def fock_state(fs: FockSpace, n: int) -> np.ndarray:
    if not 0 <= n < fs.cutoff:
        raise ValueError(f"Fock level {n} outside cutoff {fs.cutoff}")
    amp = np.zeros(fs.cutoff, dtype=complex)
    amp[n] = 1.0
    return amp


def quadrature_moments(amplitudes) -> tuple[float, float]:
    """``(<X>, Var X)`` from the ladder-operator matrix elements.

    Exact for the given amplitudes regarded as a state of the untruncated
    oscillator, so levels at the cutoff are treated correctly.
    """
    c = np.asarray(amplitudes, dtype=complex)
    n = np.arange(c.size)
    a_mean = np.sum(np.sqrt(n[1:]) * c[:-1].conj() * c[1:])
    aa_mean = np.sum(np.sqrt(n[2:] * (n[2:] - 1)) * c[:-2].conj() * c[2:])
    n_mean = np.sum(n * np.abs(c) ** 2)
    x_mean = math.sqrt(2.0) * a_mean.real
    x2_mean = aa_mean.real + n_mean + 0.5
    return float(x_mean), float(max(0.0, x2_mean - x_mean ** 2))


def mean_number(amplitudes) -> float:
    c = np.asarray(amplitudes, dtype=complex)
    return float(np.sum(np.arange(c.size) * np.abs(c) ** 2))


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform nodes ``x_k = -L + k h`` with ``h = 2L / (points - 1)``."""

    extent: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.extent > 0:
            raise ValueError(f"grid extent must be positive, got {self.extent!r}")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points!r}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.extent + self.spacing * np.arange(self.points)

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        return QuadratureGrid(self.extent, factor * (self.points - 1) + 1)


def default_extent(amplitudes) -> float:
    x_mean, var = quadrature_moments(amplitudes)
    return abs(x_mean) + 6.0 * math.sqrt(var)


def default_grid(amplitudes, points: int = DEFAULT_POINTS) -> QuadratureGrid:
    return QuadratureGrid(default_extent(amplitudes), points)


def hermite_functions(nmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized oscillator eigenfunctions ``φ_0..φ_{nmax-1}`` at ``x``, shape (nmax, len(x)).

    Three-term recurrence
    ``φ_{n+1} = sqrt(2/(n+1)) x φ_n - sqrt(n/(n+1)) φ_{n-1}``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax, x.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if nmax > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def position_wavefunction(amplitudes, grid: QuadratureGrid) -> np.ndarray:
    """``ψ(x_k) = sum_n c_n φ_n(x_k)`` on the grid nodes.

    Raises:
        ConvergenceError: if the discrete norm ``sum |ψ|^2 h`` misses 1 by
            more than 1e-8; the message names the extent that would suffice.
    """
    c = normalized_amplitudes(amplitudes)
    psi = c @ hermite_functions(c.size, grid.nodes)
    mass = float(np.sum(np.abs(psi) ** 2) * grid.spacing)
    if abs(mass - 1.0) > MASS_ATOL:
        raise ConvergenceError(
            f"grid (L={grid.extent:g}, points={grid.points}) captures mass {mass:.12f}; "
            f"use extent >= {default_extent(c):.4g} and spacing small enough to resolve the state"
        )
    return psi


def _lag_kernel(grid: QuadratureGrid, sigma: float) -> np.ndarray:
    lags = grid.spacing * np.arange(-(grid.points - 1), grid.points)
    return np.exp(-lags ** 2 / (8.0 * sigma ** 2))


def quadrature_fidelity(amplitudes, grid: QuadratureGrid, sigma: float) -> float:
    """Pure-state ``F = ∬ |ψ(x)|² |ψ(x')|² exp(-(x-x')²/(8σ²)) dx dx'`` as a Riemann sum."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    p = np.abs(position_wavefunction(amplitudes, grid)) ** 2
    # kernel is Toeplitz, so K @ p is a direct (deterministic) convolution
    kp = np.convolve(p, _lag_kernel(grid, sigma))[grid.points - 1: 2 * grid.points - 1]
    f = float(p @ kp) * grid.spacing ** 2
    return min(1.0, max(0.0, f))


def grid_density_matrix(amplitudes, grid: QuadratureGrid) -> np.ndarray:
    """Position-grid density matrix ``h ψ(x_k) ψ*(x_l)`` with unit trace.

    Accepts a Fock-basis state vector or density matrix.
    """
    m = np.asarray(amplitudes, dtype=complex)
    if m.ndim == 1:
        m = np.outer(m, m.conj())
    basis = hermite_functions(m.shape[0], grid.nodes).T
    r = grid.spacing * (basis @ m @ basis.T)
    return r / np.real(np.trace(r))


def quadrature_measure_M_mixed(state, grid: QuadratureGrid, sigma: float,
                               distance=DistanceMeasure.BURES) -> float:
    """General path: damp ``ρ(x, x')`` by ``exp(-(x-x')²/(8σ²))`` and compare.

    Works for mixed Fock-basis states.  Cost is cubic in the grid size, so
    use grids of a few hundred points.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    d = distance if isinstance(distance, DistanceMeasure) else DistanceMeasure(distance)
    r = grid_density_matrix(state, grid)
    x = grid.nodes
    damped = r * np.exp(-(x[:, None] - x[None, :]) ** 2 / (8.0 * sigma ** 2))
    return d(r, damped)


def quadrature_measure_M(amplitudes, grid: QuadratureGrid | None = None, sigma: float = 1.0,
                         distance=DistanceMeasure.BURES, *, check_convergence: bool = False,
                         tol: float = 1e-4) -> float:
    """Bures disturbance of a pure state under the quadrature measurement.

    With ``check_convergence`` the value is recomputed on a twice-finer grid
    and a :class:`ConvergenceError` raised if the two differ by more than
    ``tol``.  Relative entropy is routed through the mixed-state path on a
    coarser grid.
    """
    c = normalized_amplitudes(amplitudes)
    grid = default_grid(c) if grid is None else grid
    d = distance if isinstance(distance, DistanceMeasure) else DistanceMeasure(distance)
    if d is DistanceMeasure.RELATIVE_ENTROPY:
        coarse = QuadratureGrid(grid.extent, min(grid.points, 401))
        return quadrature_measure_M_mixed(c, coarse, sigma, d)

    def at(g):
        return 2.0 - 2.0 * math.sqrt(quadrature_fidelity(c, g, sigma))

    value = at(grid)
    if check_convergence:
        finer = at(grid.refined(2))
        if abs(finer - value) > tol:
            raise ConvergenceError(
                f"grid not converged at sigma={sigma:g}: {value:.8f} vs {finer:.8f} on refinement"
            )
    return value


def truncation_error(amplitudes) -> float:
    """Norm deficit of a truncated state (1 - |c|^2)."""
    c = np.asarray(amplitudes, dtype=complex)
    return float(abs(1.0 - np.vdot(c, c).real))

