"""Observable modes, the Gaussian coarse-grained measurement and the disturbance measure.

States are written in the eigenbasis of the measured observable
``A = sum_i a_i |i><i|``.  The coarse-grained measurement with precision
``sigma`` has Kraus operators ``Q_x = sum_i sqrt(q_i(x)) |i><i|`` where
``q_i`` is a normal density of width ``sigma`` centred on ``a_i``.  Its
non-selective action damps every matrix element by
``exp(-(a_i - a_j)**2 / (8 sigma**2))``; the disturbance measure is the
distance between a state and its post-measurement image.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import numerics

GAP_ATOL = 1e-9
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-10
BRANCH_CUTOFF = 1e-12


class ObservableSpectrum:
    """Eigenvalues ``a_i`` of the measured observable.

    Repeated values are allowed; they form degenerate sectors whose internal
    coherence is never disturbed by the measurement.
    """

    def __init__(self, eigenvalues, label: str | None = None):
        a = np.array(eigenvalues, dtype=float).ravel()
        if a.size == 0:
            raise ValueError("spectrum must contain at least one eigenvalue")
        if not np.all(np.isfinite(a)):
            raise ValueError("spectrum eigenvalues must be finite")
        a.setflags(write=False)
        self.eigenvalues = a
        self.label = label

    def __repr__(self):
        return f"ObservableSpectrum(dim={self.dim}, label={self.label!r})"

    def __eq__(self, other):
        if not isinstance(other, ObservableSpectrum):
            return NotImplemented
        return np.array_equal(self.eigenvalues, other.eigenvalues)

    def __hash__(self):
        return hash(self.eigenvalues.tobytes())

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @cached_property
    def gap_matrix(self) -> np.ndarray:
        """``a_i - a_j`` for every matrix entry."""
        a = self.eigenvalues
        g = a[:, None] - a[None, :]
        g.setflags(write=False)
        return g

    @cached_property
    def _modes(self) -> tuple[np.ndarray, np.ndarray]:
        flat = self.gap_matrix.ravel()
        order = np.argsort(flat, kind="stable")
        srt = flat[order]
        # chain clustering: consecutive sorted gaps closer than GAP_ATOL merge
        new_cluster = np.concatenate([[True], np.diff(srt) > GAP_ATOL])
        cluster_of_sorted = np.cumsum(new_cluster) - 1
        labels = np.empty(flat.size, dtype=int)
        labels[order] = cluster_of_sorted
        n_clusters = int(cluster_of_sorted[-1]) + 1
        sums = np.bincount(cluster_of_sorted, weights=srt, minlength=n_clusters)
        counts = np.bincount(cluster_of_sorted, minlength=n_clusters)
        deltas = sums / counts
        # the cluster holding the diagonal is the zero mode exactly
        deltas[labels[0]] = 0.0
        labels = labels.reshape(self.gap_matrix.shape)
        labels.setflags(write=False)
        deltas.setflags(write=False)
        return deltas, labels

    @property
    def gaps(self) -> np.ndarray:
        """Distinct eigenvalue gaps (the mode set), ascending."""
        return self._modes[0]

    @property
    def mode_labels(self) -> np.ndarray:
        """Index into :attr:`gaps` for every matrix entry."""
        return self._modes[1]

    @property
    def zero_mode_mask(self) -> np.ndarray:
        return self.mode_labels == self.mode_labels[0, 0]

    def degenerate_groups(self) -> list[list[int]]:
        """Indices grouped by equal eigenvalue (within the gap tolerance)."""
        zero = self.zero_mode_mask
        seen = np.zeros(self.dim, dtype=bool)
        groups = []
        for i in range(self.dim):
            if not seen[i]:
                members = np.flatnonzero(zero[i])
                seen[members] = True
                groups.append(members.tolist())
        return groups

    @property
    def max_gap(self) -> float:
        return float(np.ptp(self.eigenvalues))

    @property
    def min_nonzero_gap(self) -> float:
        g = np.abs(self.gaps)
        g = g[g > GAP_ATOL]
        return float(g.min()) if g.size else math.inf


class DensityMatrix:
    """A validated, immutable density matrix in the observable eigenbasis.

    Validation checks Hermiticity (1e-12), unit trace (1e-10) and positivity
    (1e-10 relative to the largest eigenvalue).  The stored matrix is
    symmetrized and read-only.
    """

    def __init__(self, data, spectrum: ObservableSpectrum, *, check: bool = True):
        if not isinstance(spectrum, ObservableSpectrum):
            spectrum = ObservableSpectrum(spectrum)
        m = np.array(data, dtype=complex)
        if m.shape != (spectrum.dim, spectrum.dim):
            raise ValueError(
                f"state shape {m.shape} does not match spectrum dimension {spectrum.dim}"
            )
        if check:
            m = numerics.as_hermitian(m)
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_ATOL:
                raise ValueError(f"trace must be 1, got {tr!r}")
            w = np.linalg.eigvalsh(m)
            if w[0] < -numerics.PSD_RTOL * max(abs(w[-1]), abs(w[0])):
                raise ValueError(f"state is not positive semidefinite: min eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        self.data = m
        self.spectrum = spectrum

    @classmethod
    def from_pure(cls, amplitudes, spectrum: ObservableSpectrum) -> "DensityMatrix":
        psi = normalized_amplitudes(amplitudes)
        return cls(np.outer(psi, psi.conj()), spectrum)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def with_data(self, data, *, check: bool = True) -> "DensityMatrix":
        return DensityMatrix(data, self.spectrum, check=check)


def normalized_amplitudes(amplitudes, atol: float = NORM_ATOL) -> np.ndarray:
    """Return amplitudes as a complex vector, rejecting unnormalized input."""
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > atol:
        raise ValueError(f"state vector is not normalized: |psi|^2 = {norm2!r}")
    return psi


@dataclass(frozen=True)
class CoarseChannel:
    """Non-selective Gaussian coarse-grained measurement of precision ``sigma``."""

    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")

    def damping(self, spectrum: ObservableSpectrum) -> np.ndarray:
        return np.exp(-spectrum.gap_matrix ** 2 / (8.0 * self.sigma ** 2))

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return apply_channel(rho, self)


class DistanceMeasure(enum.Enum):
    BURES = "bures"
    RELATIVE_ENTROPY = "relent"

    def __call__(self, rho, tau) -> float:
        if self is DistanceMeasure.BURES:
            return numerics.bures_distance(rho, tau)
        return numerics.relative_entropy(rho, tau)


def _as_channel(ch) -> CoarseChannel:
    return ch if isinstance(ch, CoarseChannel) else CoarseChannel(float(ch))


def _as_distance(d) -> DistanceMeasure:
    return d if isinstance(d, DistanceMeasure) else DistanceMeasure(d)


def mode_decompose(rho: DensityMatrix) -> list[tuple[float, np.ndarray]]:
    """Split ``rho`` into its mode components ``rho^(delta)``.

    Each matrix entry lands in exactly one component, so the components sum
    back to ``rho`` exactly.  Gaps closer than 1e-9 share a component.
    """
    spectrum = rho.spectrum
    m = np.asarray(rho)
    labels = spectrum.mode_labels
    out = []
    for idx, delta in enumerate(spectrum.gaps):
        mask = labels == idx
        out.append((float(delta), np.where(mask, m, 0.0)))
    return out


def mode_component(m, spectrum: ObservableSpectrum, delta: float) -> np.ndarray:
    """The ``delta`` mode of an arbitrary operator (zero if ``delta`` is no gap)."""
    m = np.asarray(m, dtype=complex)
    gaps = spectrum.gaps
    hit = np.flatnonzero(np.abs(gaps - delta) <= GAP_ATOL)
    if hit.size == 0:
        return np.zeros_like(m)
    return np.where(spectrum.mode_labels == hit[0], m, 0.0)


def apply_channel(rho: DensityMatrix, ch) -> DensityMatrix:
    """Post-measurement state: entrywise Gaussian damping of coherences."""
    ch = _as_channel(ch)
    out = np.asarray(rho) * ch.damping(rho.spectrum)
    # the damping kernel is positive definite and leaves the diagonal alone,
    # so the output is a valid state by construction
    return rho.with_data(out, check=False)


def apply_channel_quadrature(rho: DensityMatrix, ch, nodes: int = 64) -> DensityMatrix:
    """Slow path: ``sum_k w_k Q_{x_k} rho Q_{x_k}`` on Gauss-Hermite nodes.

    The nodes are centred on the middle of the spectrum with scale
    ``sqrt(2) sigma``, which is accurate when the spectrum spans a few
    ``sigma`` at most.  Used to validate the entrywise form.
    """
    ch = _as_channel(ch)
    a = rho.spectrum.eigenvalues
    t, w = np.polynomial.hermite.hermgauss(nodes)
    centre = 0.5 * (a.min() + a.max())
    scale = math.sqrt(2.0) * ch.sigma
    m = np.asarray(rho)
    out = np.zeros_like(m)
    for tk, wk in zip(t, w):
        x = centre + scale * tk
        q = kraus_diagonal(rho.spectrum, ch.sigma, x)
        # quadrature weight carries exp(-t^2); divide it back out
        out += (wk * scale * math.exp(tk * tk)) * (q[:, None] * m * q[None, :])
    return rho.with_data(out, check=False)


def kraus_diagonal(spectrum: ObservableSpectrum, sigma: float, x: float) -> np.ndarray:
    """Diagonal of the Kraus operator ``Q_x``: ``sqrt(q_i(x))``."""
    a = spectrum.eigenvalues
    q = np.exp(-(a - x) ** 2 / (2.0 * sigma ** 2)) / (math.sqrt(2.0 * math.pi) * sigma)
    return np.sqrt(q)


def choi_matrix(spectrum: ObservableSpectrum, ch) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` of the coarse channel."""
    d = spectrum.dim
    damp = _as_channel(ch).damping(spectrum)
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            choi[i * d + i, j * d + j] = damp[i, j]
    return choi


def projective_dephase(rho: DensityMatrix) -> DensityMatrix:
    """The sharp-measurement limit: keep only the zero mode ``rho^(0)``."""
    out = np.where(rho.spectrum.zero_mode_mask, np.asarray(rho), 0.0)
    return rho.with_data(out, check=False)


def measure_M(rho: DensityMatrix, ch, distance=DistanceMeasure.BURES) -> float:
    """Macroscopic coherence ``D(rho, Phi_sigma(rho))``.

    Args:
        rho: state in the observable eigenbasis.
        ch: a :class:`CoarseChannel` or a bare ``sigma``.
        distance: :class:`DistanceMeasure` member or its value string.

    Raises:
        FloatingPointError: if the relative-entropy variant hits a support
            mismatch, which only happens when the numerics have degenerated.
    """
    d = _as_distance(distance)
    value = d(rho, apply_channel(rho, ch))
    if math.isinf(value):
        raise FloatingPointError("support mismatch between state and its measured image")
    return value


def pure_state_fidelity_fast(amplitudes, spectrum: ObservableSpectrum, sigma: float) -> float:
    """``F(psi, Phi_sigma(psi))`` for a pure state, as a double sum over populations."""
    psi = normalized_amplitudes(amplitudes)
    p = np.abs(psi) ** 2
    kernel = CoarseChannel(sigma).damping(spectrum)
    return float(p @ kernel @ p)


def pure_state_measure(amplitudes, spectrum: ObservableSpectrum, sigma: float) -> float:
    """Bures disturbance of a pure state via :func:`pure_state_fidelity_fast`."""
    f = pure_state_fidelity_fast(amplitudes, spectrum, sigma)
    return 2.0 - 2.0 * math.sqrt(min(1.0, max(0.0, f)))


class FreeKind(enum.Enum):
    DIAGONAL_PHASE = "diagonal_phase"
    COARSE_CHANNEL = "coarse_channel"
    SECTOR_PROJECTION = "sector_projection"


@dataclass(frozen=True)
class FreeOperation:
    """A mode-covariant operation from one of three verifiable families.

    Build with :meth:`phase`, :meth:`coarse` or :meth:`sectors`.  Sector
    blocks must partition the basis and never split a degenerate eigenvalue
    group; each block projector then commutes with the observable.
    """

    kind: FreeKind
    phases: tuple[float, ...] = ()
    sigma: float | None = None
    blocks: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def phase(cls, phases: Sequence[float]) -> "FreeOperation":
        return cls(FreeKind.DIAGONAL_PHASE, phases=tuple(float(p) for p in phases))

    @classmethod
    def coarse(cls, sigma: float) -> "FreeOperation":
        CoarseChannel(sigma)
        return cls(FreeKind.COARSE_CHANNEL, sigma=float(sigma))

    @classmethod
    def sectors(cls, blocks: Sequence[Sequence[int]]) -> "FreeOperation":
        return cls(FreeKind.SECTOR_PROJECTION, blocks=tuple(tuple(int(i) for i in b) for b in blocks))

    @classmethod
    def eigenspaces(cls, spectrum: ObservableSpectrum) -> "FreeOperation":
        """Projective measurement onto each eigenspace of the observable."""
        return cls.sectors(spectrum.degenerate_groups())

    def validate(self, spectrum: ObservableSpectrum) -> None:
        d = spectrum.dim
        if self.kind is FreeKind.DIAGONAL_PHASE:
            if len(self.phases) != d:
                raise ValueError(f"expected {d} phases, got {len(self.phases)}")
        elif self.kind is FreeKind.SECTOR_PROJECTION:
            flat = sorted(i for b in self.blocks for i in b)
            if flat != list(range(d)) or any(len(b) == 0 for b in self.blocks):
                raise ValueError(f"sector blocks must partition range({d}): {self.blocks}")
            block_of = np.empty(d, dtype=int)
            for k, b in enumerate(self.blocks):
                block_of[list(b)] = k
            for group in spectrum.degenerate_groups():
                if len(set(block_of[group])) > 1:
                    raise ValueError(f"sector blocks split the degenerate group {group}")

    def apply_operator(self, m, spectrum: ObservableSpectrum) -> list[np.ndarray]:
        """Action on an arbitrary operator; one unnormalized matrix per branch."""
        self.validate(spectrum)
        m = np.asarray(m, dtype=complex)
        if self.kind is FreeKind.DIAGONAL_PHASE:
            u = np.exp(1j * np.asarray(self.phases))
            return [u[:, None] * m * u.conj()[None, :]]
        if self.kind is FreeKind.COARSE_CHANNEL:
            return [m * CoarseChannel(self.sigma).damping(spectrum)]
        out = []
        for b in self.blocks:
            mask = np.zeros(spectrum.dim, dtype=bool)
            mask[list(b)] = True
            out.append(np.where(mask[:, None] & mask[None, :], m, 0.0))
        return out


def apply_free(rho: DensityMatrix, op: FreeOperation) -> list[tuple[float, DensityMatrix]]:
    """Apply a free operation, returning ``(probability, normalized state)`` branches.

    Sector branches with probability below 1e-12 are dropped.
    """
    branches = op.apply_operator(np.asarray(rho), rho.spectrum)
    if op.kind is not FreeKind.SECTOR_PROJECTION:
        return [(1.0, rho.with_data(branches[0], check=False))]
    out = []
    for piece in branches:
        p = float(np.trace(piece).real)
        if p >= BRANCH_CUTOFF:
            out.append((p, rho.with_data(piece / p, check=False)))
    return out
