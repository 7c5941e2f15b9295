"""Seeded random states, spectra and channels for property audits."""

import numpy as np


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure_state(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed pure state: a normalized complex Gaussian vector."""
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Ginibre-induced mixed state ``G G^H / Tr G G^H``."""
    rng = _rng(seed)
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def random_spectrum(dim: int, low: float = -5.0, high: float = 5.0, seed=None) -> np.ndarray:
    return _rng(seed).uniform(low, high, size=dim)


def random_kraus(dim: int, n_ops: int = 3, seed=None) -> list[np.ndarray]:
    """Kraus operators of a random CPTP map (an isometry cut into blocks)."""
    rng = _rng(seed)
    g = rng.standard_normal((n_ops * dim, dim)) + 1j * rng.standard_normal((n_ops * dim, dim))
    q, _ = np.linalg.qr(g)
    return [q[k * dim:(k + 1) * dim] for k in range(n_ops)]


def apply_kraus(rho, kraus) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ k.conj().T for k in kraus)
