"""Seeded property audits shared by the unit and acceptance suites.

Each audit returns the worst slack it saw (positive means violation) so
callers can assert and report in one place.
"""

import math

import numpy as np

from macrocoh.core import (
    CoarseChannel,
    DensityMatrix,
    FreeOperation,
    ObservableSpectrum,
    apply_channel,
    apply_free,
    measure_M,
)
from macrocoh.sampling import random_density_matrix, random_pure_state, random_spectrum

SIGMAS = (0.1, 1.0, 10.0)


def random_spectrum_with_degeneracy(rng, max_dim=8):
    d = int(rng.integers(2, max_dim + 1))
    if rng.random() < 0.5:
        return ObservableSpectrum(random_spectrum(d, -5, 5, rng))
    return ObservableSpectrum(rng.integers(-3, 4, size=d).astype(float))


def random_state(rng, spectrum=None, max_dim=8):
    spectrum = random_spectrum_with_degeneracy(rng, max_dim) if spectrum is None else spectrum
    rank = int(rng.integers(1, spectrum.dim + 1))
    return DensityMatrix(random_density_matrix(spectrum.dim, rank=rank, seed=rng), spectrum)


def random_sector_blocks(rng, spectrum):
    """Random partition of the basis into unions of whole eigenspaces."""
    groups = spectrum.degenerate_groups()
    labels = rng.integers(0, max(1, min(3, len(groups))), size=len(groups))
    blocks = [sorted(i for g, lab in zip(groups, labels) if lab == b for i in g) for b in np.unique(labels)]
    return [b for b in blocks if b]


def probability_one_ops(rng, spectrum):
    return [
        FreeOperation.phase(rng.uniform(0, 2 * math.pi, spectrum.dim)),
        FreeOperation.coarse(float(rng.uniform(0.1, 5))),
    ]


def audit_m1(rng, trials):
    """Zero on δ=0-only states; positive once an off-sector entry exceeds 1e-3.

    The 1e-6 positivity floor is checked at sigma equal to the smallest
    nonzero gap, where every gap is resolved.  At the fixed sigmas only
    strict positivity is required, since a gap far below sigma gives a
    genuinely tiny M.
    """
    worst = -math.inf
    for _ in range(trials):
        rho = random_state(rng)
        zero_mask = rho.spectrum.zero_mode_mask
        free = np.asarray(rho) * zero_mask
        free_state = rho.with_data(free / np.trace(free).real)
        off = np.max(np.abs(np.asarray(rho)[~zero_mask]), initial=0.0)
        for s in SIGMAS:
            worst = max(worst, measure_M(free_state, s) - 1e-9)
            if off > 1e-3:
                m = measure_M(rho, s)
                worst = max(worst, -m if m > 0 else 1.0)
        if off > 1e-3:
            worst = max(worst, 1e-6 - measure_M(rho, rho.spectrum.min_nonzero_gap))
    return worst


def audit_m2a(rng, trials):
    worst = -math.inf
    for _ in range(trials):
        rho = random_state(rng)
        for op in probability_one_ops(rng, rho.spectrum):
            (p, out), = apply_free(rho, op)
            for s in SIGMAS:
                worst = max(worst, measure_M(out, s) - measure_M(rho, s) - 1e-9)
    return worst


def audit_m2b(rng, trials):
    worst = -math.inf
    for _ in range(trials):
        rho = random_state(rng)
        branches = apply_free(rho, FreeOperation.sectors(random_sector_blocks(rng, rho.spectrum)))
        for s in SIGMAS:
            avg = sum(p * measure_M(b, s) for p, b in branches)
            worst = max(worst, avg - measure_M(rho, s) - 1e-9)
    return worst


def audit_m3(rng, trials):
    worst = -math.inf
    for _ in range(trials):
        spectrum = random_spectrum_with_degeneracy(rng)
        parts = [random_state(rng, spectrum) for _ in range(int(rng.integers(2, 5)))]
        p = rng.dirichlet(np.ones(len(parts)))
        mix = DensityMatrix(sum(w * np.asarray(r) for w, r in zip(p, parts)), spectrum)
        for s in SIGMAS:
            rhs = sum(w * measure_M(r, s) for w, r in zip(p, parts))
            worst = max(worst, measure_M(mix, s) - rhs - 1e-9)
    return worst


def audit_m4(rng, trials):
    """Wider-gap uniform superpositions carry strictly more M.

    Eigenvalues are distinct integers times sigma/2, so compared gaps differ
    by at least sigma/2 and stay below 5 sigma; beyond that both damping
    factors underflow and the strict margin is lost to rounding.  The
    unscaled integer spectrum is also checked, non-strictly.
    """
    worst = -math.inf
    for _ in range(trials):
        d = int(rng.integers(3, 9))
        levels = rng.choice(np.arange(-5, 6), size=d, replace=False).astype(float)
        i, j, k, l = rng.choice(d, size=4, replace=d < 4)
        if i == j or k == l or abs(levels[i] - levels[j]) == abs(levels[k] - levels[l]):
            continue
        if abs(levels[i] - levels[j]) < abs(levels[k] - levels[l]):
            i, j, k, l = k, l, i, j
        for s in SIGMAS:
            scaled = ObservableSpectrum(levels * s / 2)
            margin = measure_M(_pair_state(scaled, i, j), s) - measure_M(_pair_state(scaled, k, l), s)
            worst = max(worst, 1e-9 - margin)
            raw = ObservableSpectrum(levels)
            margin = measure_M(_pair_state(raw, i, j), s) - measure_M(_pair_state(raw, k, l), s)
            worst = max(worst, -1e-12 - margin)
    return worst


def _pair_state(spectrum, i, j):
    psi = np.zeros(spectrum.dim, dtype=complex)
    psi[i] = psi[j] = 1 / math.sqrt(2)
    return DensityMatrix.from_pure(psi, spectrum)


def audit_commutation(rng, trials):
    """Largest Frobenius gap between E(Φ(ρ)) and Φ(E(ρ)) over all free-operation kinds."""
    worst = 0.0
    for _ in range(trials):
        rho = random_state(rng)
        spectrum = rho.spectrum
        sigma = float(rng.uniform(0.1, 10))
        ops = probability_one_ops(rng, spectrum) + [
            FreeOperation.sectors(random_sector_blocks(rng, spectrum)),
            FreeOperation.eigenspaces(spectrum),
        ]
        damp = CoarseChannel(sigma).damping(spectrum)
        before = np.asarray(rho)
        after = np.asarray(apply_channel(rho, sigma))
        for op in ops:
            lhs = op.apply_operator(after, spectrum)
            rhs = [m * damp for m in op.apply_operator(before, spectrum)]
            for x, y in zip(lhs, rhs):
                worst = max(worst, float(np.linalg.norm(x - y)))
    return worst


def random_pure_case(rng, max_dim=8):
    d = int(rng.integers(2, max_dim + 1))
    spectrum = ObservableSpectrum(random_spectrum(d, -5, 5, rng))
    return random_pure_state(d, rng), spectrum
