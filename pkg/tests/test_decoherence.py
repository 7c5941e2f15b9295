import math

import numpy as np
import pytest

from macrocoh.core import DensityMatrix, ObservableSpectrum, apply_channel, measure_M, pure_state_measure
from macrocoh.decoherence import (
    CouplingParams,
    ThermalBathParams,
    decohere,
    decohere_joint_unitary,
    fragility,
    fragility_via_measure,
    sigma_from_thermal,
)
from macrocoh.sampling import random_density_matrix, random_spectrum
from macrocoh.spin import SpinEnsemble, ghz_state, product_state


def random_state(rng, max_dim=8):
    d = int(rng.integers(2, max_dim + 1))
    spectrum = ObservableSpectrum(random_spectrum(d, seed=rng))
    return DensityMatrix(random_density_matrix(d, seed=rng), spectrum)


def params_for_sigma(sigma, g=1.0, t=1.0):
    return CouplingParams(g, t, sigma * math.sqrt(2) * g * t)


def test_parameter_validation():
    for bad in ((0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0), (-1.0, 1.0, 1.0)):
        with pytest.raises(ValueError):
            CouplingParams(*bad)
    with pytest.raises(ValueError):
        ThermalBathParams(1.0, 0.0, 1.0, 1.0)
    assert CouplingParams(1.0, 0.0, 1.0).effective_sigma == math.inf
    assert CouplingParams(2.0, 0.5, 3.0).effective_sigma == pytest.approx(3 / math.sqrt(2))


def test_decohere_identity_cases():
    rng = np.random.default_rng(81)
    rho = random_state(rng)
    np.testing.assert_array_equal(np.asarray(decohere(rho, CouplingParams(1.0, 0.0, 1.0))), np.asarray(rho))
    diag = DensityMatrix(np.diag([0.2, 0.3, 0.5]), ObservableSpectrum([0, 1, 5]))
    for t in (0.1, 10.0, 1e3):
        np.testing.assert_array_equal(np.asarray(decohere(diag, CouplingParams(1.0, t, 1.0))), np.asarray(diag))


def test_decohere_equals_measurement_channel():
    rng = np.random.default_rng(83)
    for _ in range(200):
        rho = random_state(rng)
        p = CouplingParams(float(rng.uniform(0.1, 3)), float(rng.uniform(0.01, 3)), float(rng.uniform(0.1, 5)))
        diff = np.asarray(decohere(rho, p)) - np.asarray(apply_channel(rho, p.effective_sigma))
        assert np.linalg.norm(diff) < 1e-12


def test_decoherence_composes_in_quadrature():
    rng = np.random.default_rng(85)
    for _ in range(50):
        rho = random_state(rng)
        g, mu = float(rng.uniform(0.5, 2)), float(rng.uniform(0.5, 2))
        t1, t2 = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        twice = decohere(decohere(rho, CouplingParams(g, t1, mu)), CouplingParams(g, t2, mu))
        once = decohere(rho, CouplingParams(g, math.hypot(t1, t2), mu))
        np.testing.assert_allclose(np.asarray(twice), np.asarray(once), atol=1e-14)


def test_thermal_mapping_value():
    s = sigma_from_thermal(ThermalBathParams(2.0, 1.0, 1.0, 1.0))
    assert s == pytest.approx(0.6170875772350976, abs=1e-15)
    assert s == pytest.approx(math.sqrt(math.tanh(1.0) / 2))


def test_thermal_mapping_asymptotes():
    cold = sigma_from_thermal(ThermalBathParams(1e3, 1.0, 0.7, 2.0))
    assert cold == pytest.approx(1 / (math.sqrt(2) * 0.7 * 2.0), rel=1e-12)
    hot = sigma_from_thermal(ThermalBathParams(1e-8, 1.0, 1.0, 1.0))
    assert hot < 1e-4


def test_thermal_mapping_monotone():
    betas = np.geomspace(0.01, 20, 30)
    ts = np.geomspace(0.05, 10, 30)
    s_beta = [sigma_from_thermal(ThermalBathParams(b, 1.3, 0.8, 1.1)) for b in betas]
    s_t = [sigma_from_thermal(ThermalBathParams(0.9, 1.3, 0.8, t)) for t in ts]
    s_g = [sigma_from_thermal(ThermalBathParams(0.9, 1.3, g, 1.1)) for g in ts]
    assert np.all(np.diff(s_beta) > 0)
    assert np.all(np.diff(s_t) < 0)
    assert np.all(np.diff(s_g) < 0)


def test_closed_form_matches_joint_unitary():
    rng = np.random.default_rng(87)
    for _ in range(20):
        rho = random_state(rng, max_dim=4)
        p = CouplingParams(float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.1, 1.5)), float(rng.uniform(0.8, 2.5)))
        oracle = decohere_joint_unitary(rho, p, env_points=128)
        assert np.max(np.abs(np.asarray(oracle) - np.asarray(decohere(rho, p)))) < 1e-6


def test_joint_unitary_size_limit():
    rho = DensityMatrix(np.eye(9) / 9, ObservableSpectrum(np.arange(9.0)))
    with pytest.raises(ValueError):
        decohere_joint_unitary(rho, CouplingParams(1, 1, 1), env_points=128)


def test_fragility_examples():
    diag = DensityMatrix(np.diag([0.5, 0.5]), ObservableSpectrum([0.0, 3.0]))
    assert fragility(diag, CouplingParams(1, 2, 1)) == pytest.approx(0.0, abs=1e-12)
    ens = SpinEnsemble(64)
    ghz = DensityMatrix.from_pure(ghz_state(ens), ens.spectrum)
    assert fragility(ghz, params_for_sigma(1.0)) == pytest.approx(2 - math.sqrt(2), abs=1e-6)
    prod = product_state(ens, math.pi / 4)
    value = fragility(DensityMatrix.from_pure(prod, ens.spectrum), params_for_sigma(8.0))
    assert abs(value - pure_state_measure(prod, ens.spectrum, 8.0)) < 1e-10


def test_fragility_equals_measure():
    rng = np.random.default_rng(89)
    for _ in range(100):
        rho = random_state(rng)
        p = CouplingParams(float(rng.uniform(0.1, 3)), float(rng.uniform(0.01, 3)), float(rng.uniform(0.1, 5)))
        for dist in ("bures", "relent"):
            assert abs(fragility(rho, p, dist) - fragility_via_measure(rho, p, dist)) < 1e-10
    rho = random_state(rng)
    assert fragility_via_measure(rho, CouplingParams(1, 0, 1)) == 0.0
    assert measure_M(rho, 1.0) == pytest.approx(fragility(rho, params_for_sigma(1.0)))
