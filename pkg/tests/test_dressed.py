import math

import numpy as np
import pytest

from sseit.atomdata import Manifold, StateLabel, cesium_registry
from sseit.dressed import (
    ProtectionMap,
    eigensystem,
    nonground_population,
    protection_map,
)
from sseit.errors import DomainError
from sseit.hamiltonian import HermitianOperator, build_rwa_hamiltonian
from sseit.lightfield import rabi_frequency
from sseit.schemes import toy_model

TWO_PI = 2 * math.pi


class TestEigensystem:
    def test_diagonal_matrix_gives_basis_vectors(self):
        reg = cesium_registry(Manifold.P6_32).subset(
            [StateLabel(Manifold.S6, 4, 0), StateLabel(Manifold.P6_32, 5, 1),
             StateLabel(Manifold.S7, 4, 1)]
        )
        h = HermitianOperator(np.diag([3.0, 1.0, 2.0]).astype(complex), reg.basis)
        pairs = eigensystem(h)
        values = [v for v, _ in pairs]
        assert values == sorted(values)
        for value, vector in pairs:
            k = int(np.argmax(np.abs(vector)))
            assert abs(vector[k]) == pytest.approx(1.0)
            assert h.entries[k, k].real == pytest.approx(value)

    def test_reconstruction(self):
        cfg = toy_model(5, protection_intensity=300.0)
        h = build_rwa_hamiltonian(cfg)
        pairs = eigensystem(h)
        rebuilt = sum(
            v * np.outer(vec, vec.conj()) for v, vec in pairs
        )
        assert np.linalg.norm(rebuilt - h.entries) <= 1e-10 * np.linalg.norm(h.entries)

    def test_equal_rabi_dark_state_is_half_excited(self):
        cfg = toy_model(3)
        reg = cfg.registry
        g = StateLabel(Manifold.S6, 4, 0)
        i = StateLabel(Manifold.P6_32, 5, 1)
        e = StateLabel(Manifold.S7, 4, 1)
        om_det = abs(rabi_frequency(cfg.detection, g, i, reg))
        om_prot_1 = abs(rabi_frequency(cfg.protection.replace(intensity=1.0), i, e, reg))
        matched = cfg.replace(
            protection=cfg.protection.replace(intensity=(om_det / om_prot_1) ** 2)
        )
        h = build_rwa_hamiltonian(matched)
        assert nonground_population(h, g) == pytest.approx(0.5, abs=1e-9)

    def test_non_hermitian_rejected(self):
        with pytest.raises(DomainError):
            eigensystem(np.array([[0, 1], [0, 0]], dtype=complex))


class TestNongroundPopulation:
    def test_fields_off_target_is_eigenstate(self):
        cfg = toy_model(4, protection_intensity=0.0)
        cfg = cfg.replace(detection=cfg.detection.replace(intensity=0.0))
        h = build_rwa_hamiltonian(cfg)
        assert nonground_population(h, StateLabel(Manifold.S6, 4, 0)) == 0.0

    def test_weak_probe_limit_is_sin_squared_theta(self):
        # Omega_EIT / Omega_Image = 100 on resonance: 1 - max overlap ~ 1e-4
        cfg = toy_model(3)
        reg = cfg.registry
        g = StateLabel(Manifold.S6, 4, 0)
        i = StateLabel(Manifold.P6_32, 5, 1)
        e = StateLabel(Manifold.S7, 4, 1)
        om_det = abs(rabi_frequency(cfg.detection, g, i, reg))
        om_prot_1 = abs(rabi_frequency(cfg.protection.replace(intensity=1.0), i, e, reg))
        target_intensity = (100.0 * om_det / om_prot_1) ** 2
        h = build_rwa_hamiltonian(cfg.with_protection_intensity(target_intensity))
        pop = nonground_population(h, g)
        # analytic overlap of the non-absorbing eigenstate: sin^2(theta)
        expected = math.sin(math.atan(1 / 100.0)) ** 2
        assert pop == pytest.approx(expected, rel=1e-3)
        assert pop == pytest.approx(1e-4, rel=2e-2)

    def test_target_not_in_basis_raises(self):
        cfg = toy_model(3)
        h = build_rwa_hamiltonian(cfg)
        with pytest.raises(DomainError):
            nonground_population(h, StateLabel(Manifold.S6, 3, 0))

    def test_values_bounded(self):
        cfg = toy_model(6, protection_intensity=500.0)
        h = build_rwa_hamiltonian(cfg)
        for label in cfg.registry.basis:
            pop = nonground_population(h, label)
            assert 0.0 <= pop <= 1.0


class TestProtectionMap:
    def test_single_point_grid_equals_direct_call(self):
        cfg = toy_model(3)
        target = StateLabel(Manifold.S6, 4, 0)
        grid_map = protection_map(cfg, [0.0], [100.0], target)
        h = build_rwa_hamiltonian(cfg.with_protection_intensity(100.0))
        assert grid_map.values[0, 0] == pytest.approx(
            nonground_population(h, target), rel=1e-12
        )

    def test_toy3_resonant_column_monotone_decreasing(self):
        cfg = toy_model(3)
        target = StateLabel(Manifold.S6, 4, 0)
        intensities = np.logspace(0, 3, 10)
        result = protection_map(cfg, [0.0], intensities, target)
        col = result.resonant_column()
        assert np.all(np.diff(col) < 0)

    def test_toy5_resonant_column_peaks_near_800(self):
        cfg = toy_model(5)
        target = StateLabel(Manifold.S6, 4, 0)
        intensities = np.logspace(1, 4, 31)
        result = protection_map(cfg, [0.0], intensities, target)
        col = result.resonant_column()
        peak_i = intensities[int(np.argmax(col))]
        assert 400.0 <= peak_i <= 1200.0

    def test_full_scheme_resonant_column_peaks_near_400(self):
        from sseit.schemes import scheme1

        cfg = scheme1()
        target = StateLabel(Manifold.S6, 4, 0)
        intensities = np.logspace(1, 4, 31)
        result = protection_map(cfg, [0.0], intensities, target)
        col = result.resonant_column()
        k = int(np.argmax(col))
        assert 0 < k < len(intensities) - 1
        assert 200.0 <= intensities[k] <= 600.0

    def test_grid_order_invariance(self):
        cfg = toy_model(4)
        target = StateLabel(Manifold.S6, 4, 0)
        det = TWO_PI * np.array([-50e6, 0.0, 50e6])
        inten = np.array([10.0, 100.0])
        full = protection_map(cfg, det, inten, target)
        for j, d in enumerate(det):
            for i, inty in enumerate(inten):
                single = protection_map(cfg, [d], [inty], target)
                assert single.values[0, 0] == full.values[i, j]

    def test_empty_grid_rejected(self):
        cfg = toy_model(3)
        with pytest.raises(DomainError):
            protection_map(cfg, [], [1.0], StateLabel(Manifold.S6, 4, 0))

    def test_axes_must_increase(self):
        with pytest.raises(DomainError):
            ProtectionMap(
                detuning_axis=np.array([0.0, -1.0]),
                intensity_axis=np.array([1.0, 2.0]),
                values=np.zeros((2, 2)),
                target=StateLabel(Manifold.S6, 4, 0),
            )
