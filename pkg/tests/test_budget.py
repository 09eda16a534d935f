import math

import pytest

from sseit.budget import (
    BudgetInput,
    max_array,
    rescatter_probability,
    resonant_cross_section,
    total_error,
)
from sseit.errors import DomainError

WAVELENGTH = 852.35e-9
SPACING = 5e-6
PHOTONS = 100.0
SUPPRESSION = 8e-5


def budget(dim, *, n_shells=None, error_target=None, suppression=SUPPRESSION,
           spacing=SPACING, photons=PHOTONS, wavelength=WAVELENGTH):
    return BudgetInput(
        wavelength=wavelength, lattice_spacing=spacing, photons=photons,
        suppression=suppression, dimensionality=dim,
        n_shells=n_shells, error_target=error_target,
    )


class TestCrossSection:
    def test_d2_wavelength(self):
        # direct evaluation of lambda^2 / (2 pi)
        assert resonant_cross_section(852.35e-9) == pytest.approx(1.156e-13, rel=1e-3)

    def test_quadratic_scaling(self):
        assert resonant_cross_section(2.0) == pytest.approx(4 * resonant_cross_section(1.0))

    def test_vanishes_with_wavelength(self):
        assert resonant_cross_section(1e-12) < 1e-24


class TestRescatterProbability:
    def test_adjacent_cesium_atom(self):
        p = rescatter_probability(852.35e-9, 5e-6)
        assert 3.5e-4 <= p <= 4.2e-4

    def test_inverse_square(self):
        p1 = rescatter_probability(852.35e-9, 5e-6)
        p2 = rescatter_probability(852.35e-9, 10e-6)
        assert p2 == pytest.approx(p1 / 4)

    def test_error_on_adjacent_atom_with_100_photons(self):
        p = rescatter_probability(852.35e-9, 5e-6)
        assert 0.035 <= p * 100 <= 0.042


class TestTotalError:
    def test_zero_suppression_gives_zero(self):
        for dim in (2, 3):
            res = total_error(budget(dim, n_shells=10, suppression=0.0))
            assert res.total_error == 0.0

    def test_3d_shells_add_constant_error(self):
        errors = [total_error(budget(3, n_shells=n)).total_error for n in range(1, 8)]
        increments = [b - a for a, b in zip(errors, errors[1:])]
        assert all(inc == pytest.approx(increments[0], rel=1e-12) for inc in increments)

    def test_2d_sum_is_harmonic_number(self):
        # analytic summation with r_i = i L
        n = 40
        res = total_error(budget(2, n_shells=n))
        coef = WAVELENGTH**2 * SUPPRESSION * PHOTONS / (4 * math.pi * SPACING**2)
        harmonic = sum(1.0 / i for i in range(1, n + 1))
        assert res.total_error == pytest.approx(coef * harmonic, rel=1e-12)

    def test_per_shell_scaling(self):
        res = total_error(budget(2, n_shells=10))
        for i, err in enumerate(res.per_shell_errors, start=1):
            assert err == pytest.approx(res.per_shell_errors[0] / i, rel=1e-12)

    def test_total_is_sum_of_shells(self):
        for dim in (2, 3):
            res = total_error(budget(dim, n_shells=17))
            assert res.total_error == pytest.approx(sum(res.per_shell_errors), rel=1e-12)

    def test_monotonicity(self):
        base = total_error(budget(3, n_shells=5)).total_error
        assert total_error(budget(3, n_shells=6)).total_error > base
        assert total_error(budget(3, n_shells=5, suppression=2 * SUPPRESSION)).total_error > base
        assert total_error(budget(3, n_shells=5, photons=2 * PHOTONS)).total_error > base
        assert total_error(budget(3, n_shells=5, spacing=2 * SPACING)).total_error < base


class TestMaxArray:
    def test_3d_at_1e4_error_gives_125_atoms(self):
        res = max_array(budget(3, error_target=1e-4))
        assert res.atoms == 125

    def test_3d_at_1e3_error_gives_157464_atoms(self):
        res = max_array(budget(3, error_target=1e-3))
        assert res.atoms == 157464
        assert round(2 * res.n_shells_continuous) == 54

    def test_2d_at_1e4_error_gives_62500_atoms(self):
        res = max_array(budget(2, error_target=1e-4))
        assert res.atoms == 62500

    def test_returned_shell_count_respects_target(self):
        for dim, target in ((2, 1e-4), (3, 1e-4), (3, 1e-3), (2, 1.5e-4)):
            res = max_array(budget(dim, error_target=target))
            check = total_error(budget(dim, n_shells=res.n_shells))
            assert check.total_error <= target * (1 + 1e-9)
            over = total_error(budget(dim, n_shells=res.n_shells + 1))
            assert over.total_error > target

    def test_tiny_budget_gives_empty_array(self):
        res = max_array(budget(3, error_target=1e-9))
        assert res.n_shells == 0
        assert res.atoms == 0


class TestValidation:
    def test_requires_exactly_one_mode(self):
        with pytest.raises(DomainError):
            budget(3, n_shells=5, error_target=1e-4)
        with pytest.raises(DomainError):
            budget(3)

    def test_rejects_bad_dimensionality(self):
        with pytest.raises(DomainError):
            BudgetInput(
                wavelength=WAVELENGTH, lattice_spacing=SPACING, photons=PHOTONS,
                suppression=SUPPRESSION, dimensionality=4, n_shells=3,
            )

    def test_rejects_negative_distance(self):
        with pytest.raises(DomainError):
            rescatter_probability(WAVELENGTH, -1e-6)
