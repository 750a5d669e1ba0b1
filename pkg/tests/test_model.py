import numpy as np
import pytest

from hughes1d import DomainError, ModelError, ModelFunctions
from hughes1d.model import linear_constant_cost, linear_reciprocal


@pytest.fixture(scope="module")
def reciprocal():
    return linear_reciprocal(0.99)


def upsilon_closed_form(rho):
    # (1 - 2 rho) / (1 - rho)^2 for the reciprocal-over-linear pair
    return (1.0 - 2.0 * rho) / (1.0 - rho) ** 2


class TestVelocity:
    def test_endpoints(self, reciprocal):
        assert reciprocal.velocity(0.0) == 1.0
        assert reciprocal.velocity(1.0) == 0.0

    def test_linear_value(self, reciprocal):
        assert reciprocal.velocity(0.6) == pytest.approx(0.4, abs=1e-15)

    def test_vectorized(self, reciprocal):
        rho = np.array([0.0, 0.25, 1.0])
        np.testing.assert_allclose(reciprocal.velocity(rho), [1.0, 0.75, 0.0])

    def test_domain_error(self, reciprocal):
        with pytest.raises(DomainError):
            reciprocal.velocity(1.5)
        with pytest.raises(DomainError):
            reciprocal.velocity(-0.1)

    def test_roundoff_excursion_tolerated(self, reciprocal):
        assert reciprocal.velocity(-1e-13) == pytest.approx(1.0, abs=1e-12)


class TestCost:
    def test_unit_cost_at_vacuum(self, reciprocal):
        assert reciprocal.cost(0.0) == 1.0
        assert linear_constant_cost().cost(0.0) == 1.0

    def test_reciprocal_values(self, reciprocal):
        assert reciprocal.cost(0.5) == pytest.approx(2.0, rel=1e-14)
        assert reciprocal.cost(0.9) == pytest.approx(10.0, rel=1e-14)

    def test_domain_error_above_rho_max(self):
        m = linear_reciprocal(0.5)
        with pytest.raises(DomainError):
            m.cost(0.6)

    def test_constant_cost_everywhere_one(self):
        m = linear_constant_cost()
        rho = np.linspace(0.0, 1.0, 11)
        np.testing.assert_array_equal(m.cost(rho), np.ones(11))


class TestUpsilon:
    def test_at_vacuum(self, reciprocal):
        assert reciprocal.upsilon(0.0) == 1.0

    def test_closed_form_values(self, reciprocal):
        assert reciprocal.upsilon(0.5) == pytest.approx(0.0, abs=1e-14)
        assert reciprocal.upsilon(0.25) == pytest.approx(8.0 / 9.0, rel=1e-14)

    def test_matches_closed_form_on_grid(self, reciprocal):
        rho = np.linspace(0.0, 0.95, 200)
        np.testing.assert_allclose(reciprocal.upsilon(rho),
                                   upsilon_closed_form(rho), rtol=1e-13)


class TestDerivedConstants:
    def test_constant_cost_vanishes(self):
        d = linear_constant_cost().derived_constants()
        assert d.lipschitz_L == 0.0
        assert d.big_C == 0.0

    @pytest.mark.parametrize("rho_max, lip, big_c", [
        (0.2, 0.78125, 0.3125),
        (0.5, 8.0, 2.0),
    ])
    def test_reciprocal_values(self, rho_max, lip, big_c):
        d = linear_reciprocal(rho_max).derived_constants()
        assert d.lipschitz_L == pytest.approx(lip, rel=1e-12)
        assert d.big_C == pytest.approx(big_c, rel=1e-12)

    def test_polynomial_cost_maximum(self):
        # c = 1 + rho^2: c'' rho = 2 rho, maximal at rho_max
        m = ModelFunctions(velocity_kind="linear", cost_kind="polynomial",
                           rho_max=0.8, cost_coeffs=(1.0, 0.0, 1.0))
        d = m.derived_constants()
        assert d.lipschitz_L == pytest.approx(1.6, rel=1e-9)
        assert d.big_C == pytest.approx(2 * 0.8 ** 2, rel=1e-12)

    def test_upsilon_handle(self, reciprocal):
        d = reciprocal.derived_constants()
        assert d.upsilon_at(0.25) == pytest.approx(8.0 / 9.0, rel=1e-13)


class TestMonotonicity:
    def test_velocity_strictly_decreasing(self, reciprocal):
        rho = np.linspace(0.0, 1.0, 500)
        assert np.all(np.diff(reciprocal.velocity(rho)) < 0.0)

    def test_cost_increasing_upsilon_decreasing(self, reciprocal):
        rho = np.linspace(0.0, reciprocal.rho_max, 500)
        assert np.all(np.diff(reciprocal.cost(rho)) > 0.0)
        assert np.all(np.diff(reciprocal.upsilon(rho)) < 0.0)

    def test_flux_unimodal_around_stagnation(self, reciprocal):
        rho = np.linspace(0.0, 1.0, 501)
        fp = reciprocal.flux_prime(rho)
        sign = (reciprocal.rho_hat - rho) * fp
        interior = np.abs(rho - reciprocal.rho_hat) > 1e-3
        assert np.all(sign[interior & (rho > 0) & (rho < 1)] > 0.0)


class TestDerivativeConsistency:
    @pytest.mark.parametrize("rho_max", [0.5, 0.9, 0.99])
    def test_cost_derivatives_match_central_differences(self, rho_max):
        # steps shrink with the distance to the cost blow-up at rho = 1 to
        # keep truncation and roundoff balanced near the singularity
        m = linear_reciprocal(rho_max)
        grid = np.linspace(1e-3, rho_max - 1e-3, 1000)
        h1 = 1e-5 * (1.0 - grid)
        h2 = 5e-4 * (1.0 - grid)
        fd1 = (m.cost(grid + h1) - m.cost(grid - h1)) / (2 * h1)
        fd2 = (m.cost(grid + h2) - 2 * m.cost(grid)
               + m.cost(grid - h2)) / h2 ** 2
        np.testing.assert_allclose(m.cost_prime(grid), fd1, rtol=1e-6)
        np.testing.assert_allclose(m.cost_second(grid), fd2, rtol=1e-6)


class TestLipschitzBound:
    def test_upsilon_lipschitz_on_random_pairs(self):
        m = linear_reciprocal(0.9)
        lip = m.derived_constants().lipschitz_L
        rng = np.random.default_rng(7)
        a = rng.uniform(0.0, m.rho_max, 10_000)
        b = rng.uniform(0.0, m.rho_max, 10_000)
        lhs = np.abs(m.upsilon(a) - m.upsilon(b))
        assert np.all(lhs <= lip * np.abs(a - b) + 1e-12)


class TestPolynomialModels:
    def test_valid_polynomial_velocity(self):
        # v = (1 - rho)(1 + rho/2) = 1 + rho/2 - 3 rho^2 / 2 ... expanded below
        m = ModelFunctions(velocity_kind="polynomial", cost_kind="reciprocal",
                           rho_max=0.9, velocity_coeffs=(1.0, -0.5, -0.5))
        assert m.v_max == 1.0
        assert m.velocity(1.0) == pytest.approx(0.0, abs=1e-12)
        # f' = 1 - rho - 1.5 rho^2 vanishes at (sqrt(7) - 1)/3
        assert m.rho_hat == pytest.approx((np.sqrt(7.0) - 1.0) / 3.0, abs=1e-10)

    def test_increasing_velocity_rejected(self):
        with pytest.raises(ModelError):
            ModelFunctions(velocity_kind="polynomial", cost_kind="constant",
                           rho_max=1.0, velocity_coeffs=(0.0, 1.0))

    def test_cost_must_start_at_one(self):
        with pytest.raises(ModelError):
            ModelFunctions(cost_kind="polynomial", rho_max=0.9,
                           cost_coeffs=(2.0, 0.0, 1.0))

    def test_reciprocal_needs_rho_max_below_one(self):
        with pytest.raises(ModelError):
            ModelFunctions(cost_kind="reciprocal", rho_max=1.0)

    def test_rho_max_range_checked(self):
        with pytest.raises(ModelError):
            ModelFunctions(rho_max=1.5)
