import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagns import (
    Grid,
    State,
    cell_integral,
    cumulative_u_integral,
    du_dx_cells,
    field_min,
    grad_l2_sq,
    node_weights,
    total_energy,
)


class TestGrid:
    def test_layout(self):
        g = Grid(4)
        assert g.dx == 0.25
        assert g.n_nodes == 5
        np.testing.assert_allclose(g.centers, [0.125, 0.375, 0.625, 0.875])
        np.testing.assert_allclose(g.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])
        assert g.dx * g.n_cells == 1.0

    @pytest.mark.parametrize("bad", [0, 1, -3, 2.5, "8"])
    def test_rejects_bad_cell_counts(self, bad):
        with pytest.raises(ValueError):
            Grid(bad)

    def test_node_weights_sum_to_one(self):
        g = Grid(7)
        w = node_weights(g)
        assert w[0] == w[-1] == g.dx / 2
        assert w.sum() == pytest.approx(1.0)


class TestStateValidation:
    def test_accepts_consistent_state(self, grid, uniform_state):
        uniform_state.validate(grid)

    def test_shape_mismatches(self, grid):
        with pytest.raises(ValueError, match="shape"):
            State(0.0, np.ones(3), np.zeros(grid.n_nodes), np.ones(grid.n_cells)).validate(grid)
        with pytest.raises(ValueError, match="shape"):
            State(0.0, np.ones(grid.n_cells), np.zeros(2), np.ones(grid.n_cells)).validate(grid)

    def test_positivity(self, grid, uniform_state):
        uniform_state.v[3] = 0.0
        with pytest.raises(ValueError, match="positive"):
            uniform_state.validate(grid)

    def test_non_finite(self, grid, uniform_state):
        uniform_state.theta[0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            uniform_state.validate(grid)

    def test_copy_is_deep(self, grid, uniform_state):
        clone = uniform_state.copy()
        clone.v[0] = 5.0
        assert uniform_state.v[0] == 1.0


class TestCellIntegral:
    def test_constant_and_zero(self):
        g = Grid(10)
        assert cell_integral(np.ones(10), g) == pytest.approx(1.0)
        assert cell_integral(np.zeros(10), g) == 0.0

    def test_linear_exact_at_two_cells(self):
        g = Grid(2)
        assert cell_integral(g.centers, g) == pytest.approx(0.5)

    @given(a=st.floats(-5, 5), b=st.floats(-5, 5))
    def test_linearity(self, a, b):
        g = Grid(16)
        f1 = np.sin(3 * g.centers)
        f2 = np.cos(2 * g.centers)
        combined = cell_integral(a * f1 + b * f2, g)
        assert combined == pytest.approx(
            a * cell_integral(f1, g) + b * cell_integral(f2, g), rel=1e-12, abs=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cell_integral(np.ones(5), Grid(10))


class TestDuDxCells:
    def test_constant_velocity(self):
        g = Grid(8)
        assert np.all(du_dx_cells(np.full(9, 3.0), g) == 0.0)

    def test_linear_velocity(self):
        g = Grid(8)
        np.testing.assert_allclose(du_dx_cells(g.nodes, g), np.ones(8))

    def test_quadratic_at_two_cells(self):
        g = Grid(2)
        np.testing.assert_allclose(du_dx_cells(g.nodes**2, g), [0.5, 1.5])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            du_dx_cells(np.zeros(5), Grid(8))


class TestGradL2Sq:
    def test_constant_is_zero(self):
        assert grad_l2_sq(np.full(12, 2.5), Grid(12)) == 0.0

    @pytest.mark.parametrize("n", [2, 8, 64])
    def test_linear_profile(self, n):
        g = Grid(n)
        assert grad_l2_sq(g.centers, g) == pytest.approx((n - 1) / n)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            grad_l2_sq(np.ones(3), Grid(4))


class TestTotalEnergy:
    def test_thermal_only(self, grid):
        s = State(0.0, np.ones(grid.n_cells), np.zeros(grid.n_nodes), np.full(grid.n_cells, 0.7))
        assert total_energy(s, grid, 1.0) == pytest.approx(0.7)

    def test_kinetic_only(self, grid):
        s = State(0.0, np.ones(grid.n_cells), np.full(grid.n_nodes, 2.0), np.full(grid.n_cells, 1e-300))
        assert total_energy(s, grid, 1.0) == pytest.approx(2.0)

    def test_unit_rest_state_has_unit_energy(self, grid, uniform_state):
        assert total_energy(uniform_state, grid, 1.0) == pytest.approx(1.0)

    def test_even_in_velocity(self, grid):
        rng = np.random.default_rng(7)
        u = rng.normal(size=grid.n_nodes)
        s1 = State(0.0, np.ones(grid.n_cells), u, np.ones(grid.n_cells))
        s2 = State(0.0, np.ones(grid.n_cells), -u, np.ones(grid.n_cells))
        assert total_energy(s1, grid, 1.0) == total_energy(s2, grid, 1.0)


class TestCumulativeUIntegral:
    def test_zero_difference(self, grid):
        u = np.sin(grid.nodes)
        assert np.all(cumulative_u_integral(u, u, grid) == 0.0)

    def test_constant_difference(self, grid):
        out = cumulative_u_integral(np.ones(grid.n_nodes), np.zeros(grid.n_nodes), grid)
        np.testing.assert_allclose(out, grid.nodes, atol=1e-15)

    def test_linear_difference_two_cells(self):
        g = Grid(2)
        out = cumulative_u_integral(g.nodes, np.zeros(3), g)
        np.testing.assert_allclose(out, [0.0, 0.125, 0.5])

    def test_endpoint_matches_full_trapezoid(self, grid):
        rng = np.random.default_rng(3)
        u = rng.normal(size=grid.n_nodes)
        u0 = rng.normal(size=grid.n_nodes)
        out = cumulative_u_integral(u, u0, grid)
        assert out[-1] == pytest.approx(np.trapezoid(u - u0, dx=grid.dx))

    def test_length_mismatch(self, grid):
        with pytest.raises(ValueError):
            cumulative_u_integral(np.zeros(3), np.zeros(3), grid)


class TestFieldMin:
    def test_values(self):
        assert field_min(np.array([1.0, 2.0, 3.0])) == 1.0
        assert field_min(np.full(4, 0.6)) == 0.6
        assert field_min(np.array([0.3, 0.2, 0.9])) == 0.2

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            field_min(np.array([]))
