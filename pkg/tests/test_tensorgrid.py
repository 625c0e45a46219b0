import numpy as np
import pytest

from dilatlab.tensorgrid import (
    ScalarField,
    excised_volume,
    fd_gradient,
    field_from_function,
    integrate,
    make_grid,
    smooth_cutoff,
)


class TestMakeGrid:
    def test_2d_unit_square(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 3)
        assert grid.npoints == 9
        assert grid.spacing == (0.5, 0.5)

    def test_3d_cube(self):
        grid = make_grid(3, [(-1, 1)] * 3, 5)
        assert grid.npoints == 125
        assert grid.spacing == (0.5, 0.5, 0.5)

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            make_grid(2, [(0, 1), (0, 0)], 3)

    def test_low_resolution_rejected(self):
        with pytest.raises(ValueError):
            make_grid(2, [(0, 1), (0, 1)], 2)

    def test_memory_cap(self):
        with pytest.raises(ValueError, match="cap"):
            make_grid(2, [(0, 1), (0, 1)], 10_000, max_points=10**6)

    def test_row_major_iteration(self):
        grid = make_grid(2, [(0, 1), (0, 2)], 3)
        pts = grid.points()
        # last axis varies fastest
        assert np.allclose(pts[0], [0, 0])
        assert np.allclose(pts[1], [0, 1])
        assert np.allclose(pts[3], [0.5, 0])


class TestFdGradient:
    def test_affine_exact(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 7)
        f = field_from_function(grid, lambda p: 3 * p[:, 0] - 2 * p[:, 1])
        g = fd_gradient(f)
        assert np.allclose(g.values, [3.0, -2.0], atol=1e-13)

    def test_quadratic_oracle(self):
        # analytic derivative of x^2 is 2x; central differences are exact on
        # quadratics, so only rounding remains in the interior
        grid = make_grid(2, [(0, 1), (0, 1)], 101)
        f = field_from_function(grid, lambda p: p[:, 0] ** 2)
        g = fd_gradient(f)
        pts = grid.points()
        interior = (pts[:, 0] > 0) & (pts[:, 0] < 1)
        err = np.abs(g.values[interior, 0] - 2 * pts[interior, 0])
        assert np.max(err) <= 1e-10

    def test_sine_refinement_order(self):
        errors = []
        for res in (33, 65, 129):
            grid = make_grid(2, [(0, 1), (0, 1)], res)
            f = field_from_function(grid, lambda p: np.sin(p[:, 0]))
            g = fd_gradient(f)
            pts = grid.points()
            interior = (pts[:, 0] > 0) & (pts[:, 0] < 1)
            errors.append(np.max(np.abs(g.values[interior, 0] - np.cos(pts[interior, 0]))))
        for e_coarse, e_fine in zip(errors, errors[1:]):
            # halving h quarters the error, within factor 1.2
            assert e_coarse / e_fine == pytest.approx(4.0, rel=0.2)
            assert np.log2(e_coarse / e_fine) >= 1.8

    def test_mask_propagates_to_stencil(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 5)
        excised = np.zeros(25, dtype=bool)
        excised[12] = True  # center point
        f = ScalarField(grid, np.ones(25), excised)
        g = fd_gradient(f)
        blocked = g.excised.reshape(5, 5)
        assert blocked[2, 2] and blocked[1, 2] and blocked[2, 3]
        assert not blocked[0, 0]


class TestIntegrate:
    def test_constant_volume(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 11)
        assert integrate(field_from_function(grid, lambda p: np.ones(len(p)))) == 1.0

    def test_bilinear_exact(self):
        # hand quadrature: int x*y over the unit square = 1/4, and the
        # tensor trapezoid rule is exact for per-axis-affine integrands
        for res in (3, 5, 9):
            grid = make_grid(2, [(0, 1), (0, 1)], res)
            f = field_from_function(grid, lambda p: p[:, 0] * p[:, 1])
            assert integrate(f) == pytest.approx(0.25, abs=1e-14)

    def test_quadratic_oracle(self):
        # int_0^1 x^2 dx = 1/3
        grid = make_grid(2, [(0, 1), (0, 1)], 101)
        f = field_from_function(grid, lambda p: p[:, 0] ** 2)
        assert integrate(f) == pytest.approx(1.0 / 3.0, abs=1e-4)

    def test_masked_points_contribute_zero(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 5)
        excised = np.zeros(25, dtype=bool)
        excised[:5] = True
        f = ScalarField(grid, np.ones(25), excised)
        assert integrate(f) + excised_volume(f) == pytest.approx(1.0, abs=1e-14)

    def test_all_masked_rejected(self):
        grid = make_grid(2, [(0, 1), (0, 1)], 3)
        f = ScalarField(grid, np.zeros(9), np.ones(9, dtype=bool))
        with pytest.raises(ValueError, match="all-masked"):
            integrate(f)


class TestCutoff:
    def test_plateau(self):
        eta = smooth_cutoff((0, 0), 0.2, 0.5)
        assert eta.value(np.array([[0.1, 0.0]])) == 1.0
        assert eta.profile(0.1) == 1.0

    def test_outside_zero_with_flat_derivatives(self):
        eta = smooth_cutoff((0, 0), 0.2, 0.5)
        assert eta.profile(0.5) == 0.0
        assert eta.profile(0.7) == 0.0
        # eta' = eta'' = 0 at r1, checked by finite differences
        h = 1e-5
        d1 = (eta.profile(0.5 + h) - eta.profile(0.5 - h)) / (2 * h)
        d2 = (eta.profile(0.5 + h) - 2 * eta.profile(0.5) + eta.profile(0.5 - h)) / h**2
        assert abs(d1) <= 1e-4
        assert abs(d2) <= 1e-2

    def test_midpoint_half(self):
        # symmetric quintic transition passes through 1/2 at the midpoint
        eta = smooth_cutoff((0.0, 0.0), 0.2, 0.6)
        assert eta.profile(0.4) == pytest.approx(0.5, abs=1e-15)

    def test_sandwich(self):
        eta = smooth_cutoff((0.1, -0.2), 0.15, 0.4)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-1, 1, size=(500, 2))
        vals = eta.value(pts)
        assert np.all(vals >= 0) and np.all(vals <= 1)

    def test_gradient_matches_fd(self):
        eta = smooth_cutoff((0.0, 0.0), 0.2, 0.6)
        rng = np.random.default_rng(5)
        pts = rng.uniform(-0.7, 0.7, size=(200, 2))
        h = 1e-6
        for ax in range(2):
            e = np.zeros(2)
            e[ax] = h
            fd = (eta.value(pts + e) - eta.value(pts - e)) / (2 * h)
            assert np.max(np.abs(fd - eta.gradient(pts)[:, ax])) <= 1e-7

    def test_bad_radii(self):
        with pytest.raises(ValueError):
            smooth_cutoff((0, 0), 0.5, 0.2)

    def test_support_inside(self):
        eta = smooth_cutoff((0, 0), 0.2, 0.5)
        assert eta.support_inside([(-1, 1), (-1, 1)])
        assert not eta.support_inside([(-0.4, 0.4), (-1, 1)])


def test_csv_roundtrip(tmp_path):
    grid = make_grid(2, [(0, 1), (0, 1)], 3)
    f = field_from_function(grid, lambda p: p[:, 0] + 10 * p[:, 1])
    path = tmp_path / "field.csv"
    f.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (9, 3)
    assert np.allclose(data[:, 2], f.values)
