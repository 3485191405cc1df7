import math

import numpy as np
import pytest

from immersedfem import (FeSpace, SphericalInterface, WeightedNormParams,
                         build_uniform_mesh, classify_cells, discrete_norm, eoc,
                         interpolate, reference_solution, weight_integral,
                         weighted_error, weighted_errors)

CIRCLE = SphericalInterface((0.3, 0.3), 0.2)
FAR = SphericalInterface((10.0, 10.0), 0.2)


class ConstantField:
    """Test hook standing in for an exact solution: constant value."""

    def __init__(self, value):
        self._value = value

    def values(self, points, side=None):
        return np.full(np.atleast_2d(points).shape[0], self._value)

    def gradients(self, points, side=None):
        return np.zeros_like(np.atleast_2d(points))

    def value(self, x):
        return self._value


class BilinearField:
    def values(self, points, side=None):
        points = np.atleast_2d(points)
        return points[:, 0] * points[:, 1]

    def gradients(self, points, side=None):
        points = np.atleast_2d(points)
        return np.column_stack([points[:, 1], points[:, 0]])

    def value(self, x):
        return x[0] * x[1]


class TestParams:
    def test_alpha_range(self):
        WeightedNormParams(alpha=0.49)
        WeightedNormParams(alpha=-0.49)
        with pytest.raises(ValueError):
            WeightedNormParams(alpha=0.5)
        with pytest.raises(ValueError):
            WeightedNormParams(alpha=-0.6)
        with pytest.raises(ValueError):
            WeightedNormParams(alpha=0.0, m=2)


class TestExactSolutions:
    def test_2d_values(self):
        exact = reference_solution(CIRCLE)
        assert exact.value([0.3, 0.3]) == pytest.approx(-math.log(0.2), abs=1e-14)
        assert exact.value([0.7, 0.3]) == pytest.approx(-math.log(0.4), abs=1e-14)
        assert np.allclose(exact.gradient([0.3, 0.31]), 0.0)

    def test_3d_values(self):
        sphere = SphericalInterface((0.3, 0.3, 0.3), 0.2)
        exact = reference_solution(sphere)
        assert exact.value([0.3, 0.3, 0.3]) == pytest.approx(5.0, abs=1e-12)
        assert exact.value([0.8, 0.3, 0.3]) == pytest.approx(2.0, abs=1e-12)

    def test_continuity_across_surface(self):
        rng = np.random.default_rng(2)
        for interface in (CIRCLE, SphericalInterface((0.3, 0.3, 0.3), 0.2)):
            exact = reference_solution(interface)
            if interface.dim == 2:
                theta = rng.uniform(0.0, 2.0 * math.pi, size=100)
                on_surface = interface.center + 0.2 * np.column_stack(
                    [np.cos(theta), np.sin(theta)])
            else:
                from immersedfem import surface_samples
                on_surface = surface_samples(interface, 100)
            inner = exact.values(on_surface, side=np.full(100, -1))
            outer = exact.values(on_surface, side=np.full(100, 1))
            assert np.max(np.abs(inner - outer)) <= 1e-12

    def test_outside_gradient_formula(self):
        exact = reference_solution(CIRCLE)
        x = np.array([0.7, 0.3])
        r = x - CIRCLE.center
        assert np.allclose(exact.gradient(x), -r / np.dot(r, r), atol=1e-14)


class TestWeightedError:
    def test_interpolation_rate_smooth_problem(self):
        # interface far outside: the field is smooth, plain Q1 rate is 2
        exact = reference_solution(FAR)
        errors = []
        for n in (8, 16, 32):
            space = FeSpace(build_uniform_mesh(2, n), 1)
            coeffs = interpolate(space, exact.value)
            params = WeightedNormParams(alpha=0.0, m=0)
            errors.append(weighted_error(space, coeffs, exact, FAR, params))
        rates = [math.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
        assert all(1.85 <= r <= 2.15 for r in rates)

    def test_exact_fe_function_gives_zero(self):
        field = BilinearField()
        space = FeSpace(build_uniform_mesh(2, 4), 1)
        coeffs = interpolate(space, field.value)
        for alpha in (0.0, 0.3, 0.49):
            for m in (0, 1):
                params = WeightedNormParams(alpha=alpha, m=m)
                err = weighted_error(space, coeffs, field, CIRCLE, params)
                assert err <= 1e-13

    def test_constant_one_recovers_domain_measure(self):
        # error field == 1 with alpha = 0 integrates the unit box
        space = FeSpace(build_uniform_mesh(2, 4), 1)
        zero = np.zeros(space.n_dofs)
        params = WeightedNormParams(alpha=0.0, m=0)
        err = weighted_error(space, zero, ConstantField(1.0), CIRCLE, params)
        assert err == pytest.approx(1.0, abs=1e-12)

    def test_quadrature_robustness(self):
        exact = reference_solution(CIRCLE)
        space = FeSpace(build_uniform_mesh(2, 16), 1)
        coeffs = interpolate(space, exact.value)
        for alpha, m in ((0.0, 0), (0.49, 1)):
            base = weighted_errors(space, coeffs, exact, CIRCLE, [alpha],
                                   quad_points=4)[(alpha, m)]
            fine = weighted_errors(space, coeffs, exact, CIRCLE, [alpha],
                                   quad_points=8)[(alpha, m)]
            assert abs(fine - base) <= 1e-3 * base

    def test_weight_monotonicity_in_alpha(self):
        # max distance to the circle inside the unit square is < 1, so the
        # weighted norm decreases as alpha grows
        exact = reference_solution(CIRCLE)
        space = FeSpace(build_uniform_mesh(2, 16), 1)
        coeffs = interpolate(space, exact.value)
        errs = weighted_errors(space, coeffs, exact, CIRCLE, [0.0, 0.25, 0.49])
        for m in (0, 1):
            assert errs[(0.49, m)] <= errs[(0.25, m)] <= errs[(0.0, m)]

    def test_embedding_constant(self):
        exact = reference_solution(CIRCLE)
        space = FeSpace(build_uniform_mesh(2, 16), 1)
        coeffs = interpolate(space, exact.value)
        corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        max_dist = float(np.max(CIRCLE.distance(corners)))
        assert max_dist == pytest.approx(math.hypot(0.7, 0.7) - 0.2, abs=1e-14)
        errs = weighted_errors(space, coeffs, exact, CIRCLE, [0.0, 0.25])
        assert errs[(0.25, 0)] <= max_dist**0.25 * errs[(0.0, 0)] * (1.0 + 1e-12)


class TestWeightIntegral:
    def test_alpha_zero_gives_volume(self):
        mesh = build_uniform_mesh(2, 8)
        assert weight_integral(CIRCLE, 0.0, mesh) == pytest.approx(1.0, abs=1e-13)

    def test_against_grid_oracle(self):
        # oracle: midpoint rule on a 4096^2 pixel grid
        ticks = (np.arange(4096) + 0.5) / 4096
        gx, gy = np.meshgrid(ticks, ticks)
        pixels = np.column_stack([gx.ravel(), gy.ravel()])
        d = CIRCLE.distance(pixels)
        mesh = build_uniform_mesh(2, 16)
        for alpha in (0.49, 0.25):
            oracle = float(np.mean(d ** (2.0 * alpha)))
            value = weight_integral(CIRCLE, alpha, mesh)
            assert value == pytest.approx(oracle, abs=5e-4)

    def test_quadrature_refinement_converges(self):
        mesh = build_uniform_mesh(2, 16)
        coarse = weight_integral(CIRCLE, 0.49, mesh, quad_points=3, cut_depth=4)
        fine = weight_integral(CIRCLE, 0.49, mesh, quad_points=5, cut_depth=8)
        assert abs(fine - coarse) < 1e-4

    def test_monotone_between_exponents(self):
        mesh = build_uniform_mesh(2, 16)
        v0 = weight_integral(CIRCLE, 0.0, mesh)
        v25 = weight_integral(CIRCLE, 0.25, mesh)
        v49 = weight_integral(CIRCLE, 0.49, mesh)
        assert v49 < v25 < v0

    def test_rejects_non_integrable_exponent(self):
        mesh = build_uniform_mesh(2, 8)
        with pytest.raises(ValueError):
            weight_integral(CIRCLE, -0.5, mesh)


class TestDiscreteNorm:
    def test_alpha_zero_matches_l2(self):
        rng = np.random.default_rng(31)
        mesh = build_uniform_mesh(2, 8)
        space = FeSpace(mesh, 1)
        cls = classify_cells(mesh, CIRCLE, math.sqrt(2.0))
        coeffs = rng.standard_normal(space.n_dofs)
        value = discrete_norm(space, coeffs, cls, 0.0)
        # independent path: weighted error of u_h against the zero field
        params = WeightedNormParams(alpha=0.0, m=0)
        plain_l2 = weighted_error(space, coeffs, ConstantField(0.0), CIRCLE, params)
        assert value == pytest.approx(plain_l2, abs=1e-12)

    def test_zero_function(self):
        mesh = build_uniform_mesh(2, 8)
        space = FeSpace(mesh, 1)
        cls = classify_cells(mesh, CIRCLE, math.sqrt(2.0))
        assert discrete_norm(space, np.zeros(space.n_dofs), cls, 0.49) == 0.0

    @pytest.mark.parametrize("alpha", [0.25, 0.49])
    def test_equivalent_to_weighted_l2(self, alpha):
        # cellwise-frozen weight versus the pointwise weight: h-independent
        # two-sided bounds
        rng = np.random.default_rng(13)
        for n in (8, 16, 32):
            mesh = build_uniform_mesh(2, n)
            space = FeSpace(mesh, 1)
            cls = classify_cells(mesh, CIRCLE, math.sqrt(2.0))
            for _ in range(10):
                coeffs = rng.uniform(-1.0, 1.0, size=space.n_dofs)
                dn = discrete_norm(space, coeffs, cls, alpha)
                wn = weighted_errors(space, coeffs, ConstantField(0.0), CIRCLE,
                                     [alpha])[(alpha, 0)]
                assert 0.2 <= dn / wn <= 5.0


class TestEoc:
    def test_halving_rates(self):
        assert eoc([(0.5, 0.4), (0.25, 0.1)]) == [pytest.approx(2.0)]

    def test_equal_errors(self):
        assert eoc([(0.5, 0.3), (0.25, 0.3)]) == [pytest.approx(0.0)]

    def test_sqrt2_ratio(self):
        e = 0.7
        rates = eoc([(0.5, e), (0.25, e / math.sqrt(2.0))])
        assert rates == [pytest.approx(0.5)]

    def test_rejects_non_halving(self):
        with pytest.raises(ValueError):
            eoc([(0.5, 0.4), (0.3, 0.1)])

    def test_zero_error_yields_absent_rate(self):
        assert eoc([(0.5, 0.4), (0.25, 0.0)]) == [None]
