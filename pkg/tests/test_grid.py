import math

import numpy as np
import pytest
from scipy.integrate import quad

from kawafd import (AMPLITUDE, ConfigurationError, GridFunction,
                    SamplingError, UsageError, exact_soliton, inner_h,
                    make_grid, norm_h, sample)
from conftest import random_gf


class TestMakeGrid:
    def test_unit_interval(self):
        g = make_grid(0, 1, 100)
        assert g.dx == pytest.approx(0.01, rel=1e-15)

    def test_soliton_domain(self):
        g = make_grid(-40, 40, 4000)
        assert g.dx == pytest.approx(0.02, rel=1e-15)

    def test_too_few_cells(self):
        with pytest.raises(ConfigurationError):
            make_grid(0, 1, 4)

    def test_inverted_domain(self):
        with pytest.raises(ConfigurationError):
            make_grid(1, 1, 100)

    def test_nodes_left_closed(self):
        g = make_grid(-2.0, 3.0, 10)
        assert g.nodes.shape == (10,)
        assert g.nodes[0] == -2.0
        assert g.nodes[-1] < 3.0
        assert np.allclose(np.diff(g.nodes), g.dx)


class TestGridFunction:
    def test_periodic_indexing(self, unit_grid, rng):
        u = random_gf(unit_grid, rng)
        n = unit_grid.n
        for i in range(n):
            assert u[i] == u[i + n]
            assert u[i] == u[i - n]

    def test_values_read_only(self, unit_grid, rng):
        u = random_gf(unit_grid, rng)
        with pytest.raises(ValueError):
            u.values[0] = 1.0

    def test_length_mismatch(self, unit_grid):
        with pytest.raises(UsageError):
            GridFunction(unit_grid, np.zeros(5))

    def test_non_finite_rejected(self, unit_grid):
        vals = np.zeros(unit_grid.n)
        vals[3] = np.nan
        with pytest.raises(UsageError, match="node 3"):
            GridFunction(unit_grid, vals)

    def test_arithmetic_requires_same_grid(self, unit_grid, rng):
        u = random_gf(unit_grid, rng)
        v = random_gf(make_grid(0.0, 1.0, 128), rng)
        with pytest.raises(UsageError):
            u + v


class TestSample:
    def test_zero_function(self, unit_grid):
        u = sample(unit_grid, lambda x: 0.0 * x)
        assert not u.values.any()

    def test_sine_values(self):
        g = make_grid(0, 1, 16)
        u = sample(g, lambda x: np.sin(2 * np.pi * x))
        expected = np.sin(2 * np.pi * np.arange(16) / 16)
        assert np.allclose(u.values, expected, rtol=0, atol=1e-15)

    def test_scalar_only_callable(self):
        g = make_grid(0, 1, 16)
        u = sample(g, lambda x: math.sin(2 * math.pi * x))
        expected = np.sin(2 * np.pi * np.arange(16) / 16)
        assert np.allclose(u.values, expected, rtol=0, atol=1e-15)

    def test_soliton_peak_on_node(self):
        g = make_grid(-40, 40, 4000)
        u = sample(g, lambda x: exact_soliton(x, 0.0, 0.0))
        i = int(np.argmax(u.values))
        assert g.nodes[i] == 0.0
        assert u.values[i] == pytest.approx(AMPLITUDE, abs=0.0)
        assert AMPLITUDE == pytest.approx(0.6213018, abs=5e-8)

    def test_non_finite_sample_names_node(self):
        g = make_grid(-1, 1, 8)
        with np.errstate(divide="ignore"):
            with pytest.raises(SamplingError, match="node 4"):
                sample(g, lambda x: 1.0 / x)


class TestInnerProduct:
    def test_ones(self):
        for n in (8, 33, 100):
            g = make_grid(0, 1, n)
            one = GridFunction(g, np.ones(n))
            assert inner_h(one, one) == pytest.approx(1.0, rel=1e-15)

    def test_constant_against_sine(self):
        g = make_grid(0, 1, 32)
        one = GridFunction(g, np.ones(32))
        s = sample(g, lambda x: np.sin(2 * np.pi * x))
        assert abs(inner_h(one, s)) < 1e-15

    def test_matches_plain_summation(self, rng):
        g = make_grid(-3.0, 7.0, 64)
        u, v = random_gf(g, rng), random_gf(g, rng)
        oracle = math.fsum(
            g.dx * ui * vi for ui, vi in zip(u.values, v.values))
        assert inner_h(u, v) == pytest.approx(oracle, rel=1e-15)

    def test_bilinear_and_symmetric(self, unit_grid, rng):
        for _ in range(100):
            u = random_gf(unit_grid, rng)
            v = random_gf(unit_grid, rng)
            w = random_gf(unit_grid, rng)
            a, b = map(float, rng.standard_normal(2))
            lhs = inner_h(a * u + b * v, w)
            rhs = a * inner_h(u, w) + b * inner_h(v, w)
            scale = max(abs(lhs), abs(rhs), 1e-30)
            assert abs(lhs - rhs) / scale < 1e-14
            sym = inner_h(w, a * u + b * v)
            assert abs(lhs - sym) / scale < 1e-14

    def test_grid_mismatch(self, rng):
        u = random_gf(make_grid(0, 1, 16), rng)
        v = random_gf(make_grid(0, 1, 32), rng)
        with pytest.raises(UsageError):
            inner_h(u, v)


class TestNorm:
    def test_zero(self, unit_grid):
        assert norm_h(GridFunction(unit_grid, np.zeros(unit_grid.n))) == 0.0

    def test_ones(self, unit_grid):
        one = GridFunction(unit_grid, np.ones(unit_grid.n))
        assert norm_h(one) == pytest.approx(1.0, rel=1e-15)

    def test_soliton_mass_against_quadrature(self):
        g = make_grid(-40, 40, 4000)
        u = sample(g, lambda x: exact_soliton(x, 0.0, 0.0))
        oracle, err = quad(lambda x: exact_soliton(x, 0.0, 0.0) ** 2,
                           -40, 40, limit=200)
        assert err < 1e-9
        # closed form of the line integral; tails below 1e-12 at the edges
        closed = AMPLITUDE**2 * 2 * math.sqrt(13.0) * 32.0 / 35.0
        assert oracle == pytest.approx(closed, abs=1e-12)
        assert norm_h(u) ** 2 == pytest.approx(oracle, abs=1e-6)

    def test_riemann_convergence_smooth_periodic(self):
        f = lambda x: np.exp(np.sin(2 * np.pi * x))
        oracle, _ = quad(f, 0, 1, limit=200)
        oracle2 = quad(lambda x: f(x) ** 2, 0, 1, limit=200)[0]
        prev = None
        for n in (8, 16, 32):
            g = make_grid(0, 1, n)
            err = abs(norm_h(sample(g, f)) ** 2 - oracle2)
            if prev is not None:
                # at least second order (periodic sums converge faster)
                assert err <= max(prev / 4.0, 5e-15)
            prev = err
