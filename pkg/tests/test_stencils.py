from fractions import Fraction

import numpy as np
import pytest

from kawafd import (GridFunction, UsageError, inner_h, make_grid, norm_h,
                    sample)
from kawafd.stencils import (BUILTIN_NAMES, Stencil, apply, apply_values,
                             builtin, compose, identity, symbol, to_dense)
from conftest import random_gf


def impulse(grid, at=0):
    v = np.zeros(grid.n)
    v[at] = 1.0
    return GridFunction(grid, v)


class TestBuiltins:
    def test_names(self):
        assert set(BUILTIN_NAMES) == {
            "dplus", "dminus", "dzero", "laplace", "airy", "kawahara"}

    def test_dzero(self):
        s = builtin("dzero")
        assert s.offsets == (-1, 1)
        assert s.coeffs == (Fraction(-1, 2), Fraction(1, 2))
        assert s.dx_power == 1

    def test_airy_from_impulse_composition(self):
        # independent derivation: push a unit impulse through D- (D+)^2
        g = make_grid(0.0, 16.0, 16)  # dx = 1, so raw coefficients appear
        u = impulse(g)
        for s in (builtin("dplus"), builtin("dplus"), builtin("dminus")):
            u = apply(s, u)
        airy = builtin("airy")
        expected = np.zeros(16)
        for off, c in zip(airy.offsets, airy.fcoeffs):
            expected[-off % 16] = c  # row of the adjoint action on impulses
        assert np.array_equal(u.values, expected)

    def test_airy_closed_form(self):
        s = builtin("airy")
        assert s.offsets == (-1, 0, 1, 2)
        assert s.coeffs == (Fraction(-1), Fraction(3), Fraction(-3),
                            Fraction(1))
        assert s.dx_power == 3

    def test_kawahara_closed_form(self):
        s = builtin("kawahara")
        assert s.offsets == (-2, -1, 0, 1, 2, 3)
        assert s.coeffs == tuple(
            Fraction(c) for c in (-1, 5, -10, 10, -5, 1))
        assert s.dx_power == 5

    def test_unknown_name(self):
        with pytest.raises(UsageError, match="dplus"):
            builtin("dfour")


class TestValidation:
    def test_unsorted_offsets(self):
        with pytest.raises(UsageError):
            Stencil((1, -1), (Fraction(1), Fraction(-1)), 1)

    def test_zero_coefficient(self):
        with pytest.raises(UsageError):
            Stencil((-1, 1), (Fraction(0), Fraction(1)), 0)

    def test_differencing_must_kill_constants(self):
        with pytest.raises(UsageError):
            Stencil((0, 1), (Fraction(1), Fraction(1)), 1)

    def test_identity(self):
        s = identity()
        assert (s.offsets, s.coeffs, s.dx_power) == ((0,), (Fraction(1),), 0)


class TestCompose:
    def test_shift_commutativity(self):
        assert compose(builtin("dplus"), builtin("dminus")) == \
            compose(builtin("dminus"), builtin("dplus"))

    def test_laplace_is_dplus_dminus(self):
        assert compose(builtin("dplus"), builtin("dminus")) == \
            builtin("laplace")

    def test_airy_is_dminus_dplus_squared(self):
        dplus2 = compose(builtin("dplus"), builtin("dplus"))
        assert compose(builtin("dminus"), dplus2) == builtin("airy")

    def test_kawahara_is_dplus3_dminus2(self):
        dplus3 = compose(builtin("dplus"),
                         compose(builtin("dplus"), builtin("dplus")))
        dminus2 = compose(builtin("dminus"), builtin("dminus"))
        assert compose(dplus3, dminus2) == builtin("kawahara")

    def test_identity_neutral(self):
        for name in BUILTIN_NAMES:
            s = builtin(name)
            assert compose(s, identity()) == s
            assert compose(identity(), s) == s

    def test_random_commutativity(self, rng):
        for _ in range(20):
            def rand_stencil():
                k = int(rng.integers(1, 4))
                offs = sorted(rng.choice(range(-3, 4), size=k, replace=False))
                cfs = [Fraction(int(rng.integers(-5, 6)) or 1)
                       for _ in offs]
                return Stencil(tuple(int(o) for o in offs), tuple(cfs), 0)
            s1, s2 = rand_stencil(), rand_stencil()
            assert compose(s1, s2) == compose(s2, s1)

    def test_convolution_oracle(self, rng):
        # coefficient sequences multiply like polynomials
        s1 = builtin("airy")
        s2 = builtin("laplace")
        c = compose(s1, s2)
        lo = s1.offsets[0] + s2.offsets[0]
        poly = np.convolve(s1.fcoeffs, s2.fcoeffs)
        got = np.zeros_like(poly)
        for off, cf in zip(c.offsets, c.fcoeffs):
            got[off - lo] = cf
        assert np.array_equal(got, poly)


class TestApply:
    def test_constant_annihilated(self, unit_grid):
        const = GridFunction(unit_grid, np.full(unit_grid.n, 2.5))
        for name in BUILTIN_NAMES:
            out = apply(builtin(name), const)
            assert np.max(np.abs(out.values)) < 1e-12

    def test_dzero_on_sine(self):
        g = make_grid(0, 1, 64)
        u = sample(g, lambda x: np.sin(2 * np.pi * x))
        got = apply(builtin("dzero"), u)
        # trigonometric identity oracle
        expected = (np.cos(2 * np.pi * g.nodes)
                    * np.sin(2 * np.pi * g.dx) / g.dx)
        assert np.allclose(got.values, expected, rtol=0, atol=1e-12)

    def test_kawahara_impulse_row(self):
        g = make_grid(0.0, 16.0, 16)
        out = apply(builtin("kawahara"), impulse(g))
        expected = np.zeros(16)
        for off, c in zip(builtin("kawahara").offsets,
                          builtin("kawahara").fcoeffs):
            expected[-off % 16] = c
        assert np.array_equal(out.values, expected)

    def test_grid_too_small(self):
        wide = Stencil(tuple(range(-4, 5)),
                       tuple(Fraction(c) for c in (1, -8, 28, -56, 70,
                                                   -56, 28, -8, 1)), 0)
        g = make_grid(0, 1, 8)
        with pytest.raises(UsageError):
            apply(wide, random_gf(g, np.random.default_rng(0)))


class TestSymbol:
    def test_mode_zero(self, unit_grid):
        for name in BUILTIN_NAMES:
            assert symbol(builtin(name), unit_grid, 0) == 0

    def test_dzero_symbol(self):
        g = make_grid(0, 1, 32)
        for k in range(32):
            got = symbol(builtin("dzero"), g, k)
            expected = 1j * np.sin(2 * np.pi * k / 32) / g.dx
            assert got == pytest.approx(expected, abs=1e-12 / g.dx)

    def test_laplace_symbol_real_nonpositive(self):
        g = make_grid(0, 1, 32)
        for k in range(32):
            got = symbol(builtin("laplace"), g, k)
            expected = -4.0 / g.dx**2 * np.sin(np.pi * k / 32) ** 2
            assert abs(got.imag) < 1e-9
            assert got.real == pytest.approx(expected, abs=1e-9)
            assert got.real <= 1e-12

    def test_out_of_range(self, unit_grid):
        with pytest.raises(UsageError):
            symbol(builtin("dzero"), unit_grid, unit_grid.n)

    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_symbol_matches_apply_on_modes(self, n):
        g = make_grid(0, 1, n)
        j = np.arange(n)
        for name in BUILTIN_NAMES:
            s = builtin(name)
            # round-off scale: the coefficient mass that cancels
            coeff_mass = float(np.sum(np.abs(s.fcoeffs))) / g.dx**s.dx_power
            for k in range(n):
                mode = np.exp(2j * np.pi * k * j / n)
                applied = (apply_values(s, mode.real, g.dx)
                           + 1j * apply_values(s, mode.imag, g.dx))
                sym = symbol(s, g, k)
                scale = max(np.max(np.abs(applied)), coeff_mass)
                assert np.max(np.abs(applied - sym * mode)) / scale < 1e-12


class TestQuadraticForms:
    def test_summation_by_parts(self, unit_grid, rng):
        dplus, dminus = builtin("dplus"), builtin("dminus")
        for _ in range(100):
            u = random_gf(unit_grid, rng)
            v = random_gf(unit_grid, rng)
            lhs = inner_h(u, apply(dplus, v))
            rhs = -inner_h(apply(dminus, u), v)
            assert abs(lhs - rhs) / max(abs(lhs), abs(rhs)) < 1e-13

    @pytest.mark.parametrize("n", [16, 64, 256])
    def test_airy_and_kawahara_forms(self, n, rng):
        g = make_grid(0, 1, n)
        airy, kawa, lap = (builtin("airy"), builtin("kawahara"),
                           builtin("laplace"))
        for _ in range(100):
            u = random_gf(g, rng)
            q1 = inner_h(u, apply(airy, u))
            ref1 = g.dx / 2 * norm_h(apply(lap, u)) ** 2
            assert abs(q1 - ref1) / abs(ref1) < 1e-12
            q2 = inner_h(u, apply(kawa, u))
            ref2 = -g.dx / 2 * norm_h(apply(airy, u)) ** 2
            assert abs(q2 - ref2) / abs(ref2) < 1e-12


class TestDenseForm:
    def test_matches_apply(self, rng):
        g = make_grid(0, 2, 16)
        u = random_gf(g, rng)
        for name in BUILTIN_NAMES:
            s = builtin(name)
            assert np.allclose(to_dense(s, g) @ u.values,
                               apply(s, u).values, rtol=1e-13, atol=1e-10)
