from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from padic_spectral.bases import build_f, build_phi, omega_synthesis
from padic_spectral.functions import (GridFunction, convolve_direct, inner_product, integrate,
                                      norm_squared, pointwise_product)
from padic_spectral.padic import ball_indicator, enumerate_cosets
from padic_spectral.scalars import QuadArray, QuadScalar

from conftest import grids, random_complex

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def cyclic_convolution_oracle(f: np.ndarray, g: np.ndarray, cell: float) -> np.ndarray:
    # B_r / B_l is cyclic with generator p^-r, so convolution is a cyclic one
    return cell * np.fft.ifft(np.fft.fft(f) * np.fft.fft(g))


@st.composite
def exact_function_pairs(draw, max_size: int = 64):
    grid = draw(grids(max_size))
    vals = st.lists(small, min_size=grid.size, max_size=grid.size)
    return grid, GridFunction.from_values(grid, draw(vals)), GridFunction.from_values(grid, draw(vals))


class TestIntegrate:
    def test_constant_on_ball(self):
        assert integrate(GridFunction.constant(enumerate_cosets(2, 1, 0))) == 2

    def test_single_coset(self):
        assert integrate(GridFunction.from_cosets(enumerate_cosets(2, 0, -1), [0])) == F(1, 2)

    def test_omega_has_unit_mass(self):
        assert integrate(omega_synthesis(enumerate_cosets(2, 1, 0))) == 1

    def test_float_backend(self):
        f = GridFunction.constant(enumerate_cosets(3, 1, -1), 1, "float")
        assert integrate(f) == pytest.approx(3)


class TestInnerProduct:
    grid = enumerate_cosets(2, 1, 0)

    def test_f_norm(self):
        f = build_f(1, 0, 0, self.grid)
        assert inner_product(f, f) == F(1, 2)

    def test_f_against_constant(self):
        assert inner_product(build_f(1, 0, 0, self.grid), GridFunction.constant(self.grid)) == 0

    def test_phi_is_normalized(self):
        phi = build_phi(1, 0, 1, self.grid)
        assert inner_product(phi, phi) == 1

    def test_complex_conjugates_first_argument(self):
        f = GridFunction(self.grid, np.array([1j, 0]))
        assert inner_product(f, f) == pytest.approx(1)

    @given(exact_function_pairs(), small)
    def test_linear_and_symmetric(self, pair, c):
        grid, f, g = pair
        h = f * c + g
        assert inner_product(h, g) == inner_product(f, g) * c + inner_product(g, g)
        assert inner_product(f, g) == inner_product(g, f)

    @given(exact_function_pairs())
    def test_positive_definite(self, pair):
        _, f, _ = pair
        n = norm_squared(f)
        assert n.is_rational() and n.a >= 0
        assert (n == 0) == f.data.is_zero()

    @given(exact_function_pairs())
    def test_integral_of_product(self, pair):
        _, f, g = pair
        assert integrate(pointwise_product(f, g)) == inner_product(f, g)


def test_pointwise_square_of_f():
    grid = enumerate_cosets(2, 1, 0)
    f = build_f(1, 0, 0, grid)
    assert (f * f).equals(GridFunction.constant(grid, F(1, 4)))


class TestConvolution:
    def test_indicator_self_convolution(self):
        grid = enumerate_cosets(2, 0, -1)
        e0 = GridFunction.from_cosets(grid, [0])
        assert convolve_direct(e0, e0).values == [F(1, 2), 0]

    def test_constants(self):
        grid = enumerate_cosets(2, 1, 0)
        one = GridFunction.constant(grid)
        assert convolve_direct(one, one).equals(GridFunction.constant(grid, 2))

    @given(exact_function_pairs())
    def test_commutative_exact(self, pair):
        _, f, g = pair
        assert convolve_direct(f, g).equals(convolve_direct(g, f))

    @given(exact_function_pairs(), small)
    def test_bilinear_exact(self, pair, c):
        _, f, g = pair
        assert convolve_direct(f * c + g, g).equals(convolve_direct(f, g) * c + convolve_direct(g, g))

    @given(grids(243), st.integers(0, 2**32 - 1))
    def test_matches_cyclic_oracle(self, grid, seed):
        rng = np.random.default_rng(seed)
        f = GridFunction(grid, random_complex(rng, grid.size))
        g = GridFunction(grid, random_complex(rng, grid.size))
        oracle = cyclic_convolution_oracle(f.data, g.data, float(grid.cell_measure))
        assert np.max(np.abs(convolve_direct(f, g).data - oracle)) < 1e-10


class TestGridFunction:
    def test_from_values_infers_backend(self):
        grid = enumerate_cosets(2, 1, 0)
        assert GridFunction.from_values(grid, [1, F(1, 3)]).exact
        assert not GridFunction.from_values(grid, [1, 0.5]).exact

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            GridFunction.from_values(enumerate_cosets(2, 1, 0), [1, 2, 3])

    def test_evaluation_at_points(self):
        grid = enumerate_cosets(3, 1, 0)
        f = GridFunction.from_values(grid, [0, 1, 2])
        assert f(F(4, 3)) == 1 and f(7) == 0

    def test_indicator_matches_ball(self):
        grid = enumerate_cosets(2, 2, -1)
        f = GridFunction.indicator(grid, F(1, 2), 0)
        expected = [ball_indicator(x, F(1, 2), 0, 2) for x in grid.representatives]
        assert f.values == expected

    @pytest.mark.parametrize("src,dst", [((2, 1, 0), (2, 1, -2)), ((3, 0, -1), (3, 2, -1)), ((2, 0, -1), (2, 2, -2))])
    def test_embedding_replicates_and_extends(self, src, dst):
        a, b = enumerate_cosets(*src), enumerate_cosets(*dst)
        f = GridFunction.from_values(a, range(a.size))
        g = f.embed(b)
        for x, v in zip(b.representatives, g.values):
            assert v == (f(x) if a.contains(x) else 0)
        assert integrate(g) == integrate(f)

    def test_float_and_exact_comparison(self):
        grid = enumerate_cosets(2, 1, 0)
        f = GridFunction(grid, QuadArray.from_scalars([QuadScalar(0, F(1, 2), 2)] * 2, 2))
        assert f.equals(f.to_float(), tol=1e-15)
        assert f.max_abs_diff(f.to_float()) < 1e-15
