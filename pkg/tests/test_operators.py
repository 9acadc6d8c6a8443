from __future__ import annotations

import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from padic_spectral.bases import (build_phi, enumerate_phi_basis, enumerate_wavelet_basis, scale_window)
from padic_spectral.fourier import character_function, frequency_grid
from padic_spectral.functions import GridFunction
from padic_spectral.operators import (KernelSpec, boundary_shift, character_eigenvalue, expm, gamma_p,
                                      kernel_eigenvalue, kernel_matrix, matrix_exponential_apply,
                                      vladimirov_eigenvalue_Br, vladimirov_eigenvalue_Qp,
                                      vladimirov_kernel_spec, vladimirov_matrix)
from padic_spectral.padic import enumerate_cosets, padic_norm
from padic_spectral.scalars import QuadArray

from conftest import SMALL_GRIDS, grids


def brute_force_vladimirov(grid, alpha):
    """Independent float assembly straight from the kernel definition."""
    p = grid.p
    gam = (1 - p ** (-alpha - 1)) / (1 - p**alpha)
    reps = grid.representatives
    n = grid.size
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                a[i, j] = -(1 / gam) * float(grid.cell_measure) * float(padic_norm(reps[i] - reps[j], p)) ** (-alpha - 1)
        a[i, i] = -a[i].sum()
    return a


class TestGamma:
    @pytest.mark.parametrize("p,alpha,expected", [(2, 1, F(-3, 4)), (3, 1, F(-4, 9)), (5, 2, F(-124, 3000))])
    def test_integer_alpha(self, p, alpha, expected):
        assert gamma_p(p, alpha) == expected

    def test_half_alpha_against_high_precision(self):
        mpmath.mp.dps = 40
        ref = (1 - mpmath.mpf(2) ** mpmath.mpf(-1.5)) / (1 - mpmath.sqrt(2))
        assert abs(gamma_p(2, 0.5) - float(ref)) < 1e-14
        assert round(gamma_p(2, 0.5), 5) == -1.56066

    @pytest.mark.parametrize("alpha", [0, -1, -0.5])
    def test_rejects_non_positive(self, alpha):
        with pytest.raises(ValueError):
            gamma_p(2, alpha)

    @given(st.sampled_from([2, 3, 5, 7]), st.floats(0.05, 5))
    def test_always_negative(self, p, alpha):
        assert gamma_p(p, alpha) < 0


class TestVladimirovMatrix:
    def test_two_by_two(self):
        a = vladimirov_matrix(enumerate_cosets(2, 1, 0), 1)
        assert a.entries == QuadArray.from_scalars([[F(-1, 3), F(1, 3)], [F(1, 3), F(-1, 3)]], 2)

    def test_phi_example(self):
        grid = enumerate_cosets(2, 1, 0)
        phi = build_phi(1, 0, 1, grid)
        assert vladimirov_matrix(grid, 1).apply(phi).equals(phi * F(-2, 3))

    @pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
    @pytest.mark.parametrize("alpha", [1, 2, 0.5, 1.7])
    def test_matches_brute_force(self, p, r, l, alpha):
        grid = enumerate_cosets(p, r, l)
        a = vladimirov_matrix(grid, alpha, "float").to_numpy()
        assert np.allclose(a, brute_force_vladimirov(grid, alpha), rtol=1e-13, atol=1e-13)

    @pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
    def test_constants_are_annihilated(self, p, r, l):
        grid = enumerate_cosets(p, r, l)
        a = vladimirov_matrix(grid, 1)
        assert a.apply(GridFunction.constant(grid)).data.is_zero()
        assert a.is_symmetric()

    def test_exact_backend_needs_integer_alpha(self):
        with pytest.raises(ValueError):
            vladimirov_matrix(enumerate_cosets(2, 1, 0), 0.5, "exact")


class TestEigenvalues:
    def test_examples(self):
        assert vladimirov_eigenvalue_Br(1, 1, 1, 2) == F(-2, 3)
        assert vladimirov_eigenvalue_Br(1, 2, 1, 2) == F(-5, 6)
        assert vladimirov_eigenvalue_Qp(1, 1, 2) == -1

    def test_five_sixths_from_the_matrix(self):
        from padic_spectral.bases import build_f

        grid = enumerate_cosets(2, 2, 0)
        f = build_f(1, 0, 0, grid)
        assert vladimirov_matrix(grid, 1).apply(f).equals(f * F(-5, 6))

    @pytest.mark.parametrize("p,alpha,gamma", [(2, 1, 1), (3, 2, 0), (5, 1, -2)])
    def test_ball_spectrum_converges_to_qp(self, p, alpha, gamma):
        gaps = [vladimirov_eigenvalue_Br(gamma, r, alpha, p) - vladimirov_eigenvalue_Qp(gamma, alpha, p)
                for r in range(max(gamma, 1), 40)]
        assert 0 < gaps[-1] < F(1, 10**11)
        assert all(b == a / p**alpha for a, b in zip(gaps, gaps[1:]))

    @given(grids(243), st.sampled_from([1, 2]), st.sampled_from("+-"))
    def test_exact_eigen_identity(self, grid, alpha, sign):
        basis = enumerate_phi_basis(grid, sign, alpha=alpha)
        lam = QuadArray.from_scalars([[e.eigenvalue for e in basis.elements]], grid.p)
        assert vladimirov_matrix(grid, alpha).entries @ basis.matrix == basis.matrix * lam

    @given(grids(81), st.floats(0.1, 3))
    def test_spectral_completeness(self, grid, alpha):
        basis = enumerate_phi_basis(grid, alpha=alpha)
        closed = sorted(float(e.eigenvalue) for e in basis.elements)
        dense = np.linalg.eigvalsh(vladimirov_matrix(grid, alpha, "float").to_numpy())
        assert np.max(np.abs(np.sort(dense) - closed)) <= 1e-8
        # multiplicities p^(r-gamma)(p-1) per scale, 0 once
        for gamma in scale_window(grid):
            lam = vladimirov_eigenvalue_Br(gamma, grid.r, alpha, grid.p)
            count = sum(1 for e in basis.elements if e.kind == "phi" and e.gamma == gamma)
            assert count == grid.p ** (grid.r - gamma) * (grid.p - 1)
            assert lam < 0

    @pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
    @pytest.mark.parametrize("alpha", [1, 2, 0.7])
    def test_character_spectrum(self, p, r, l, alpha):
        grid = enumerate_cosets(p, r, l)
        a = vladimirov_matrix(grid, alpha, "float").to_numpy()
        for k in frequency_grid(grid).frequencies:
            chi = character_function(grid, k).data
            lam = float(character_eigenvalue(k, r, alpha, p))
            if k == 0:
                assert lam == 0
            else:
                assert lam == pytest.approx(-float(padic_norm(k, p)) ** alpha + float(boundary_shift(r, alpha, p)))
            assert np.max(np.abs(a @ chi - lam * chi)) <= 1e-10


def random_specs(p, gmin, gmax):
    coeff = st.fractions(-4, 4, max_denominator=6)

    @st.composite
    def build(draw):
        defaults = {g: draw(coeff) for g in range(gmin, gmax + 1)}
        overrides = {}
        for _ in range(draw(st.integers(0, 5))):
            g = draw(st.integers(gmin, gmax))
            n = F(draw(st.integers(0, p**3 - 1)), p**3)
            overrides[(g, n)] = draw(coeff)
        return KernelSpec(p, gmin, gmax, defaults, overrides)

    return build()


class TestKernels:
    def test_vladimirov_spec_reproduces_matrix(self):
        grid = enumerate_cosets(2, 2, 0)
        spec = vladimirov_kernel_spec(2, 1, 1, 2)
        assert kernel_matrix(grid, spec).entries == vladimirov_matrix(grid, 1).entries

    @pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
    @pytest.mark.parametrize("alpha", [1, 2])
    def test_vladimirov_spec_on_all_windows(self, p, r, l, alpha):
        grid = enumerate_cosets(p, r, l)
        spec = vladimirov_kernel_spec(p, alpha, l + 1, r)
        assert kernel_matrix(grid, spec).entries == vladimirov_matrix(grid, alpha).entries
        for gamma in scale_window(grid):
            assert kernel_eigenvalue(gamma, 0, spec) == vladimirov_eigenvalue_Br(gamma, r, alpha, p)

    def test_zero_spec(self):
        grid = enumerate_cosets(3, 1, -1)
        spec = KernelSpec(3, 0, 1)
        assert kernel_matrix(grid, spec).entries.is_zero()
        assert kernel_eigenvalue(0, 0, spec) == 0

    def test_single_scale_block_structure(self):
        grid = enumerate_cosets(2, 1, -1)
        c = F(3)
        a = kernel_matrix(grid, KernelSpec(2, 1, 1, {1: c})).to_numpy()
        # cosets 0, 1/2, 1, 3/2: pairs at distance 2 are (0,1/2),(0,3/2),(1/2,1),(1,3/2)
        w = 0.5 * 3
        expected = np.array([[0, w, 0, w], [w, 0, w, 0], [0, w, 0, w], [w, 0, w, 0]], dtype=float)
        np.fill_diagonal(expected, -expected.sum(axis=1))
        assert np.array_equal(a, expected)

    def test_single_scale_eigenvalue(self):
        c = F(5, 7)
        spec = KernelSpec(2, 1, 1, {1: c})
        assert kernel_eigenvalue(1, 0, spec) == -2 * c
        grid = enumerate_cosets(2, 1, 0)
        psi = enumerate_wavelet_basis(grid).function(1)
        ratio = (kernel_matrix(grid, spec, "float").to_numpy() @ psi.data) / psi.data
        assert np.allclose(ratio, -2 * float(c))

    @pytest.mark.parametrize("cutoff", [5, 10, 20, 40])
    def test_geometric_tail_toward_qp(self, cutoff):
        p, alpha, gamma = 2, 1, 1
        spec = vladimirov_kernel_spec(p, alpha, gamma, cutoff)
        gam = gamma_p(p, alpha)
        tail = -(1 / gam) * (1 - F(1, p)) * F(p) ** (-(cutoff + 1) * alpha) / (1 - F(p) ** (-alpha))
        assert kernel_eigenvalue(gamma, 0, spec) == -1 + tail
        assert abs(float(kernel_eigenvalue(gamma, 0, spec)) + 1) < 2.0 ** (-cutoff + 1)

    @given(st.sampled_from([2, 3]), st.data())
    def test_wavelet_eigen_identity(self, p, data):
        r = data.draw(st.integers(0, 2))
        l = r - data.draw(st.integers(1, 3 if p == 2 else 2))
        grid = enumerate_cosets(p, r, l)
        gmin = data.draw(st.integers(l + 1, r))
        spec = data.draw(random_specs(p, gmin, r))
        k = kernel_matrix(grid, spec, "float").to_numpy()
        assert np.array_equal(k, k.T)
        basis = enumerate_wavelet_basis(grid, include_constant=False)
        for el, psi in zip(basis.elements, basis.functions()):
            lam = float(kernel_eigenvalue(el.gamma, el.n, spec))
            assert np.max(np.abs(k @ psi.data - lam * psi.data)) <= 1e-10

    def test_cutoff_above_r_is_rejected(self):
        with pytest.raises(ValueError):
            kernel_matrix(enumerate_cosets(2, 1, 0), KernelSpec(2, 1, 2, {1: 1, 2: 1}))

    def test_prime_mismatch(self):
        with pytest.raises(ValueError):
            kernel_matrix(enumerate_cosets(2, 1, 0), KernelSpec(3, 1, 1, {1: 1}))

    def test_override_offsets_are_reduced(self):
        spec = KernelSpec(3, 0, 1, {0: 1}, {(0, F(4, 3)): 9})
        assert spec.coefficient(0, F(1, 3)) == 9
        assert spec.coefficient(0, F(2, 3)) == 1
        assert spec.coefficient(2, 0) == 0


class TestExponential:
    @given(st.integers(1, 12), st.floats(0, 50), st.integers(0, 2**32 - 1))
    def test_matches_scipy(self, n, scale, seed):
        m = np.random.default_rng(seed).standard_normal((n, n)) * scale
        ref = scipy.linalg.expm(m)
        assert np.max(np.abs(expm(m) - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))

    @pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
    def test_generator_matches_scipy(self, p, r, l):
        a = vladimirov_matrix(enumerate_cosets(p, r, l), 1, "float").to_numpy()
        for t in (0.1, 1.0, 10.0, 1000.0):
            assert np.max(np.abs(expm(a * t) - scipy.linalg.expm(a * t))) <= 1e-10

    def test_two_by_two_example(self):
        grid = enumerate_cosets(2, 1, 0)
        f = GridFunction.from_values(grid, [1, 0])
        out = matrix_exponential_apply(vladimirov_matrix(grid, 1), 1.0, f)
        e = math.exp(-2 / 3)
        assert np.allclose(out.data, [0.5 + 0.5 * e, 0.5 - 0.5 * e], atol=1e-14)

    def test_zero_time_and_constants(self):
        grid = enumerate_cosets(3, 1, -1)
        a = vladimirov_matrix(grid, 2, "float")
        f = GridFunction.from_values(grid, range(9))
        assert matrix_exponential_apply(a, 0, f).max_abs_diff(f) == 0
        c = GridFunction.constant(grid, 2, "float")
        assert matrix_exponential_apply(a, 7.5, c).max_abs_diff(c) < 1e-12
        with pytest.raises(ValueError):
            matrix_exponential_apply(a, -1, f)


@pytest.mark.parametrize("p,r,l", SMALL_GRIDS)
@pytest.mark.parametrize("alpha", [0.5, 2])
def test_generator_apply_matches_matmul(p, r, l, alpha, rng):
    grid = enumerate_cosets(p, r, l)
    mat = vladimirov_matrix(grid, alpha, "float")
    assert mat.generator
    f = GridFunction(grid, rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size))
    plain = mat.entries @ f.data
    assert np.allclose(mat.apply(f).data, plain, atol=1e-12 * max(1.0, np.abs(mat.entries).max()))


def test_generator_apply_is_accurate_on_deep_window():
    # large nearest-neighbour weights: the plain product loses ~1e-10 here
    grid = enumerate_cosets(3, 0, -5)
    mat = vladimirov_matrix(grid, 2, "float")
    k = frequency_grid(grid).frequencies[1]
    chi = character_function(grid, k)
    lam = float(character_eigenvalue(k, 0, 2, 3))
    assert np.max(np.abs(mat.apply(chi).data - lam * chi.data)) < 1e-10
