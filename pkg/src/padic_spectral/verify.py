"""Named invariant checks run by ``padic-spectral verify``.

Each check returns a :class:`CheckResult` with the largest residual observed.
Exact checks report residual 0 when the identity holds in ``Q(sqrt p)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bases, evolution, fourier, functions, operators
from .padic import CosetGrid
from .scalars import EXACT, QuadArray, ScalarBackend, get_backend

FLOAT_TOL = 1e-10
EVOLVE_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}


def _sup(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def _exact_residual(lhs: QuadArray, rhs: QuadArray) -> float:
    if lhs == rhs:
        return 0.0
    return max(_sup(lhs.to_numpy() - rhs.to_numpy()), math.ulp(1.0))


def _float_check(name: str, residual: float, tol: float = FLOAT_TOL) -> CheckResult:
    return CheckResult(name, bool(residual <= tol), residual, f"tol={tol:g}")


def _exact_check(name: str, residual: float) -> CheckResult:
    return CheckResult(name, residual == 0.0, residual, "exact")


def _random_function(grid: CosetGrid, rng: np.random.Generator) -> functions.GridFunction:
    vals = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    return functions.GridFunction(grid, vals)


def check_orthonormality(grid, alpha, backend: ScalarBackend, k_sign="+"):
    basis = bases.enumerate_phi_basis(grid, k_sign)
    if backend.exact:
        return _exact_check("phi_orthonormal", _exact_residual(basis.gram(), QuadArray.eye(len(basis), grid.p)))
    gram = basis.to_float().gram()
    return _float_check("phi_orthonormal", _sup(gram - np.eye(len(basis))))


def check_eigen(grid, alpha, backend: ScalarBackend, k_sign="+"):
    basis = bases.enumerate_phi_basis(grid, k_sign, alpha=alpha)
    lam = [el.eigenvalue for el in basis.elements]
    if backend.exact and operators.exact_alpha(alpha) is not None:
        A = operators.vladimirov_matrix(grid, alpha, EXACT).entries
        rhs = basis.matrix * QuadArray.from_scalars([lam], grid.p)
        return _exact_check("vladimirov_eigen", _exact_residual(A @ basis.matrix, rhs))
    A = operators.vladimirov_matrix(grid, alpha, backend=get_backend("float")).entries
    M = basis.to_float().matrix
    res = A @ M - M * np.array([float(v) for v in lam])[None, :]
    return _float_check("vladimirov_eigen", _sup(res))


def check_characters(grid, alpha, backend=None):
    A = operators.vladimirov_matrix(grid, alpha, backend=get_backend("float"))
    worst = 0.0
    for k in fourier.frequency_grid(grid).frequencies:
        chi = fourier.character_function(grid, k)
        lam = float(operators.character_eigenvalue(k, grid.r, alpha, grid.p))
        worst = max(worst, _sup(A.apply(chi).data - lam * chi.data))
    return _float_check("character_eigen", worst)


def check_fourier(grid, alpha=None, backend=None, seed: int = 0):
    rng = np.random.default_rng(seed)
    f = _random_function(grid, rng)
    s = fourier.dft_forward(f)
    back = fourier.dft_inverse(s)
    roundtrip = f.max_abs_diff(back)
    energy_f = functions.norm_squared(f).real
    energy_s = float(np.sum(np.abs(s.values) ** 2))
    parseval = abs(energy_f - energy_s)
    return [_float_check("dft_roundtrip", roundtrip), _float_check("parseval", parseval)]


def check_support_duality(grid, alpha=None, backend=None):
    # indicator of a ball at the finest scale viewed on a refined window
    f = functions.GridFunction.indicator(grid, 0, grid.l)
    report = fourier.support_duality(f, grid.r + 1, grid.l - 1)
    return _exact_check("support_duality", 0.0 if report.ok else 1.0)


def check_convolution(grid, alpha=None, backend=None, pairs: int = 5, seed: int = 1):
    rng = np.random.default_rng(seed)
    worst_conv = worst_prod = 0.0
    for _ in range(pairs):
        f, g = _random_function(grid, rng), _random_function(grid, rng)
        worst_conv = max(worst_conv, functions.convolve_direct(f, g).max_abs_diff(fourier.convolve_spectral(f, g)))
        direct = fourier.dft_forward(functions.pointwise_product(f, g)).values
        worst_prod = max(worst_prod, _sup(direct - fourier.product_spectrum(f, g).values))
    return [_float_check("convolution_theorem", worst_conv), _float_check("product_theorem", worst_prod)]


def check_omega(grid, alpha=None, backend=None):
    if grid.r < 0 or grid.l > 0:
        return CheckResult("omega_expansion", True, 0.0, "skipped: window does not contain Z_p")
    # representatives have p-power denominators, so x lies in Z_p iff it is an integer
    target = functions.GridFunction.from_callable(grid, lambda x: int(x.denominator == 1))
    synth = bases.omega_synthesis(grid)
    return _exact_check("omega_expansion", _exact_residual(synth.data, target.data))


def check_wavelet_bridge(grid, alpha=None, backend=None, k_sign="+"):
    p = grid.p
    worst = 0.0
    for gamma in bases.scale_window(grid):
        for c in bases.ball_centers(grid, gamma):
            n = bases.wavelet_offset(c, gamma, p)
            for j in range(1, p):
                psi = bases.build_wavelet(gamma, n, j, grid)
                worst = max(worst, psi.max_abs_diff(bases.wavelet_from_f(gamma, n, j, grid)),
                            psi.max_abs_diff(bases.wavelet_from_phi(gamma, n, j, grid, k_sign)))
            for a in range(p):
                worst = max(worst, bases.build_f(gamma, c, a, grid).max_abs_diff(
                    bases.f_from_wavelets(gamma, n, a, grid)))
            for b in range(1, p):
                worst = max(worst, bases.build_phi(gamma, c, b, grid, k_sign).max_abs_diff(
                    bases.phi_from_wavelets(gamma, n, b, grid, k_sign)))
    return _float_check("wavelet_bridge", worst)


def check_kernel(grid, alpha, backend: ScalarBackend):
    spec = operators.vladimirov_kernel_spec(grid.p, alpha, grid.l + 1, grid.r)
    results = []
    if backend.exact and operators.exact_alpha(alpha) is not None:
        K = operators.kernel_matrix(grid, spec, EXACT).entries
        A = operators.vladimirov_matrix(grid, alpha, EXACT).entries
        results.append(_exact_check("kernel_matches_vladimirov", _exact_residual(K, A)))
        worst = Fraction(0)
        for gamma in bases.scale_window(grid):
            diff = operators.kernel_eigenvalue(gamma, 0, spec) - operators.vladimirov_eigenvalue_Br(gamma, grid.r, alpha, grid.p)
            worst = max(worst, abs(Fraction(diff)))
        results.append(_exact_check("kernel_eigenvalue", float(worst)))
        return results
    K = operators.kernel_matrix(grid, spec, get_backend("float")).entries
    wav = bases.enumerate_wavelet_basis(grid, include_constant=False)
    worst = 0.0
    for el, psi in zip(wav.elements, wav.functions()):
        lam = complex(operators.kernel_eigenvalue(el.gamma, el.n, spec))
        v = psi.to_numpy()
        worst = max(worst, _sup(K @ v - lam * v))
    results.append(_float_check("kernel_eigenvalue", worst))
    return results


def check_evolution(grid, alpha, backend=None, times=(0.0, 0.5, 1.0, 2.0, 10.0)):
    op = evolution.Vladimirov(alpha)
    rng = np.random.default_rng(2)
    f0 = functions.GridFunction(grid, rng.standard_normal(grid.size).astype(complex))
    spec_run = evolution.solve_spectral(grid, op, f0, times)
    oracle = evolution.solve_oracle(grid, op, f0, times)
    gap = max(a.max_abs_diff(b) for a, b in zip(spec_run.snapshots, oracle.snapshots))
    masses = spec_run.masses()
    drift = float(np.max(np.abs(masses - masses[0])))
    return [_float_check("spectral_vs_expm", gap, EVOLVE_TOL), _float_check("mass_conservation", drift)]


def check_convergence(grid, alpha, backend=None, depth: int = 6):
    """Boundary shift shrinks by ``p^-alpha`` per unit of ``r``."""
    a = operators.exact_alpha(alpha)
    p = grid.p
    if a is None:
        shifts = [operators.boundary_shift(r, float(alpha), p) for r in range(1, depth + 1)]
        ratios = [shifts[i + 1] / shifts[i] for i in range(depth - 1)]
        return _float_check("qp_convergence", max(abs(q - p ** -float(alpha)) for q in ratios))
    shifts = [operators.boundary_shift(r, a, p) for r in range(1, depth + 1)]
    bad = [i for i in range(depth - 1) if shifts[i + 1] / shifts[i] != Fraction(1, p ** a)]
    return _exact_check("qp_convergence", 0.0 if not bad else 1.0)


CHECKS: dict[str, Callable] = {
    "orthonormality": check_orthonormality,
    "eigen": check_eigen,
    "characters": check_characters,
    "fourier": check_fourier,
    "support_duality": check_support_duality,
    "convolution": check_convolution,
    "omega": check_omega,
    "wavelet_bridge": check_wavelet_bridge,
    "kernel": check_kernel,
    "evolution": check_evolution,
    "convergence": check_convergence,
}


def run_suite(grid: CosetGrid, alpha=1, backend="exact", k_sign="+") -> list[CheckResult]:
    backend = get_backend(backend)
    out: list[CheckResult] = []
    for name, fn in CHECKS.items():
        kwargs = {"k_sign": k_sign} if name in ("orthonormality", "eigen", "wavelet_bridge") else {}
        res = fn(grid, alpha, backend, **kwargs)
        out.extend(res if isinstance(res, list) else [res])
    return out
