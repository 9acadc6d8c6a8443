"""Cauchy problems ``df/dt = A f`` for the Vladimirov and kernel operators.

The spectral solver expands the initial data in the real orthonormal basis,
whose elements are eigenfunctions of both operator families, and evolves each
coefficient by ``exp(lambda t)``.  Coefficients and eigenvalues are computed
exactly where possible; only the exponentials are evaluated in floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .bases import (BasisSet, analyze, build_f, enumerate_phi_basis, wavelet_offset)
from .functions import GridFunction, integrate
from .operators import (KernelSpec, OperatorMatrix, boundary_shift, kernel_eigenvalue,
                        kernel_matrix, matrix_exponential_apply, vladimirov_eigenvalue_Br,
                        vladimirov_matrix, exact_alpha)
from .padic import CosetGrid, ball_indicator, valuation
from .scalars import FLOAT, QuadArray


@dataclass(frozen=True)
class Vladimirov:
    alpha: object = 1


@dataclass(frozen=True)
class KernelOperator:
    spec: KernelSpec


Operator = Union[Vladimirov, KernelOperator]


@dataclass(frozen=True, eq=False)
class EvolutionRun:
    grid: CosetGrid
    operator: Operator
    initial: GridFunction
    times: tuple[float, ...]
    snapshots: tuple[GridFunction, ...] = field(repr=False)

    def masses(self) -> np.ndarray:
        return np.array([integrate(s).real for s in self.snapshots])

    def values(self) -> np.ndarray:
        """``(len(times), p^(r-l))`` array of real snapshot values."""
        return np.array([s.to_numpy().real for s in self.snapshots])


def _check_times(times: Iterable[float]) -> tuple[float, ...]:
    times = tuple(float(t) for t in times)
    if not times:
        raise ValueError("need at least one time")
    if times[0] < 0 or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be non-negative and strictly increasing")
    return times


def _check_operator(grid: CosetGrid, op: Operator):
    if isinstance(op, KernelOperator):
        if op.spec.p != grid.p:
            raise ValueError("kernel and grid use different primes")
        if op.spec.gamma_max > grid.r:
            raise ValueError("spectral solution needs a kernel cutoff gamma_max <= r")
    elif not isinstance(op, Vladimirov):
        raise TypeError(f"unknown operator descriptor {op!r}")


def basis_eigenvalues(basis: BasisSet, op: Operator) -> list:
    """Closed-form eigenvalue of every basis element under ``op``."""
    grid = basis.grid
    out = []
    for el in basis.elements:
        if el.kind == "constant":
            out.append(Fraction(0))
        elif isinstance(op, Vladimirov):
            out.append(vladimirov_eigenvalue_Br(el.gamma, grid.r, op.alpha, grid.p))
        else:
            out.append(kernel_eigenvalue(el.gamma, wavelet_offset(el.n, el.gamma, grid.p), op.spec))
    return out


def operator_matrix(grid: CosetGrid, op: Operator, backend=FLOAT) -> OperatorMatrix:
    if isinstance(op, Vladimirov):
        return vladimirov_matrix(grid, op.alpha, backend)
    return kernel_matrix(grid, op.spec, backend)


def solve_spectral(grid: CosetGrid, op: Operator, f0: GridFunction, times: Sequence[float],
                   k_sign="+") -> EvolutionRun:
    if f0.grid != grid:
        raise ValueError("initial condition lives on a different grid")
    _check_operator(grid, op)
    times = _check_times(times)
    basis = enumerate_phi_basis(grid, k_sign)
    coeffs = analyze(f0, basis)
    coeffs = coeffs.to_numpy() if isinstance(coeffs, QuadArray) else np.asarray(coeffs)
    lams = np.array([float(x) for x in basis_eigenvalues(basis, op)])
    mat = basis.matrix.to_numpy()
    snaps = []
    for t in times:
        if t == 0:
            snaps.append(f0.to_float())
        else:
            snaps.append(GridFunction(grid, mat @ (coeffs * np.exp(lams * t))))
    return EvolutionRun(grid, op, f0, times, tuple(snaps))


def solve_oracle(grid: CosetGrid, op: Operator, f0: GridFunction, times: Sequence[float]) -> EvolutionRun:
    """Snapshots from the dense matrix exponential."""
    if f0.grid != grid:
        raise ValueError("initial condition lives on a different grid")
    _check_operator(grid, op)
    times = _check_times(times)
    mat = operator_matrix(grid, op, FLOAT)
    snaps = tuple(matrix_exponential_apply(mat, t, f0) for t in times)
    return EvolutionRun(grid, op, f0, times, snaps)


def region_weights(grid: CosetGrid, center=0, gamma: int = 0) -> np.ndarray:
    """Measure of ``B_gamma(center)`` inside each coset."""
    center = Fraction(center)
    p = grid.p
    if gamma > grid.r or valuation(center, p) < -grid.r:
        raise ValueError("region is not contained in the grid's ball")
    w = np.zeros(grid.size)
    if gamma >= grid.l:
        for m, x in enumerate(grid.representatives):
            w[m] = ball_indicator(x, center, gamma, p) * float(grid.cell_measure)
    else:
        w[grid.index(center)] = float(p) ** gamma
    return w


def survival_series(run: EvolutionRun, center=0, gamma: int | None = 0,
                    cosets: Iterable[int] | None = None) -> np.ndarray:
    """``s(t) = int_region f(x, t) dx`` for a ball or an explicit coset list."""
    grid = run.grid
    if cosets is not None:
        w = np.zeros(grid.size)
        for m in cosets:
            if not 0 <= m < grid.size:
                raise ValueError(f"coset index {m} outside the grid")
            w[m] = float(grid.cell_measure)
    else:
        w = region_weights(grid, center, gamma)
    return np.array([float(np.dot(w, s.to_numpy().real)) for s in run.snapshots])


def omega_closed_form(grid: CosetGrid, alpha, t: float) -> GridFunction:
    """Direct evaluation of the series solution for ``f(x, 0) = Omega(|x|_p)``.

    ``p^-r + sum_{i=0}^{r-1} p^-i f_{i+1,0,0}(x) exp(-(p^(-i alpha) - shift) t)``.
    """
    if grid.r < 0 or grid.l > 0:
        raise ValueError("window must contain Z_p and resolve it (r >= 0, l <= 0)")
    p, r = grid.p, grid.r
    a = exact_alpha(alpha)
    alpha = float(a if a is not None else alpha)
    shift = float(boundary_shift(r, alpha, p))
    out = np.full(grid.size, float(p) ** (-r))
    for i in range(r):
        term = build_f(i + 1, 0, 0, grid).to_numpy().real
        out = out + float(p) ** (-i) * term * math.exp(-(float(p) ** (-i * alpha) - shift) * t)
    return GridFunction(grid, out)


def distance_to_equilibrium(run: EvolutionRun) -> np.ndarray:
    """``L^2`` distance of each snapshot to the mass-preserving constant."""
    grid = run.grid
    mass = integrate(run.initial.to_float()).real
    const = mass / float(grid.measure)
    cell = float(grid.cell_measure)
    return np.array([math.sqrt(cell * float(np.sum(np.abs(s.to_numpy() - const) ** 2)))
                     for s in run.snapshots])
