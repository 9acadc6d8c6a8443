"""Dense operators on locally constant functions.

Because inputs are constant on cosets of ``B_l``, the singular part of the
kernel integral over the coset containing ``x`` contributes nothing, and the
remaining integral is a finite sum.  The matrices below are therefore exact
representations of the integral operators, not quadratures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .functions import GridFunction
from .padic import CosetGrid, check_prime, frac_part, valuation
from .scalars import EXACT, QuadArray, get_backend


def exact_alpha(alpha) -> int | None:
    """``alpha`` as an int when it is a positive integer, else ``None``."""
    if isinstance(alpha, bool):
        return None
    if isinstance(alpha, int):
        return alpha
    if isinstance(alpha, Fraction) and alpha.denominator == 1:
        return int(alpha)
    if isinstance(alpha, float) and alpha.is_integer():
        return int(alpha)
    return None


def _check_alpha(alpha):
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")


def gamma_p(p: int, alpha):
    """``Gamma_p(-alpha) = (1 - p^(-alpha-1)) / (1 - p^alpha)``.

    Exact for integer ``alpha``; a float otherwise.
    """
    _check_alpha(alpha)
    a = exact_alpha(alpha)
    if a is not None:
        P = Fraction(p)
        return (1 - P ** (-a - 1)) / (1 - P**a)
    alpha = float(alpha)
    return (1 - p ** (-alpha - 1)) / (1 - p**alpha)


def _pow(p: int, e, exact: bool):
    return Fraction(p) ** e if exact else float(p) ** float(e)


def boundary_shift(r: int, alpha, p: int):
    """``(1 - 1/p) p^(-alpha r) / (1 - p^(-alpha-1))``, the finite-ball correction."""
    a = exact_alpha(alpha)
    exact = a is not None
    alpha = a if exact else float(alpha)
    return (1 - _pow(p, -1, exact)) * _pow(p, -alpha * r, exact) / (1 - _pow(p, -alpha - 1, exact))


def vladimirov_eigenvalue_Br(gamma: int, r: int, alpha, p: int):
    """Eigenvalue of ``f_{gamma,n,a}`` / ``phi_{gamma,n,b}`` under ``D^alpha(B_r)``."""
    _check_alpha(alpha)
    if gamma > r:
        raise ValueError("need gamma <= r")
    a = exact_alpha(alpha)
    exact = a is not None
    alpha = a if exact else float(alpha)
    return -_pow(p, -alpha * (gamma - 1), exact) + boundary_shift(r, alpha, p)


def vladimirov_eigenvalue_Qp(gamma: int, alpha, p: int):
    """Eigenvalue ``-p^(-alpha (gamma-1))`` on the whole of ``Q_p``."""
    _check_alpha(alpha)
    a = exact_alpha(alpha)
    return -_pow(p, -(a if a is not None else alpha) * (gamma - 1), a is not None)


def character_eigenvalue(k, r: int, alpha, p: int):
    """``-|k|_p^alpha + shift (1 - delta_{k,0})`` for ``k`` modulo ``B_{-r}``."""
    _check_alpha(alpha)
    v = valuation(Fraction(k), p)
    if v >= r:  # k == 0 in Q_p / B_{-r}
        return Fraction(0) if exact_alpha(alpha) is not None else 0.0
    a = exact_alpha(alpha)
    exact = a is not None
    alpha = a if exact else float(alpha)
    return -_pow(p, -alpha * v, exact) + boundary_shift(r, alpha, p)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    grid: CosetGrid
    entries: QuadArray | np.ndarray = field(repr=False)
    # rows sum to zero; lets the float path apply w_ij (f_j - f_i) without cancellation
    generator: bool = False

    @property
    def exact(self) -> bool:
        return isinstance(self.entries, QuadArray)

    def to_numpy(self) -> np.ndarray:
        return self.entries.to_numpy() if self.exact else self.entries

    def to_float(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.to_numpy(), self.generator) if self.exact else self

    def apply(self, f: GridFunction) -> GridFunction:
        if f.grid != self.grid:
            raise ValueError("operator/function grid mismatch")
        if self.exact and f.exact:
            return GridFunction(self.grid, self.entries @ f.data)
        mat, v = self.to_numpy(), f.to_numpy()
        if not self.generator:
            return GridFunction(self.grid, mat @ v)
        off = mat.copy()
        np.fill_diagonal(off, 0)
        return GridFunction(self.grid, (off * (v[None, :] - v[:, None])).sum(axis=1))

    __call__ = apply

    def is_symmetric(self) -> bool:
        if self.exact:
            return self.entries == self.entries.T
        return bool(np.array_equal(self.entries, self.entries.T))

    def row_sums(self):
        return self.entries.sum(axis=1)


def _distance_exponents(grid: CosetGrid) -> np.ndarray:
    """``gamma_ij`` with ``|x_i - x_j|_p = p^gamma_ij`` (diagonal unused)."""
    reps = grid.representatives
    n = grid.size
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = -valuation(reps[i] - reps[j], grid.p)
    return out


def _assemble(grid: CosetGrid, offdiag, exact: bool) -> OperatorMatrix:
    """Fill a generator from its off-diagonal weights; the diagonal makes rows sum to 0."""
    n = grid.size
    if exact:
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            total = Fraction(0)
            for j in range(n):
                if i != j:
                    w = offdiag(i, j)
                    rows[i][j] = w
                    total += w
            rows[i][i] = -total
        return OperatorMatrix(grid, QuadArray.from_scalars(rows, grid.p), generator=True)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                mat[i, j] = offdiag(i, j)
        # fsum keeps the diagonal correctly rounded despite large weights
        mat[i, i] = -math.fsum(mat[i])
    return OperatorMatrix(grid, mat, generator=True)


def vladimirov_matrix(grid: CosetGrid, alpha, backend=EXACT) -> OperatorMatrix:
    """Dense ``D^alpha(B_r)``.

    Off-diagonal ``-(1/Gamma_p(-alpha)) p^l |x_i - x_j|_p^(-alpha-1)``; the
    diagonal is minus the row sum of those weights.
    """
    _check_alpha(alpha)
    backend = get_backend(backend)
    p = grid.p
    a = exact_alpha(alpha)
    if backend.exact and a is None:
        raise ValueError("the exact backend needs an integer alpha")
    exact = backend.exact
    alpha = a if exact else float(alpha)
    scale = -_pow(p, grid.l, exact) / (gamma_p(p, a) if exact else gamma_p(p, alpha))
    expo = _distance_exponents(grid)
    # one weight per distinct distance
    weights = {g: scale * _pow(p, -int(g) * (alpha + 1), exact) for g in set(expo.flat)}
    return _assemble(grid, lambda i, j: weights[expo[i, j]], exact)


@dataclass(frozen=True)
class KernelSpec:
    """Hierarchical kernel coefficients ``T^(gamma, n)``.

    ``n`` is the ``Q_p/Z_p`` offset of the ball ``B_gamma(p^-gamma n)``.
    Coefficients vanish outside ``[gamma_min, gamma_max]``; ``defaults`` maps a
    scale to its value, ``overrides`` maps ``(gamma, n)`` to a per-ball value.
    """

    p: int
    gamma_min: int
    gamma_max: int
    defaults: Mapping[int, object] = field(default_factory=dict)
    overrides: Mapping[tuple[int, Fraction], object] = field(default_factory=dict)

    def __post_init__(self):
        check_prime(self.p)
        if self.gamma_min > self.gamma_max:
            raise ValueError("gamma_min must not exceed gamma_max")
        clean = {}
        for (g, n), v in self.overrides.items():
            clean[(int(g), frac_part(Fraction(n), self.p))] = v
        object.__setattr__(self, "overrides", clean)
        object.__setattr__(self, "defaults", {int(g): v for g, v in self.defaults.items()})

    def coefficient(self, gamma: int, n):
        if not self.gamma_min <= gamma <= self.gamma_max:
            return 0
        key = (gamma, frac_part(Fraction(n), self.p))
        if key in self.overrides:
            return self.overrides[key]
        return self.defaults.get(gamma, 0)

    @property
    def exact(self) -> bool:
        vals = list(self.defaults.values()) + list(self.overrides.values())
        return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)


def vladimirov_kernel_spec(p: int, alpha, gamma_min: int, gamma_max: int) -> KernelSpec:
    """Spec with ``T^(gamma, n) = -(1/Gamma_p(-alpha)) p^(-gamma(alpha+1))`` for every ball."""
    a = exact_alpha(alpha)
    exact = a is not None
    alpha_v = a if exact else float(alpha)
    g = gamma_p(p, alpha_v)
    defaults = {gm: -_pow(p, -gm * (alpha_v + 1), exact) / g for gm in range(gamma_min, gamma_max + 1)}
    return KernelSpec(p, gamma_min, gamma_max, defaults)


def kernel_matrix(grid: CosetGrid, spec: KernelSpec, backend=EXACT) -> OperatorMatrix:
    """Dense operator ``T f(x) = int T(x,y) (f(y) - f(x)) dy`` restricted to ``B_r``.

    With ``gamma_max <= r`` the kernel vanishes between ``B_r`` and its
    complement, so the matrix is the ``Q_p`` operator on ``B_r``-supported data.
    """
    if spec.p != grid.p:
        raise ValueError("kernel and grid use different primes")
    if spec.gamma_max > grid.r:
        raise ValueError(f"kernel cutoff gamma_max={spec.gamma_max} exceeds r={grid.r}")
    backend = get_backend(backend)
    exact = backend.exact
    if exact and not spec.exact:
        raise ValueError("the exact backend needs rational kernel coefficients")
    p = grid.p
    cell = _pow(p, grid.l, exact)
    expo = _distance_exponents(grid)
    reps = grid.representatives

    def weight(i, j):
        g = int(expo[i, j])
        n = frac_part(reps[i] * Fraction(p) ** g, p)
        c = spec.coefficient(g, n)
        return cell * (Fraction(c) if exact else float(c))

    return _assemble(grid, weight, exact)


def kernel_eigenvalue(gamma: int, n, spec: KernelSpec):
    """Eigenvalue of ``psi_{gamma,n,j}`` under the kernel operator.

    ``-p^gamma T^(gamma,n) - (1 - 1/p) sum_{g > gamma} p^g T^(g, p^(g-gamma) n)``,
    the sum ending at the cutoff.
    """
    p = spec.p
    exact = spec.exact
    n = Fraction(n)
    total = -_pow(p, gamma, exact) * spec.coefficient(gamma, n)
    tail = 0
    for g in range(gamma + 1, spec.gamma_max + 1):
        tail += _pow(p, g, exact) * spec.coefficient(g, n * Fraction(p) ** (g - gamma))
    return total - (1 - _pow(p, -1, exact)) * tail


# -- matrix exponential oracle ---------------------------------------------------

def _taylor_degree(theta: float, squarings: int, target: float) -> int:
    # remainder of the exponential series after degree m, for ||B|| <= theta < 1
    m, term = 0, 1.0
    while True:
        m += 1
        term *= theta / m
        remainder = term * theta / (m + 1) / (1 - theta / (m + 2))
        if remainder * 2**squarings <= target or m >= 60:
            return m


def expm(mat: np.ndarray, target: float = 1e-13) -> np.ndarray:
    """Scaling and squaring with a truncated Taylor series."""
    mat = np.asarray(mat, dtype=float)
    norm = np.abs(mat).sum(axis=0).max() if mat.size else 0.0
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    b = mat / 2.0**squarings
    theta = norm / 2.0**squarings
    degree = _taylor_degree(theta, squarings, target)
    out = np.eye(len(mat))
    term = np.eye(len(mat))
    for m in range(1, degree + 1):
        term = term @ b / m
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def matrix_exponential_apply(op: OperatorMatrix, t: float, f: GridFunction) -> GridFunction:
    """``exp(A t) f``."""
    if t < 0:
        raise ValueError("time must be non-negative")
    if f.grid != op.grid:
        raise ValueError("operator/function grid mismatch")
    if t == 0:
        return f.to_float()
    return GridFunction(op.grid, expm(op.to_numpy() * float(t)) @ f.to_numpy())
