"""Real eigenbasis of the Vladimirov operator on ``B_r`` and its wavelet bridge.

Families on a grid ``(r, l)`` use scales ``gamma`` in ``[l+1, r]``:

* ``f_{gamma,n,a}`` -- difference of two ball indicators centred at ``n``,
  an overcomplete real eigenfamily;
* ``phi_{gamma,n,b}`` plus the constant ``p^(-r/2)`` -- an orthonormal basis
  with amplitudes in ``Q(sqrt p)`` (``k = -1 +/- sqrt p``);
* ``psi_{gamma,n,j}`` -- p-adic wavelets with support ``B_gamma(p^(-gamma) n)``.

For ``f``/``phi`` the parameter ``n`` is the centre of the support ball.
For wavelets ``n`` is the ``Q_p/Z_p`` offset, the centre being ``p^(-gamma) n``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fourier import character_function, frequency_grid
from .functions import GridFunction, ball_mask
from .operators import vladimirov_eigenvalue_Br
from .padic import CosetGrid, ball_indicator, character, enumerate_cosets, frac_part, valuation
from .scalars import QuadArray, QuadScalar, root_of_orthogonality, sqrt_p_power

KINDS = ("f", "phi", "psi", "character", "constant", "f_r")


@dataclass(frozen=True)
class BasisElement:
    kind: str
    gamma: int
    n: Fraction
    label: int
    eigenvalue: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Ordered, kind-uniform family; column ``i`` of ``matrix`` is element ``i``."""

    grid: CosetGrid
    kind: str
    elements: tuple[BasisElement, ...]
    matrix: QuadArray | np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.elements)

    @property
    def exact(self) -> bool:
        return isinstance(self.matrix, QuadArray)

    def function(self, i: int) -> GridFunction:
        if self.exact:
            return GridFunction(self.grid, self.matrix[:, i])
        return GridFunction(self.grid, self.matrix[:, i])

    def functions(self) -> list[GridFunction]:
        return [self.function(i) for i in range(len(self))]

    def gram(self):
        """Matrix of inner products (exact for exact bases)."""
        cell = self.grid.cell_measure
        if self.exact:
            return (self.matrix.T @ self.matrix) * cell
        return (self.matrix.conj().T @ self.matrix) * float(cell)

    def to_float(self) -> "BasisSet":
        if not self.exact:
            return self
        return BasisSet(self.grid, self.kind, self.elements, self.matrix.to_numpy().astype(complex))


# -- validation helpers ---------------------------------------------------------

def scale_window(grid: CosetGrid) -> range:
    """Admissible scales ``l+1 .. r`` (descending order is used for bases)."""
    return range(grid.l + 1, grid.r + 1)


def _check_scale(gamma: int, grid: CosetGrid):
    if not grid.l + 1 <= gamma <= grid.r:
        raise ValueError(f"scale gamma={gamma} outside the window [{grid.l + 1}, {grid.r}]")


def _check_center(n, grid: CosetGrid) -> Fraction:
    n = Fraction(n)
    if valuation(n, grid.p) < -grid.r:
        raise ValueError(f"offset n={n} is not a point of B_{grid.r}")
    return n


def ball_centers(grid: CosetGrid, gamma: int) -> tuple[Fraction, ...]:
    """Canonical representatives of ``B_r / B_gamma`` in coset order."""
    if gamma >= grid.r:
        return (Fraction(0),)
    return enumerate_cosets(grid.p, grid.r, gamma).representatives


def wavelet_offset(center, gamma: int, p: int) -> Fraction:
    """``Q_p/Z_p`` offset ``n`` of the wavelet supported on ``B_gamma(center)``."""
    return frac_part(Fraction(center) * Fraction(p) ** gamma, p)


# -- the f family ---------------------------------------------------------------

def build_f(gamma: int, n, a: int, grid: CosetGrid) -> GridFunction:
    """``Omega(|x - n - a p^-gamma|_p p^(1-gamma)) - p^-1 Omega(|x - n|_p p^-gamma)``."""
    _check_scale(gamma, grid)
    n = _check_center(n, grid)
    p = grid.p
    if not 0 <= a < p:
        raise ValueError(f"a must lie in 0..{p - 1}")
    return GridFunction(grid, _f_values(grid, gamma, n, a))


@lru_cache(maxsize=8192)
def _f_values(grid: CosetGrid, gamma: int, n: Fraction, a: int) -> QuadArray:
    p = grid.p
    inner = np.array(ball_mask(grid, n + a * Fraction(p) ** (-gamma), gamma - 1), dtype=object)
    outer = np.array(ball_mask(grid, n, gamma), dtype=object)
    return QuadArray(p * inner - outer, np.zeros_like(inner), p, p)


def build_f_r(grid: CosetGrid) -> GridFunction:
    """The constant ``f_r = p^(-r)``."""
    return GridFunction.constant(grid, Fraction(grid.p) ** (-grid.r))


def build_constant(grid: CosetGrid) -> GridFunction:
    """The normalized constant ``p^(-r/2)``."""
    c = sqrt_p_power(-grid.r, grid.p)
    return GridFunction(grid, QuadArray.from_scalars([c] * grid.size, grid.p))


# -- the orthonormal phi basis --------------------------------------------------

def phi_prefactor(gamma: int, p: int, k_sign="+") -> QuadScalar:
    """``p^(-(gamma-1)/2) / k``."""
    return sqrt_p_power(-(gamma - 1), p) / root_of_orthogonality(p, k_sign)


def build_phi(gamma: int, n, b: int, grid: CosetGrid, k_sign="+") -> GridFunction:
    """``(p^(-(gamma-1)/2) / k) (f_{gamma,n,0} + k f_{gamma,n,b})``."""
    p = grid.p
    if not 1 <= b < p:
        raise ValueError(f"b must lie in 1..{p - 1}")
    k = root_of_orthogonality(p, k_sign)
    f0 = build_f(gamma, n, 0, grid).data
    fb = build_f(gamma, n, b, grid).data
    return GridFunction(grid, (f0 + fb * k) * phi_prefactor(gamma, p, k_sign))


def enumerate_phi_basis(grid: CosetGrid, k_sign="+", alpha=None,
                        include_constant: bool = True) -> BasisSet:
    """Constant first, then ``gamma`` descending, centres in coset order, ``b`` ascending.

    With ``include_constant=False`` the family is the windowed version of the
    ``L^2(Q_p)`` basis; it is then only complete on mean-zero functions.
    """
    p, r = grid.p, grid.r
    elements, columns = [], []
    if include_constant:
        elements.append(BasisElement("constant", r, Fraction(0), 0, 0 if alpha is not None else None))
        columns.append(build_constant(grid).data)
    else:
        warnings.warn("basis without the constant is complete only on mean-zero functions "
                      "within the resolution window", stacklevel=2)
    for gamma in reversed(scale_window(grid)):
        lam = None if alpha is None else vladimirov_eigenvalue_Br(gamma, r, alpha, p)
        for n in ball_centers(grid, gamma):
            for b in range(1, p):
                elements.append(BasisElement("phi", gamma, n, b, lam))
                columns.append(build_phi(gamma, n, b, grid, k_sign).data)
    return BasisSet(grid, "phi", tuple(elements), QuadArray.stack(columns, axis=1))


def enumerate_f_family(grid: CosetGrid) -> BasisSet:
    """All ``f_{gamma,n,a}`` (overcomplete; ``p`` per ball)."""
    elements, columns = [], []
    for gamma in reversed(scale_window(grid)):
        for n in ball_centers(grid, gamma):
            for a in range(grid.p):
                elements.append(BasisElement("f", gamma, n, a))
                columns.append(build_f(gamma, n, a, grid).data)
    return BasisSet(grid, "f", tuple(elements), QuadArray.stack(columns, axis=1))


def enumerate_character_basis(grid: CosetGrid, alpha=None) -> BasisSet:
    """``p^(-r/2) chi(kx)`` over the window frequencies."""
    from .operators import character_eigenvalue

    p, r = grid.p, grid.r
    scale = p ** (-r / 2)
    elements, columns = [], []
    for m, k in enumerate(frequency_grid(grid).frequencies):
        lam = None if alpha is None else character_eigenvalue(k, r, alpha, p)
        elements.append(BasisElement("character", r, k, m, lam))
        columns.append(scale * character_function(grid, k).data)
    return BasisSet(grid, "character", tuple(elements), np.stack(columns, axis=1))


# -- expansions ------------------------------------------------------------------

_ORTHONORMAL = ("phi", "psi", "character")


def analyze(f: GridFunction, basis: BasisSet):
    """Coefficients ``<basis_i, f>``; exact when both sides are exact."""
    if basis.kind not in _ORTHONORMAL:
        raise ValueError(f"analysis needs an orthonormal basis, not kind {basis.kind!r}")
    if f.grid != basis.grid:
        raise ValueError("grid mismatch")
    cell = f.grid.cell_measure
    if basis.exact and f.exact:
        return (basis.matrix.T @ f.data) * cell
    mat = basis.matrix.to_numpy() if basis.exact else basis.matrix
    return (mat.conj().T @ f.to_numpy()) * float(cell)


def synthesize(coeffs, basis: BasisSet) -> GridFunction:
    """``sum_i c_i basis_i``."""
    if len(coeffs) != len(basis):
        raise ValueError(f"expected {len(basis)} coefficients, got {len(coeffs)}")
    if basis.exact and isinstance(coeffs, QuadArray):
        return GridFunction(basis.grid, basis.matrix @ coeffs)
    if basis.exact and all(isinstance(c, (int, Fraction, QuadScalar)) for c in coeffs):
        return GridFunction(basis.grid, basis.matrix @ QuadArray.from_scalars(list(coeffs), basis.grid.p))
    mat = basis.matrix.to_numpy() if basis.exact else basis.matrix
    c = coeffs.to_numpy() if isinstance(coeffs, QuadArray) else np.asarray(coeffs, dtype=complex)
    return GridFunction(basis.grid, mat @ c)


def omega_expansion(grid: CosetGrid) -> list[tuple[BasisElement, Fraction]]:
    """Coefficients of ``Omega(|x|_p) = f_r + sum_{gamma=1}^r p^(1-gamma) f_{gamma,0,0}``."""
    if grid.r < 0 or grid.l > 0:
        raise ValueError("window must contain Z_p and resolve it (r >= 0, l <= 0)")
    p = grid.p
    terms = [(BasisElement("f_r", grid.r, Fraction(0), 0), Fraction(1))]
    for gamma in range(1, grid.r + 1):
        terms.append((BasisElement("f", gamma, Fraction(0), 0), Fraction(p) ** (1 - gamma)))
    return terms


def omega_synthesis(grid: CosetGrid) -> GridFunction:
    out = GridFunction.zero(grid)
    for el, c in omega_expansion(grid):
        term = build_f_r(grid) if el.kind == "f_r" else build_f(el.gamma, el.n, el.label, grid)
        out = out + term * c
    return out


# -- wavelets --------------------------------------------------------------------

def _wavelet_center(gamma: int, n, grid: CosetGrid) -> Fraction:
    p = grid.p
    n = Fraction(n)
    if gamma > grid.r:
        raise ValueError("wavelet support escapes B_r")
    _check_scale(gamma, grid)
    center = n * Fraction(p) ** (-gamma)
    if valuation(center, p) < -grid.r:
        raise ValueError("wavelet support escapes B_r")
    return center


def _check_j(j: int, p: int):
    if not 1 <= j < p:
        raise ValueError(f"j must lie in 1..{p - 1}")


def build_wavelet(gamma: int, n, j: int, grid: CosetGrid) -> GridFunction:
    """``p^(-gamma/2) chi(p^(gamma-1) j (x - p^-gamma n)) Omega(|p^gamma x - n|_p)``."""
    p = grid.p
    _check_j(j, p)
    center = _wavelet_center(gamma, n, grid)
    amp = p ** (-gamma / 2)
    shift = Fraction(p) ** (gamma - 1) * j
    vals = [amp * character(shift * (x - center), p) if ball_indicator(x, center, gamma, p) else 0j
            for x in grid.representatives]
    return GridFunction(grid, np.array(vals, dtype=complex))


def enumerate_wavelet_basis(grid: CosetGrid, include_constant: bool = True) -> BasisSet:
    p = grid.p
    elements, columns = [], []
    if include_constant:
        elements.append(BasisElement("constant", grid.r, Fraction(0), 0))
        columns.append(build_constant(grid).to_numpy())
    for gamma in reversed(scale_window(grid)):
        for c in ball_centers(grid, gamma):
            n = wavelet_offset(c, gamma, p)
            for j in range(1, p):
                elements.append(BasisElement("psi", gamma, n, j))
                columns.append(build_wavelet(gamma, n, j, grid).data)
    kind = "psi"
    return BasisSet(grid, kind, tuple(elements), np.stack(columns, axis=1))


# Change of basis between f/phi and psi.  Translating a wavelet by b p^-gamma
# multiplies it by chi(-j b / p) under chi(x) = exp(2 pi i {x}_p), so the
# phases below are the complex conjugates of the ones usually quoted.

def _unit_root(p: int, e: int) -> complex:
    return character(Fraction(e, p), p)


def f_from_wavelets(gamma: int, n, a: int, grid: CosetGrid) -> GridFunction:
    """``f_{gamma, p^-gamma n, a} = p^(gamma/2-1) sum_j chi(-j a / p) psi_{gamma,n,j}``."""
    p = grid.p
    out = np.zeros(grid.size, dtype=complex)
    for j in range(1, p):
        out += _unit_root(p, -j * a) * build_wavelet(gamma, n, j, grid).data
    return GridFunction(grid, p ** (gamma / 2 - 1) * out)


def phi_from_wavelets(gamma: int, n, b: int, grid: CosetGrid, k_sign="+") -> GridFunction:
    """``phi_{gamma, p^-gamma n, b} = (p^(-1/2)/k) sum_j (1 + k chi(-j b / p)) psi_{gamma,n,j}``."""
    p = grid.p
    k = float(root_of_orthogonality(p, k_sign))
    out = np.zeros(grid.size, dtype=complex)
    for j in range(1, p):
        out += (1 + k * _unit_root(p, -j * b)) * build_wavelet(gamma, n, j, grid).data
    return GridFunction(grid, p ** -0.5 / k * out)


def wavelet_from_f(gamma: int, n, j: int, grid: CosetGrid) -> GridFunction:
    """``psi_{gamma,n,j} = p^(-gamma/2) sum_a chi(j a / p) f_{gamma, p^-gamma n, a}``."""
    p = grid.p
    center = _wavelet_center(gamma, n, grid)
    out = np.zeros(grid.size, dtype=complex)
    for a in range(p):
        out += _unit_root(p, j * a) * build_f(gamma, center, a, grid).to_numpy()
    return GridFunction(grid, p ** (-gamma / 2) * out)


def wavelet_from_phi(gamma: int, n, j: int, grid: CosetGrid, k_sign="+") -> GridFunction:
    """``psi_{gamma,n,j} = p^(-1/2) sum_b ((k+1)/(p-k-1) + chi(j b / p)) phi_{gamma, p^-gamma n, b}``."""
    p = grid.p
    center = _wavelet_center(gamma, n, grid)
    k = float(root_of_orthogonality(p, k_sign))
    ratio = (k + 1) / (p - k - 1)
    out = np.zeros(grid.size, dtype=complex)
    for b in range(1, p):
        out += (ratio + _unit_root(p, j * b)) * build_phi(gamma, center, b, grid, k_sign).to_numpy()
    return GridFunction(grid, p ** -0.5 * out)


def f_from_phi(gamma: int, n, a: int, grid: CosetGrid, k_sign="+") -> GridFunction:
    """Inverse transition from the orthonormal family back to ``f_{gamma,n,a}`` (exact)."""
    p = grid.p
    k = root_of_orthogonality(p, k_sign)
    phis = [build_phi(gamma, n, b, grid, k_sign).data for b in range(1, p)]
    total = phis[0]
    for ph in phis[1:]:
        total = total + ph
    half = sqrt_p_power(gamma - 1, p)
    denom = p - k - 1
    if a == 0:
        return GridFunction(grid, total * (k * half / denom))
    if not 1 <= a < p:
        raise ValueError(f"a must lie in 0..{p - 1}")
    return GridFunction(grid, (phis[a - 1] - total * (1 / denom)) * half)
