"""Locally constant functions on ``B_r`` at constancy exponent ``l``.

A :class:`GridFunction` stores one value per coset of ``B_r / B_l`` in the
canonical order of :func:`~padic_spectral.padic.enumerate_cosets`.  Values
live either in an exact :class:`~padic_spectral.scalars.QuadArray` or in a
complex128 numpy array.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .padic import CosetGrid, ball_indicator, coset_index, valuation
from .scalars import (EXACT, FLOAT, QuadArray, ScalarBackend,
                      get_backend, is_exact_scalar)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: CosetGrid
    data: QuadArray | np.ndarray

    def __post_init__(self):
        if isinstance(self.data, QuadArray):
            if self.data.p != self.grid.p:
                raise ValueError("exact values must live in Q(sqrt p) for the grid's p")
            shape = self.data.shape
        else:
            object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))
            shape = self.data.shape
        if shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {shape}")

    # constructors
    @classmethod
    def from_values(cls, grid: CosetGrid, values: Iterable, backend=None) -> "GridFunction":
        values = list(values)
        if backend is None:
            backend = EXACT if all(is_exact_scalar(v) for v in values) else FLOAT
        backend = get_backend(backend)
        if backend.exact:
            return cls(grid, QuadArray.from_scalars(values, grid.p))
        return cls(grid, np.array([complex(v) for v in values], dtype=complex))

    @classmethod
    def from_callable(cls, grid: CosetGrid, fn: Callable, backend=None) -> "GridFunction":
        return cls.from_values(grid, [fn(x) for x in grid.representatives], backend)

    @classmethod
    def constant(cls, grid: CosetGrid, value=1, backend=EXACT) -> "GridFunction":
        return cls.from_values(grid, [value] * grid.size, backend)

    @classmethod
    def zero(cls, grid: CosetGrid, backend=EXACT) -> "GridFunction":
        return cls.constant(grid, 0, backend)

    @classmethod
    def indicator(cls, grid: CosetGrid, center, gamma: int, backend=EXACT) -> "GridFunction":
        """Indicator of the ball ``B_gamma(center)``; needs ``gamma >= l``."""
        if gamma < grid.l:
            raise ValueError("ball is finer than the grid resolution")
        return cls.from_values(grid, ball_mask(grid, Fraction(center), gamma), backend)

    @classmethod
    def from_cosets(cls, grid: CosetGrid, indices: Iterable[int], backend=EXACT) -> "GridFunction":
        vals = [0] * grid.size
        for m in indices:
            vals[m] = 1
        return cls.from_values(grid, vals, backend)

    # views
    @property
    def backend(self) -> ScalarBackend:
        return EXACT if isinstance(self.data, QuadArray) else FLOAT

    @property
    def exact(self) -> bool:
        return isinstance(self.data, QuadArray)

    @property
    def values(self) -> list:
        if self.exact:
            return self.data.scalars()
        return list(self.data)

    def __len__(self):
        return self.grid.size

    def __getitem__(self, m: int):
        return self.data[m]

    def __call__(self, x):
        return self.data[coset_index(x, self.grid)]

    def to_float(self) -> "GridFunction":
        if self.exact:
            return GridFunction(self.grid, self.data.to_numpy().astype(complex))
        return self

    def to_numpy(self) -> np.ndarray:
        return self.data.to_numpy().astype(complex) if self.exact else self.data

    def embed(self, grid: CosetGrid) -> "GridFunction":
        """Re-express on a finer and/or larger window.

        Values are replicated across sub-cosets and the function is extended
        by zero outside its original ball.
        """
        if grid.p != self.grid.p or grid.l > self.grid.l or grid.r < self.grid.r:
            raise ValueError("target grid must refine and contain the source grid")
        idx, inside = _embedding_map(self.grid, grid)
        if self.exact:
            data = self.data.take(idx) * QuadArray.from_scalars(inside, grid.p)
        else:
            data = self.data[idx] * np.asarray(inside, dtype=float)
        return GridFunction(grid, data)

    # arithmetic
    def _check(self, other: "GridFunction"):
        if not isinstance(other, GridFunction):
            raise TypeError("expected a GridFunction")
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def _pair(self, other):
        self._check(other)
        if self.exact and other.exact:
            return self.data, other.data
        return self.to_numpy(), other.to_numpy()

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        x, y = self._pair(other)
        return GridFunction(self.grid, x + y)

    def __sub__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        x, y = self._pair(other)
        return GridFunction(self.grid, x - y)

    def __neg__(self):
        return GridFunction(self.grid, -self.data)

    def __mul__(self, c):
        if isinstance(c, GridFunction):
            return pointwise_product(self, c)
        if self.exact and is_exact_scalar(c):
            return GridFunction(self.grid, self.data * c)
        return GridFunction(self.grid, self.to_numpy() * complex(c))

    __rmul__ = __mul__

    def max_abs_diff(self, other: "GridFunction") -> float:
        self._check(other)
        if self.exact and other.exact:
            d = self.data - other.data
            return 0.0 if d.is_zero() else float(np.abs(d.to_numpy()).max())
        return float(np.abs(self.to_numpy() - other.to_numpy()).max())

    def equals(self, other: "GridFunction", tol: float | None = None) -> bool:
        """Exact equality for exact pairs, otherwise sup-norm within ``tol``."""
        self._check(other)
        if self.exact and other.exact and not tol:
            return self.data == other.data
        return self.max_abs_diff(other) <= (FLOAT.tolerance if tol is None else tol)

    def __repr__(self):
        g = self.grid
        return f"GridFunction(p={g.p}, r={g.r}, l={g.l}, backend={self.backend.tag})"


@lru_cache(maxsize=4096)
def ball_mask(grid: CosetGrid, center: Fraction, gamma: int) -> tuple[int, ...]:
    p = grid.p
    return tuple(ball_indicator(x, center, gamma, p) for x in grid.representatives)


@lru_cache(maxsize=256)
def _embedding_map(src: CosetGrid, dst: CosetGrid):
    idx, inside = [], []
    for x in dst.representatives:
        if valuation(x, src.p) >= -src.r:
            idx.append(coset_index(x, src))
            inside.append(1)
        else:
            idx.append(0)
            inside.append(0)
    return np.array(idx), tuple(inside)


@lru_cache(maxsize=256)
def difference_table(grid: CosetGrid) -> np.ndarray:
    """``D[m, m'] = coset_index(x_m - x_m')``; ``B_r`` is an additive group."""
    reps = grid.representatives
    return np.array([[coset_index(x - y, grid) for y in reps] for x in reps], dtype=np.intp)


def integrate(f: GridFunction):
    """Haar integral ``p^l * sum_m f[m]``."""
    if f.exact:
        return f.data.sum() * f.grid.cell_measure
    return complex(f.data.sum() * float(f.grid.cell_measure))


def inner_product(f: GridFunction, g: GridFunction):
    """``int_{B_r} conj(f) g d_p x``; the conjugate is a no-op on exact values.

    Mixed exact/float pairs are evaluated in floating point.
    """
    f._check(g)
    if f.exact and g.exact:
        return (f.data @ g.data) * f.grid.cell_measure
    return complex(np.vdot(f.to_numpy(), g.to_numpy()) * float(f.grid.cell_measure))


def norm_squared(f: GridFunction):
    return inner_product(f, f)


def pointwise_product(f: GridFunction, g: GridFunction) -> GridFunction:
    x, y = f._pair(g)
    return GridFunction(f.grid, x * y)


def convolve_direct(f: GridFunction, g: GridFunction) -> GridFunction:
    """``h(x) = int_{B_r} f(y) g(x - y) d_p y`` as a direct double sum."""
    f._check(g)
    table = difference_table(f.grid)
    if f.exact and g.exact:
        gmat = QuadArray(g.data.a[table], g.data.b[table], g.data.den, g.data.p)
        return GridFunction(f.grid, (gmat @ f.data) * f.grid.cell_measure)
    gmat = g.to_numpy()[table]
    h = np.zeros(f.grid.size, dtype=complex)
    fv = f.to_numpy()
    cell = float(f.grid.cell_measure)
    for m in range(f.grid.size):
        acc = 0j
        row = gmat[m]
        for mp in range(f.grid.size):
            acc += fv[mp] * row[mp]
        h[m] = cell * acc
    return GridFunction(f.grid, h)
