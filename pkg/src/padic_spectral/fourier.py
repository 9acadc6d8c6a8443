"""Discrete Fourier analysis on ``B_r`` at resolution ``l``.

Frequencies are the representatives ``k_m = m p^l`` of ``B_{-l} / B_{-r}``
(digits at positions ``l .. r-1``, little-endian), so the transform is a
square ``p^(r-l)`` matrix in a fixed order.  The transform carries the
unitary normalization ``p^(-r/2)``.

Besides the floating point transform there is an exact test for vanishing of
character sums, used to check support/constancy duality without tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .functions import GridFunction
from .padic import CosetGrid, character, enumerate_cosets, frac_part, padic_norm, valuation


@dataclass(frozen=True)
class FrequencyGrid:
    p: int
    r: int
    l: int

    @property
    def size(self) -> int:
        return self.p ** (self.r - self.l)

    @property
    def frequencies(self) -> tuple[Fraction, ...]:
        return _frequencies(self.p, self.r, self.l)

    def index(self, k) -> int:
        """Index of the frequency congruent to ``k`` modulo ``B_{-r}``."""
        k = Fraction(k)
        if valuation(k, self.p) < self.l:
            raise ValueError(f"|{k}|_p exceeds p^(-l) for l={self.l}")
        y = k * Fraction(self.p) ** (-self.l)
        return y.numerator * pow(y.denominator, -1, self.size) % self.size

    def __len__(self):
        return self.size


@lru_cache(maxsize=None)
def _frequencies(p, r, l):
    step = Fraction(p) ** l
    return tuple(m * step for m in range(p ** (r - l)))


def frequency_grid(grid: CosetGrid) -> FrequencyGrid:
    return FrequencyGrid(grid.p, grid.r, grid.l)


@dataclass(frozen=True, eq=False)
class Spectrum:
    freq: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.values.shape != (self.freq.size,):
            raise ValueError("spectrum length does not match its frequency grid")

    def __getitem__(self, m):
        return self.values[m]

    @property
    def grid(self) -> CosetGrid:
        return enumerate_cosets(self.freq.p, self.freq.r, self.freq.l)


@lru_cache(maxsize=64)
def character_matrix(grid: CosetGrid) -> np.ndarray:
    """``C[k, m] = chi(k_k * x_m)``."""
    p = grid.p
    freqs = frequency_grid(grid).frequencies
    return np.array([[character(k * x, p) for x in grid.representatives] for k in freqs])


def _fixed_order_matvec(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    # left-to-right accumulation per output element, independent of BLAS
    out = np.empty(mat.shape[0], dtype=complex)
    for i in range(mat.shape[0]):
        acc = 0j
        for a, b in zip(mat[i], vec):
            acc += a * b
        out[i] = acc
    return out


def dft_forward(f: GridFunction) -> Spectrum:
    """``f~(k) = p^(-r/2) int_{B_r} chi(kx) f(x) d_p x``."""
    grid = f.grid
    scale = grid.p ** (-grid.r / 2) * float(grid.cell_measure)
    vals = _fixed_order_matvec(character_matrix(grid), f.to_numpy())
    return Spectrum(frequency_grid(grid), scale * vals)


def dft_inverse(spectrum: Spectrum) -> GridFunction:
    """``f(x) = p^(-r/2) sum_k chi(-kx) f~(k)``."""
    grid = spectrum.grid
    mat = character_matrix(grid).conj().T
    vals = _fixed_order_matvec(mat, spectrum.values)
    return GridFunction(grid, grid.p ** (-grid.r / 2) * vals)


def convolve_spectral(f: GridFunction, g: GridFunction) -> GridFunction:
    """``sum_k chi(-kx) f~(k) g~(k)``, which equals the convolution on ``B_r``."""
    f._check(g)
    prod = dft_forward(f).values * dft_forward(g).values
    mat = character_matrix(f.grid).conj().T
    return GridFunction(f.grid, _fixed_order_matvec(mat, prod))


@lru_cache(maxsize=64)
def frequency_difference_table(freq: FrequencyGrid) -> np.ndarray:
    ks = freq.frequencies
    return np.array([[freq.index(z - k) for k in ks] for z in ks], dtype=np.intp)


def product_spectrum(f: GridFunction, g: GridFunction) -> Spectrum:
    """``[fg]~(zeta) = p^(-r/2) sum_k f~(k) g~(zeta - k)``."""
    f._check(g)
    freq = frequency_grid(f.grid)
    ft, gt = dft_forward(f).values, dft_forward(g).values
    table = frequency_difference_table(freq)
    vals = _fixed_order_matvec(gt[table], ft)
    return Spectrum(freq, f.grid.p ** (-f.grid.r / 2) * vals)


def character_function(grid: CosetGrid, k) -> GridFunction:
    """``x -> chi(kx)`` on the grid (needs ``|k|_p <= p^(-l)``)."""
    k = Fraction(k)
    if valuation(k, grid.p) < grid.l:
        raise ValueError("frequency too high for the grid resolution")
    return GridFunction(grid, np.array([character(k * x, grid.p) for x in grid.representatives]))


# -- exact character sums ------------------------------------------------------

def phase_expansion(f: GridFunction, k) -> dict[Fraction, tuple[Fraction, Fraction]]:
    """Group ``sum_m f[m] chi(k x_m)`` by phase.

    Returns ``{q: (a, b)}`` meaning ``sum_q (a + b sqrt p) exp(2 pi i q)``,
    i.e. the unnormalized transform at ``k`` as an exact formal sum.
    """
    if not f.exact:
        raise ValueError("phase expansion needs an exact function")
    p = f.grid.p
    k = Fraction(k)
    out: dict[Fraction, list] = {}
    d = f.data
    for x, a, b in zip(f.grid.representatives, d.a, d.b):
        if not a and not b:
            continue
        q = frac_part(k * x, p)
        acc = out.setdefault(q, [Fraction(0), Fraction(0)])
        acc[0] += Fraction(a, d.den)
        acc[1] += Fraction(b, d.den)
    return {q: (v[0], v[1]) for q, v in out.items()}


def _rational_root_sum_is_zero(coeffs: dict[Fraction, Fraction], p: int) -> bool:
    # sum_j c_j zeta^j with zeta a primitive p^s-th root of unity vanishes iff
    # c is constant on every class {t + i p^(s-1) : 0 <= i < p}
    coeffs = {q: c for q, c in coeffs.items() if c}
    if not coeffs:
        return True
    s = max(int(math.log(q.denominator, p) + 0.5) for q in coeffs)
    if s == 0:
        return False
    n, step = p**s, p ** (s - 1)
    vec = [Fraction(0)] * n
    for q, c in coeffs.items():
        vec[q.numerator * (n // q.denominator)] += c
    return all(len({vec[t + i * step] for i in range(p)}) == 1 for t in range(step))


def phase_sum_is_zero(expansion: dict, p: int) -> bool:
    """Exact zero test for a phase expansion.

    The rational and surd parts are tested separately; this is necessary and
    sufficient for rational-valued functions and sufficient in general.
    """
    ra = {q: ab[0] for q, ab in expansion.items()}
    rb = {q: ab[1] for q, ab in expansion.items()}
    return _rational_root_sum_is_zero(ra, p) and _rational_root_sum_is_zero(rb, p)


def _subtract(e1: dict, e2: dict) -> dict:
    out = {q: (v[0], v[1]) for q, v in e1.items()}
    for q, (a, b) in e2.items():
        a0, b0 = out.get(q, (Fraction(0), Fraction(0)))
        out[q] = (a0 - a, b0 - b)
    return out


@dataclass(frozen=True)
class DualityReport:
    vanishing: bool
    constancy: bool
    checked_frequencies: int

    @property
    def ok(self) -> bool:
        return self.vanishing and self.constancy


def support_duality(f: GridFunction, r_fine: int, l_fine: int) -> DualityReport:
    """Check exactly that ``f`` in ``D_r^l`` has its transform in ``D_{-l}^{-r}``.

    ``f`` is embedded into the larger, finer window ``(r_fine, l_fine)``; its
    transform there must vanish for ``|k|_p > p^(-l)`` and be constant on
    cosets of ``B_{-r}``.
    """
    g = f.grid
    big = enumerate_cosets(g.p, r_fine, l_fine)
    fb = f.embed(big)
    freqs = FrequencyGrid(g.p, r_fine, l_fine).frequencies
    exps = [phase_expansion(fb, k) for k in freqs]
    vanishing = all(phase_sum_is_zero(e, g.p)
                    for k, e in zip(freqs, exps) if padic_norm(k, g.p) > Fraction(g.p) ** (-g.l))
    period = g.p ** (g.r - l_fine)  # k_m - k_m' in B_{-r}  <=>  m = m' mod period
    constancy = all(phase_sum_is_zero(_subtract(exps[m], exps[m % period]), g.p)
                    for m in range(period, len(freqs)))
    return DualityReport(vanishing, constancy, len(freqs))
