"""Exact p-adic arithmetic on rationals.

Valuations, norms, the fractional part and additive character, ball
indicators and the canonical enumeration of the cosets ``B_r / B_l``.
Everything here works on :class:`fractions.Fraction` and is exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Union

Rational = Union[int, Fraction]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p must be a prime integer, got {p!r}")
    return p


@dataclass(frozen=True)
class PrimeConfig:
    p: int

    def __post_init__(self):
        check_prime(self.p)


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: Rational, p: int) -> float | int:
    """p-adic valuation of ``x``; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def padic_norm(x: Rational, p: int) -> Fraction:
    """``|x|_p = p^(-v)``, with ``|0|_p = 0``."""
    v = valuation(x, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(p) ** (-v)


def frac_part(x: Rational, p: int) -> Fraction:
    """p-adic fractional part ``{x}_p`` in ``[0, 1)``.

    ``x - {x}_p`` lies in ``Z_p``. Only denominators that are pure powers of
    ``p`` are accepted.
    """
    x = Fraction(x)
    den = x.denominator
    s = _int_valuation(den, p)
    if den != p**s:
        raise ValueError(f"denominator of {x} is not a power of {p}")
    return Fraction(x.numerator % den, den)


_QUARTER_TURNS = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}


def character(x: Rational, p: int) -> complex:
    """Normalized additive character ``exp(2 pi i {x}_p)``."""
    q = frac_part(x, p)
    if q in _QUARTER_TURNS:
        return _QUARTER_TURNS[q]
    return cmath.exp(2j * math.pi * q.numerator / q.denominator)


def ball_indicator(x: Rational, center: Rational, gamma: int, p: int) -> int:
    """1 iff ``|x - center|_p <= p^gamma`` (the function Omega)."""
    return int(valuation(Fraction(x) - Fraction(center), p) >= -gamma)


def sphere_indicator(x: Rational, center: Rational, gamma: int, p: int) -> int:
    """1 iff ``|x - center|_p == p^gamma``."""
    return int(valuation(Fraction(x) - Fraction(center), p) == -gamma)


@dataclass(frozen=True)
class PAdicRational:
    """A rational number viewed in ``Q_p``, with its valuation cached."""

    value: Fraction
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    @cached_property
    def valuation(self):
        return valuation(self.value, self.p)

    @cached_property
    def norm(self) -> Fraction:
        return padic_norm(self.value, self.p)

    def frac(self) -> Fraction:
        return frac_part(self.value, self.p)

    def _coerce(self, other):
        if isinstance(other, PAdicRational):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other.value
        return Fraction(other)

    def __add__(self, other):
        return PAdicRational(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicRational(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return PAdicRational(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return PAdicRational(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PAdicRational(self.value / self._coerce(other), self.p)

    def __neg__(self):
        return PAdicRational(-self.value, self.p)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class CosetGrid:
    """Canonical representatives of ``B_r / B_l``.

    Representative ``m`` is ``sum_i a_i p^(-r+i)`` where ``a_i`` are the
    little-endian base-p digits of ``m``; that sum is just ``m / p^r``.
    """

    p: int
    r: int
    l: int
    representatives: tuple[Fraction, ...] = field(repr=False, compare=False, hash=False)

    @property
    def size(self) -> int:
        return self.p ** (self.r - self.l)

    @property
    def depth(self) -> int:
        return self.r - self.l

    @property
    def cell_measure(self) -> Fraction:
        """Haar measure ``p^l`` of one coset (``Z_p`` has measure 1)."""
        return Fraction(self.p) ** self.l

    @property
    def measure(self) -> Fraction:
        return Fraction(self.p) ** self.r

    def __len__(self):
        return self.size

    def index(self, x: Rational) -> int:
        return coset_index(x, self)

    def contains(self, x: Rational) -> bool:
        return valuation(x, self.p) >= -self.r


def enumerate_cosets(p: int, r: int, l: int) -> CosetGrid:
    return _enumerate_cosets(check_prime(p), int(r), int(l))


@lru_cache(maxsize=None)
def _enumerate_cosets(p: int, r: int, l: int) -> CosetGrid:
    if l >= r:
        raise ValueError(f"need l < r, got r={r}, l={l}")
    scale = Fraction(p) ** (-r)
    reps = tuple(m * scale for m in range(p ** (r - l)))
    return CosetGrid(p, r, l, reps)


def coset_index(x: Rational | PAdicRational, grid: CosetGrid) -> int:
    """Index ``m`` with ``|x - x_m|_p <= p^l``."""
    if isinstance(x, PAdicRational):
        x = x.value
    x = Fraction(x)
    p = grid.p
    if valuation(x, p) < -grid.r:
        raise ValueError(f"{x} lies outside B_{grid.r} for p={p}")
    y = x * Fraction(p) ** grid.r  # y in Z_p: denominator is a p-adic unit
    mod = grid.size
    return y.numerator * pow(y.denominator, -1, mod) % mod
