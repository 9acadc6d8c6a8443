"""Scalar backends: exact ``Q(sqrt p)`` and complex floating point.

:class:`QuadScalar` is a single element ``a + b sqrt(p)`` with rational
``a``, ``b``.  :class:`QuadArray` holds whole vectors/matrices over the same
field as integer numerator arrays over one common denominator, which keeps
exact Gram matrices and operator products fast enough at a few hundred
dimensions.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .padic import check_prime


class QuadScalar:
    """Element ``a + b*sqrt(p)`` of the real quadratic field ``Q(sqrt p)``."""

    __slots__ = ("a", "b", "p")

    def __init__(self, a=0, b=0, p: int = 2):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.p = p

    @classmethod
    def coerce(cls, x, p: int) -> "QuadScalar":
        if isinstance(x, QuadScalar):
            if x.p != p and x.b != 0:
                raise ValueError(f"cannot mix Q(sqrt {x.p}) and Q(sqrt {p})")
            return x if x.p == p else cls(x.a, 0, p)
        if isinstance(x, (int, Fraction)):
            return cls(x, 0, p)
        raise TypeError(f"cannot convert {type(x).__name__} to QuadScalar")

    def _other(self, other):
        try:
            return QuadScalar.coerce(other, self.p)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a + o.a, self.b + o.b, self.p)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.p)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a - o.a, self.b - o.b, self.p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        p = self.p
        return QuadScalar(self.a * o.a + p * self.b * o.b, self.a * o.b + self.b * o.a, p)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a^2 - p b^2``; zero only for the zero element."""
        return self.a * self.a - self.p * self.b * self.b

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b, self.p)

    def inverse(self) -> "QuadScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt p)")
        return QuadScalar(self.a / n, -self.b / n, self.p)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QuadScalar(1, 0, self.p), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.p)

    def __complex__(self):
        return complex(float(self))

    def __repr__(self):
        return f"QuadScalar({self.a!s}, {self.b!s}, p={self.p})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}*sqrt({self.p})"

    def to_pair(self) -> tuple[str, str]:
        return str(self.a), str(self.b)

    @classmethod
    def from_pair(cls, pair: Sequence[str], p: int) -> "QuadScalar":
        a, b = pair
        return cls(Fraction(a), Fraction(b), p)


def sqrt_p_power(e: int, p: int) -> QuadScalar:
    """``p^(e/2)`` as an exact element of ``Q(sqrt p)``."""
    if e % 2 == 0:
        return QuadScalar(Fraction(p) ** (e // 2), 0, p)
    return QuadScalar(0, Fraction(p) ** ((e - 1) // 2), p)


def root_of_orthogonality(p: int, sign: str = "+") -> QuadScalar:
    """Root ``k = -1 +/- sqrt(p)`` of ``p - 1 - 2k - k^2 = 0``."""
    check_prime(p)
    s = _sign(sign)
    k = QuadScalar(-1, s, p)
    assert p - 1 - 2 * k - k * k == 0
    return k


def _sign(sign) -> int:
    if sign in ("+", "plus", 1, "+1"):
        return 1
    if sign in ("-", "−", "minus", -1, "-1"):
        return -1
    raise ValueError(f"k-sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True)
class ScalarBackend:
    tag: str
    tolerance: float = 0.0

    @property
    def exact(self) -> bool:
        return self.tag == "exact"

    def close(self, x, y) -> bool:
        if self.exact:
            return x == y
        x, y = complex(x), complex(y)
        return abs(x - y) <= self.tolerance * max(1.0, abs(x), abs(y))


EXACT = ScalarBackend("exact", 0.0)
FLOAT = ScalarBackend("float", 1e-10)

_BACKEND_NAMES = {"exact": EXACT, "exact-quad": EXACT, "float": FLOAT, "complex-float": FLOAT}


def get_backend(name: str | ScalarBackend) -> ScalarBackend:
    if isinstance(name, ScalarBackend):
        return name
    try:
        return _BACKEND_NAMES[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; use 'exact' or 'float'") from None


# -- exact arrays ------------------------------------------------------------

_INT64_LIMIT = 2**62
_to_pyint = np.frompyfunc(int, 1, 1)


def _int_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=object)
    if not arr.size:
        return arr
    return np.asarray(_to_pyint(arr), dtype=object)


def _absmax(x: np.ndarray) -> int:
    return int(np.abs(x).max()) if x.size else 0


def _int_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact integer matmul; machine ints when no overflow is possible."""
    inner = x.shape[-1] if x.ndim else 1
    if _absmax(x) * _absmax(y) * max(inner, 1) < _INT64_LIMIT:
        out = np.matmul(x.astype(np.int64), y.astype(np.int64))
        return _int_array(out)
    return np.matmul(x, y)


def _array_gcd(*arrays: np.ndarray) -> int:
    g = 0
    for arr in arrays:
        for v in arr.flat:
            if v:
                g = math.gcd(g, v)
                if g == 1:
                    return 1
    return g


class QuadArray:
    """Exact array over ``Q(sqrt p)``: ``(a + b*sqrt(p)) / den``.

    ``a`` and ``b`` are object arrays of Python ints, ``den`` a positive int.
    The representation is kept canonical (``gcd(a, b, den) == 1``), so two
    arrays are equal exactly when their fields are.
    """

    __slots__ = ("a", "b", "den", "p")
    __array_ufunc__ = None

    def __init__(self, a, b, den: int, p: int):
        a = _int_array(a)
        b = _int_array(b)
        if a.shape != b.shape:
            raise ValueError("shape mismatch between rational and surd parts")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        g = math.gcd(_array_gcd(a, b), den)
        if g > 1:
            # floor division of a 0-d object array yields a bare int
            a = _int_array(a // g)
            b = _int_array(b // g)
            den //= g
        self.a, self.b, self.den, self.p = a, b, den, p

    # construction
    @classmethod
    def zeros(cls, shape, p: int) -> "QuadArray":
        z = np.zeros(shape, dtype=object)
        z[...] = 0
        return cls(z, z.copy(), 1, p)

    @classmethod
    def eye(cls, n: int, p: int) -> "QuadArray":
        out = cls.zeros((n, n), p)
        for i in range(n):
            out.a[i, i] = 1
        return out

    @classmethod
    def from_scalars(cls, values, p: int) -> "QuadArray":
        arr = np.asarray(values, dtype=object)
        flat = [QuadScalar.coerce(v, p) for v in arr.flat]
        den = 1
        for q in flat:
            den = math.lcm(den, q.a.denominator, q.b.denominator)
        a = np.array([q.a.numerator * (den // q.a.denominator) for q in flat] or [], dtype=object)
        b = np.array([q.b.numerator * (den // q.b.denominator) for q in flat] or [], dtype=object)
        return cls(a.reshape(arr.shape), b.reshape(arr.shape), den, p)

    from_rationals = from_scalars

    @classmethod
    def stack(cls, arrays: Sequence["QuadArray"], axis: int = 0) -> "QuadArray":
        p = arrays[0].p
        den = 1
        for arr in arrays:
            den = math.lcm(den, arr.den)
        a = np.stack([arr.a * (den // arr.den) for arr in arrays], axis=axis)
        b = np.stack([arr.b * (den // arr.den) for arr in arrays], axis=axis)
        return cls(a, b, den, p)

    # array protocol-ish
    @property
    def shape(self):
        return self.a.shape

    @property
    def ndim(self):
        return self.a.ndim

    @property
    def size(self):
        return self.a.size

    def __len__(self):
        return len(self.a)

    @property
    def T(self) -> "QuadArray":
        return QuadArray(self.a.T, self.b.T, self.den, self.p)

    def is_rational(self) -> bool:
        return not any(self.b.flat)

    def __getitem__(self, idx):
        a, b = self.a[idx], self.b[idx]
        if not isinstance(a, np.ndarray):
            return QuadScalar(Fraction(a, self.den), Fraction(b, self.den), self.p)
        return QuadArray(a, b, self.den, self.p)

    def take(self, indices) -> "QuadArray":
        idx = np.asarray(indices)
        return QuadArray(self.a[idx], self.b[idx], self.den, self.p)

    def scalars(self) -> list:
        return [QuadScalar(Fraction(x, self.den), Fraction(y, self.den), self.p)
                for x, y in zip(self.a.flat, self.b.flat)]

    def to_numpy(self) -> np.ndarray:
        """Float embedding using the positive square root."""
        s = math.sqrt(self.p)
        d = self.den
        out = np.array([x / d + (y / d) * s for x, y in zip(self.a.flat, self.b.flat)], dtype=float)
        return out.reshape(self.shape)

    # arithmetic
    def _coerce(self, other) -> "QuadArray | None":
        if isinstance(other, QuadArray):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction, QuadScalar)):
            q = QuadScalar.coerce(other, self.p)
            return _scalar_array(q)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = math.lcm(self.den, o.den)
        fs, fo = den // self.den, den // o.den
        return QuadArray(self.a * fs + o.a * fo, self.b * fs + o.b * fo, den, self.p)

    __radd__ = __add__

    def __neg__(self):
        return QuadArray(-self.a, -self.b, self.den, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p
        a = self.a * o.a + p * (self.b * o.b)
        b = self.a * o.b + self.b * o.a
        return QuadArray(a, b, self.den * o.den, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, QuadScalar)):
            return self * QuadScalar.coerce(other, self.p).inverse()
        return NotImplemented

    def __matmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.p
        a = _int_matmul(self.a, o.a)
        b_self, b_other = any(self.b.flat), any(o.b.flat)
        b = np.zeros_like(a)
        if b_self and b_other:
            a = a + p * _int_matmul(self.b, o.b)
        if b_other:
            b = b + _int_matmul(self.a, o.b)
        if b_self:
            b = b + _int_matmul(self.b, o.a)
        out = QuadArray(a, b, self.den * o.den, p)
        return out[()] if out.ndim == 0 else out

    def sum(self, axis=None):
        a = self.a.sum(axis=axis)
        b = self.b.sum(axis=axis)
        if not isinstance(a, np.ndarray):
            return QuadScalar(Fraction(int(a), self.den), Fraction(int(b), self.den), self.p)
        return QuadArray(a, b, self.den, self.p)

    def __eq__(self, other):
        if isinstance(other, QuadArray):
            return (self.p == other.p and self.shape == other.shape and self.den == other.den
                    and np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.a.flat) and not any(self.b.flat)

    def __repr__(self):
        return f"QuadArray(shape={self.shape}, p={self.p}, den={self.den})"


def _scalar_array(q: QuadScalar) -> QuadArray:
    den = math.lcm(q.a.denominator, q.b.denominator)
    a = np.empty((), dtype=object)
    b = np.empty((), dtype=object)
    a[()] = q.a.numerator * (den // q.a.denominator)
    b[()] = q.b.numerator * (den // q.b.denominator)
    return QuadArray(a, b, den, q.p)


def to_quad_array(values: Iterable, p: int) -> QuadArray:
    if isinstance(values, QuadArray):
        return values
    return QuadArray.from_scalars(list(values), p)


def is_exact_scalar(x) -> bool:
    return isinstance(x, (QuadScalar, Fraction)) or (
        isinstance(x, numbers.Integral) and not isinstance(x, bool))
