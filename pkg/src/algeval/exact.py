"""Exact arithmetic over the rationals and single quadratic extensions.

Rationals are plain :class:`fractions.Fraction` objects.  A value that may
carry a square root is an :class:`AlgebraicValue`, ``r + c*sqrt(d)`` with
rational ``r`` and ``c`` and an integer radicand ``d``.  Whether a square
root resolves is decided with integer square roots, never floats, so the
classification rational / irrational / imaginary is exact.
"""
from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

__all__ = [
    "Fraction",
    "Kind",
    "AlgebraicValue",
    "MixedRadicandError",
    "DegenerateEquationError",
    "as_fraction",
    "is_square",
    "sqrt_exact",
    "solve_quadratic",
    "decimal_render",
    "format_fraction",
    "parse_fraction",
    "format_value",
    "parse_value",
    "payload_token",
]

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1))]


class Kind(str, enum.Enum):
    RATIONAL = "RATIONAL"
    IRRATIONAL = "IRRATIONAL"
    IMAGINARY = "IMAGINARY"


class MixedRadicandError(ValueError):
    """Raised when combining values from two different quadratic extensions."""


class DegenerateEquationError(ValueError):
    """Raised by :func:`solve_quadratic` when every coefficient vanishes
    (every number is a root) or only the constant survives (no root)."""

    def __init__(self, message, has_solution):
        super().__init__(message)
        self.has_solution = has_solution


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, AlgebraicValue):
        if not x.is_rational:
            raise ValueError(f"{x} is not rational")
        return x.rational
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _split_square(m: int) -> tuple[int, int]:
    """Write nonzero ``m`` as ``s*s*k`` and return ``(s, k)``.

    Small prime squares are removed by trial division and a leftover perfect
    square is caught by ``isqrt``; ``k`` is not guaranteed squarefree.
    """
    sign = -1 if m < 0 else 1
    m = abs(m)
    if is_square(m):
        return math.isqrt(m), sign
    s = 1
    for p in _SMALL_PRIMES:
        pp = p * p
        if pp > m:
            break
        while m % pp == 0:
            m //= pp
            s *= p
    if m > 1 and is_square(m):
        s *= math.isqrt(m)
        m = 1
    return s, sign * m


class AlgebraicValue:
    """``rational + coefficient * sqrt(radicand)``.

    The radicand is kept as an integer (a rational radicand ``n/d`` is
    rewritten as ``sqrt(n*d)/d``).  A zero coefficient or a square radicand
    collapses the value to a plain rational with radicand 1.
    """

    __slots__ = ("rational", "coefficient", "radicand")

    def __init__(self, rational=0, coefficient=0, radicand=1):
        r = as_fraction(rational)
        c = as_fraction(coefficient)
        d = as_fraction(radicand)
        if c and d:
            # sqrt(n/q) = sqrt(n*q)/q
            m = d.numerator * d.denominator
            c = c / d.denominator
            s, k = _split_square(m)
            c *= s
            if k == 1:
                r, c, k = r + c, Fraction(0), 1
        else:
            c, k = Fraction(0), 1
        object.__setattr__(self, "rational", r)
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "radicand", k)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraicValue is immutable")

    @classmethod
    def _raw(cls, r, c, d):
        obj = object.__new__(cls)
        if not c or d == 1:
            r, c, d = r + (c if d == 1 else 0), Fraction(0), 1
        object.__setattr__(obj, "rational", r)
        object.__setattr__(obj, "coefficient", c)
        object.__setattr__(obj, "radicand", d)
        return obj

    # classification ---------------------------------------------------

    @property
    def kind(self) -> Kind:
        if not self.coefficient:
            return Kind.RATIONAL
        if self.radicand < 0:
            return Kind.IMAGINARY
        return Kind.IRRATIONAL

    @property
    def is_rational(self) -> bool:
        return not self.coefficient

    @property
    def is_real(self) -> bool:
        return self.kind is not Kind.IMAGINARY

    # arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, AlgebraicValue):
            o = other
        else:
            try:
                return AlgebraicValue._raw(as_fraction(other), Fraction(0), 1), self.radicand
            except TypeError:
                return None, None
        if o.is_rational or self.is_rational or o.radicand == self.radicand:
            return o, self.radicand if not self.is_rational else o.radicand
        # same extension iff d1*d2 is a square: sqrt(d2) = (s/d1) sqrt(d1)
        prod = self.radicand * o.radicand
        if prod > 0 and is_square(prod):
            factor = Fraction(math.isqrt(prod), abs(self.radicand))
            return AlgebraicValue._raw(o.rational, o.coefficient * factor, self.radicand), self.radicand
        raise MixedRadicandError(
            f"sqrt({self.radicand}) and sqrt({o.radicand}) lie in different extensions"
        )

    def __add__(self, other):
        o, d = self._coerce(other)
        if o is None:
            return NotImplemented
        return AlgebraicValue._raw(self.rational + o.rational, self.coefficient + o.coefficient, d)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicValue._raw(-self.rational, -self.coefficient, self.radicand)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o, d = self._coerce(other)
        if o is None:
            return NotImplemented
        return AlgebraicValue._raw(self.rational - o.rational, self.coefficient - o.coefficient, d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o, d = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.rational, self.coefficient
        c, e = o.rational, o.coefficient
        return AlgebraicValue._raw(a * c + b * e * d, a * e + b * c, d)

    __rmul__ = __mul__

    def conjugate(self) -> "AlgebraicValue":
        """Galois conjugate ``r - c*sqrt(d)``."""
        return AlgebraicValue._raw(self.rational, -self.coefficient, self.radicand)

    def norm(self) -> Fraction:
        return self.rational ** 2 - self.coefficient ** 2 * self.radicand

    def inverse(self) -> "AlgebraicValue":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        conj = self.conjugate()
        return AlgebraicValue._raw(conj.rational / n, conj.coefficient / n, self.radicand)

    def __truediv__(self, other):
        o, d = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o, d = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** -n
        result = AlgebraicValue(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # ordering (real values only) ----------------------------------------

    def sign(self) -> int:
        if self.kind is Kind.IMAGINARY:
            raise TypeError("imaginary values are not ordered")
        a, b = self.rational, self.coefficient
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = a * a - b * b * self.radicand
        return sa if diff > 0 else sb

    def __eq__(self, other):
        try:
            o, d = self._coerce(other)
        except MixedRadicandError:
            return False
        if o is None:
            return NotImplemented
        return self.rational == o.rational and self.coefficient == o.coefficient

    def __hash__(self):
        if self.is_rational:
            return hash(self.rational)
        return hash((self.rational, self.kind))

    def _cmp(self, other):
        diff = self - other
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return bool(self.rational) or bool(self.coefficient)

    def __floor__(self):
        if self.is_rational:
            return math.floor(self.rational)
        if not self.is_real:
            raise TypeError("imaginary values have no floor")
        b2d = self.coefficient ** 2 * self.radicand
        f = math.isqrt(b2d.numerator // b2d.denominator)
        # radical part lies strictly inside (lo, lo + 1)
        lo = f if self.coefficient > 0 else -f - 1
        n = math.floor(self.rational + lo)
        return n + 1 if self >= n + 1 else n

    def __float__(self):
        if not self.is_real:
            raise TypeError("imaginary values have no float value")
        return float(self.rational) + float(self.coefficient) * math.sqrt(self.radicand)

    def real_imag(self) -> tuple[float, float]:
        """Approximate real and imaginary parts, for display."""
        if self.is_real:
            return float(self), 0.0
        return float(self.rational), float(self.coefficient) * math.sqrt(-self.radicand)

    def __repr__(self):
        return f"AlgebraicValue({format_value(self)!r})"

    def __str__(self):
        return format_value(self)


def _lift(x) -> AlgebraicValue:
    return x if isinstance(x, AlgebraicValue) else AlgebraicValue(as_fraction(x))


def sqrt_exact(x) -> AlgebraicValue:
    """Square root of a rational, resolved exactly when it is a rational square.

    >>> sqrt_exact(Fraction(338964921, 400000000000000))
    AlgebraicValue('18411/20000000')
    """
    x = as_fraction(x)
    if x == 0:
        return AlgebraicValue(0)
    if x > 0 and is_square(x.numerator) and is_square(x.denominator):
        return AlgebraicValue(Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator)))
    return AlgebraicValue(0, 1, x)


def solve_quadratic(a, b, c) -> tuple[AlgebraicValue, ...]:
    """Exact roots of ``a*x**2 + b*x + c``.

    Two roots are returned for a proper quadratic (ascending when real, a
    repeated root twice), one root when ``a == 0``.  When ``a == b == 0``
    :class:`DegenerateEquationError` is raised.
    """
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    if a == 0:
        if b == 0:
            if c == 0:
                raise DegenerateEquationError("every value is a root", has_solution=True)
            raise DegenerateEquationError("no solution", has_solution=False)
        return (AlgebraicValue(-c / b),)
    root = sqrt_exact(b * b - 4 * a * c)
    plus = (root - b) / (2 * a)
    minus = (-root - b) / (2 * a)
    if plus.is_real and plus < minus:
        return plus, minus
    if plus.is_real:
        return minus, plus
    return plus, minus


def _round_half_even(x: Fraction, digits: int) -> int:
    return round(x * 10 ** digits)


def _fixed(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _real_digits(x: AlgebraicValue, digits: int) -> int:
    if x.is_rational:
        return _round_half_even(x.rational, digits)
    # an irrational value is never exactly halfway between two decimals
    return math.floor(x * 10 ** digits + Fraction(1, 2))


def decimal_render(x, digits: int = 3) -> str:
    """Correctly rounded decimal string with ``digits`` fractional digits.

    Ties (possible only for rationals) round half to even.  Imaginary values
    render as ``IMAGINARY(re+imi)``.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = _lift(x)
    if x.is_real:
        return _fixed(_real_digits(x, digits), digits)
    re_part = _fixed(_round_half_even(x.rational, digits), digits)
    im = AlgebraicValue(0, abs(x.coefficient), -x.radicand)
    im_part = _fixed(_real_digits(im, digits), digits)
    return f"IMAGINARY({re_part}+{im_part}i)"


def format_fraction(x) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?|[+-]?\d*\.\d+", text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_value(x) -> str:
    """Serialize as ``p/q`` or ``p/q + (r/s)*sqrt(t/u)``."""
    x = _lift(x)
    if x.is_rational:
        return format_fraction(x.rational)
    return f"{format_fraction(x.rational)} + ({format_fraction(x.coefficient)})*sqrt({x.radicand}/1)"


_VALUE_RE = re.compile(
    r"\s*(?P<r>[+-]?\d+(?:/\d+)?)\s*\+\s*\((?P<c>[+-]?\d+(?:/\d+)?)\)\*sqrt\((?P<d>[+-]?\d+(?:/\d+)?)\)\s*"
)


def parse_value(text: str) -> AlgebraicValue:
    """Inverse of :func:`format_value`; also accepts payload tokens
    ``IRRATIONAL(...)`` wrapping a value."""
    text = text.strip()
    m = re.fullmatch(r"(?:IRRATIONAL|IMAGINARY)\((.*)\)", text)
    if m:
        text = m.group(1)
    m = _VALUE_RE.fullmatch(text)
    if m:
        return AlgebraicValue(Fraction(m["r"]), Fraction(m["c"]), Fraction(m["d"]))
    return AlgebraicValue(parse_fraction(text))


def payload_token(x) -> str:
    """Report token: the fraction, ``IRRATIONAL(<value>)`` or ``IMAGINARY``."""
    x = _lift(x)
    if x.kind is Kind.RATIONAL:
        return format_fraction(x.rational)
    if x.kind is Kind.IRRATIONAL:
        return f"IRRATIONAL({format_value(x)})"
    return "IMAGINARY"
