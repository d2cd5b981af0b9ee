"""Exact rationals extended with +inf and -inf.

Every scalar of the toolkit (lengths, slopes, log-norms, eps bounds) is either a
``Fraction`` or an ``ExtendedRational``. Floats are rejected on input.
"""
import math
from fractions import Fraction
from functools import total_ordering

from util.exceptions import InfiniteArithmeticError

INFINITY_TOKENS = {'inf': 1, '+inf': 1, '-inf': -1}


def to_fraction(value):
    """Parse an int, Fraction, finite ExtendedRational or "p/q" text into a Fraction."""
    if isinstance(value, bool):
        raise TypeError(f"Value [{value!r}] is not an exact rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, ExtendedRational):
        return value.fraction
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise ValueError(f"Value [{value}] is not a rational")
    raise TypeError(f"Value [{value!r}] is not an exact rational")


def format_rational(value):
    """Render as "p/q" (always with a denominator) or "inf"/"-inf"."""
    return str(ExtendedRational(value))


@total_ordering
class ExtendedRational:
    """Rational number or one of the two infinities"""

    __slots__ = ('_value', '_sign')

    def __init__(self, value=0):
        if isinstance(value, ExtendedRational):
            self._value, self._sign = value._value, value._sign
        elif isinstance(value, str) and value.strip().lower() in INFINITY_TOKENS:
            self._value, self._sign = None, INFINITY_TOKENS[value.strip().lower()]
        else:
            self._value, self._sign = to_fraction(value), 0

    @classmethod
    def infinity(cls, sign=1):
        assert sign in (1, -1)
        return cls('inf' if sign > 0 else '-inf')

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExtendedRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ExtendedRational(other)
        return None

    @property
    def is_finite(self):
        return self._sign == 0

    @property
    def is_infinite(self):
        return self._sign != 0

    @property
    def fraction(self):
        if self._sign:
            raise InfiniteArithmeticError(f"{self} has no finite value")
        return self._value

    def sign(self):
        if self._sign:
            return self._sign
        return (self._value > 0) - (self._value < 0)

    def _key(self):
        return (self._sign, self._value if self._sign == 0 else 0)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_finite and other.is_finite:
            return ExtendedRational(self._value + other._value)
        if self.is_infinite and other.is_infinite and self._sign != other._sign:
            raise InfiniteArithmeticError("inf + (-inf) is undefined")
        return ExtendedRational.infinity(self._sign or other._sign)

    __radd__ = __add__

    def __neg__(self):
        if self.is_finite:
            return ExtendedRational(-self._value)
        return ExtendedRational.infinity(-self._sign)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_finite and other.is_finite:
            return ExtendedRational(self._value * other._value)
        sign = self.sign() * other.sign()
        if sign == 0:
            raise InfiniteArithmeticError("0 * inf is undefined")
        return ExtendedRational.infinity(sign)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_infinite:
            if self.is_infinite:
                raise InfiniteArithmeticError("inf / inf is undefined")
            return ExtendedRational(0)
        if other._value == 0:
            raise ZeroDivisionError(f"{self} / 0")
        if self.is_finite:
            return ExtendedRational(self._value / other._value)
        return ExtendedRational.infinity(self._sign * other.sign())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __floor__(self):
        return math.floor(self.fraction)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._key() < other._key()

    def __hash__(self):
        if self.is_finite:
            return hash(self._value)
        return hash(('inf', self._sign))

    def __str__(self):
        if self._sign > 0:
            return 'inf'
        if self._sign < 0:
            return '-inf'
        return f"{self._value.numerator}/{self._value.denominator}"

    def __repr__(self):
        return f"ExtendedRational('{self}')"


INF = ExtendedRational.infinity(1)
NEG_INF = ExtendedRational.infinity(-1)
