"""Exact coefficient fields: the rationals and prime fields.

Field elements support the usual operators, so polynomial and series code
can stay field-agnostic.  Rational coefficients are plain ``Fraction``
values; prime-field coefficients are small wrapper objects carrying their
modulus.  No floating point appears anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import TruncasError


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


class Rationals:
    """The field of rational numbers; elements are ``Fraction`` values."""

    characteristic = 0

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __call__(self, value) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, FpElement):
            raise TruncasError("cannot coerce a prime-field element into Q")
        return Fraction(value)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class FpElement:
    """An element of F_p.  Arithmetic stays within one modulus."""

    __slots__ = ("r", "p")

    def __init__(self, r: int, p: int):
        self.r = r % p
        self.p = p

    def _check(self, other):
        if not isinstance(other, FpElement) or other.p != self.p:
            raise TruncasError("mixed-field arithmetic")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FpElement(self.r + other.r, self.p)

    def __sub__(self, other):
        other = self._check(other)
        return FpElement(self.r - other.r, self.p)

    def __mul__(self, other):
        other = self._check(other)
        return FpElement(self.r * other.r, self.p)

    def __truediv__(self, other):
        other = self._check(other)
        if other.r == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return FpElement(self.r * pow(other.r, self.p - 2, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.r, self.p)

    def __pow__(self, n: int):
        return FpElement(pow(self.r, n, self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, FpElement) and other.p == self.p and other.r == self.r

    def __hash__(self):
        return hash((self.r, self.p))

    def __bool__(self):
        return self.r != 0

    def __repr__(self):
        return str(self.r)


class PrimeField:
    """The field F_p for a fixed prime p < 2**31."""

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise TruncasError(f"modulus {p} is not prime")
        if p >= 2**31:
            raise TruncasError("prime modulus must be below 2**31")
        self.p = p
        self.characteristic = p

    @property
    def zero(self) -> FpElement:
        return FpElement(0, self.p)

    @property
    def one(self) -> FpElement:
        return FpElement(1, self.p)

    def __call__(self, value) -> FpElement:
        if isinstance(value, FpElement):
            if value.p != self.p:
                raise TruncasError("mixed-field coercion")
            return value
        if isinstance(value, int):
            return FpElement(value, self.p)
        if isinstance(value, Fraction):
            num = FpElement(value.numerator, self.p)
            den = FpElement(value.denominator, self.p)
            return num / den
        raise TruncasError(f"cannot coerce {value!r} into F_{self.p}")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F{self.p}"


QQ = Rationals()
