"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

Two value types:

* ``QuadElem``: an element x + y*sqrt(D) with rational x, y.  All ring
  operations, norms, conjugation and sign/positivity predicates are exact
  (integer arithmetic only; no floating point in any comparison).
* ``QuadSurd``: a quadratic irrational (P + sqrt(D))/Q with the classical
  invariant Q | D - P^2, supporting exact minus-continued-fraction steps
  w -> 1/(ceil(w) - w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


def _sign_x_plus_sqrtD(x: Fraction, D: int) -> int:
    # sign of x + sqrt(D), D > 0 non-square
    if x >= 0:
        return 1
    # x < 0: positive iff D > x^2
    return 1 if D * x.denominator**2 > x.numerator**2 else -1


def _sign_x_minus_sqrtD(x: Fraction, D: int) -> int:
    return -_sign_x_plus_sqrtD(-x, D)


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class QuadElem:
    """x + y*sqrt(D) with x, y rational, D a fixed positive non-square."""

    x: Fraction
    y: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.D <= 0 or is_square(self.D):
            raise DomainError(f"D must be a positive non-square, got {self.D}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, r, D: int) -> "QuadElem":
        return cls(Fraction(r), Fraction(0), D)

    @classmethod
    def from_pq(cls, p, q, D: int) -> "QuadElem":
        """(p + q*sqrt(D)) / 2."""
        return cls(Fraction(p, 2), Fraction(q, 2), D)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.D != self.D:
                raise DomainError("mixed fields")
            return other
        return QuadElem(Fraction(other), Fraction(0), self.D)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadElem(self.x + o.x, self.y + o.y, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.x, -self.y, self.D)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadElem(
            self.x * o.x + self.y * o.y * self.D,
            self.x * o.y + self.y * o.x,
            self.D,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero element")
        c = self.conjugate()
        return QuadElem(c.x / n, c.y / n, self.D)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = QuadElem(Fraction(1), Fraction(0), self.D)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    # -- field-theoretic data ----------------------------------------------

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.x, -self.y, self.D)

    def norm(self) -> Fraction:
        return self.x * self.x - self.y * self.y * self.D

    def trace(self) -> Fraction:
        return 2 * self.x

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def sign(self) -> int:
        """Exact sign of the embedding x + y*sqrt(D)."""
        if self.y == 0:
            return (self.x > 0) - (self.x < 0)
        if self.y > 0:
            return _sign_x_plus_sqrtD(self.x / self.y, self.D) if self.y != 0 else 0
        return -(-self).sign()

    def sign_conjugate(self) -> int:
        return self.conjugate().sign()

    def is_totally_positive(self) -> bool:
        return self.sign() > 0 and self.sign_conjugate() > 0

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def is_integral(self) -> bool:
        """Membership in the maximal order of discriminant D (D fundamental)."""
        a = 2 * self.x
        b = 2 * self.y
        if a.denominator != 1 or b.denominator != 1:
            return False
        return (a.numerator - b.numerator * self.D) % 2 == 0

    def __float__(self) -> float:
        return float(self.x) + float(self.y) * math.sqrt(self.D)

    def conjugate_float(self) -> float:
        return float(self.conjugate())

    def __gt__(self, other) -> bool:
        return (self - self._coerce(other)).sign() > 0

    def __lt__(self, other) -> bool:
        return (self - self._coerce(other)).sign() < 0

    def __str__(self) -> str:
        return f"{self.x} + {self.y}*sqrt({self.D})"

    def to_json(self) -> dict:
        return {"x": str(self.x), "y": str(self.y), "D": self.D}


@dataclass(frozen=True)
class QuadSurd:
    """(P + sqrt(D))/Q with Q | D - P^2 (classical surd normal form)."""

    P: int
    Q: int
    D: int

    def __post_init__(self):
        if self.Q == 0:
            raise DomainError("Q must be nonzero")
        if self.D <= 0 or is_square(self.D):
            raise DomainError(f"D must be a positive non-square, got {self.D}")
        if (self.D - self.P * self.P) % self.Q != 0:
            raise DomainError(f"surd invariant Q | D - P^2 violated for {self}")

    @classmethod
    def from_elem(cls, e: QuadElem) -> "QuadSurd":
        """Normalize x + y*sqrt(D), y > 0, to (P + sqrt(D'))/Q with D' = (yL)^2 D."""
        if e.y <= 0:
            raise DomainError("surd requires positive sqrt coefficient")
        L = math.lcm(e.x.denominator, e.y.denominator)
        P = e.x.numerator * (L // e.x.denominator)
        t = e.y.numerator * (L // e.y.denominator)
        D2 = t * t * e.D
        Q = L
        if (D2 - P * P) % Q != 0:
            # enforce the surd invariant by scaling numerator and denominator by Q
            P, D2, Q = P * Q, D2 * Q * Q, Q * Q
        return cls(P, Q, D2)

    def value(self) -> float:
        return (self.P + math.sqrt(self.D)) / self.Q

    def elem(self, D0: int | None = None) -> QuadElem:
        """As a QuadElem over Q(sqrt(D0)) where D = t^2 * D0."""
        if D0 is None:
            D0 = self.D
        t2, r = divmod(self.D, D0)
        if r != 0 or not is_square(t2):
            raise DomainError("D is not a square multiple of D0")
        t = math.isqrt(t2)
        return QuadElem(Fraction(self.P, self.Q), Fraction(t, self.Q), D0)

    # exact comparisons of (P + sqrt(D))/Q against a rational r
    def cmp_rational(self, r) -> int:
        r = Fraction(r)
        num = Fraction(self.P) - r * self.Q  # compare sign of (P - rQ + sqrt(D)) / Q
        s = _sign_x_plus_sqrtD(num, self.D)
        return s if self.Q > 0 else -s

    def conj_cmp_rational(self, r) -> int:
        r = Fraction(r)
        num = Fraction(self.P) - r * self.Q
        s = _sign_x_minus_sqrtD(num, self.D)
        return s if self.Q > 0 else -s

    def is_hj_reduced(self) -> bool:
        """w > 1 and 0 < conjugate(w) < 1 (the minus-CF purely periodic window)."""
        return (
            self.cmp_rational(1) > 0
            and self.conj_cmp_rational(0) > 0
            and self.conj_cmp_rational(1) < 0
        )

    def floor(self) -> int:
        s = math.isqrt(self.D)
        if self.Q > 0:
            return (self.P + s) // self.Q
        # floor of a negative-denominator surd: floor(-z) = -floor(z) - 1 (z irrational)
        return -((self.P + s) // (-self.Q)) - 1

    def ceil(self) -> int:
        return self.floor() + 1  # irrational, never an integer

    def hj_digit(self) -> int:
        return self.ceil()

    def hj_step(self) -> tuple[int, "QuadSurd"]:
        """One minus-continued-fraction step: returns (b, 1/(b - w)) for b = ceil(w)."""
        b = self.ceil()
        P1 = b * self.Q - self.P
        Q1 = (P1 * P1 - self.D) // self.Q
        return b, QuadSurd(P1, Q1, self.D)

    def state(self) -> tuple[int, int]:
        return (self.P, self.Q)

    def __str__(self) -> str:
        return f"({self.P} + sqrt({self.D}))/{self.Q}"
