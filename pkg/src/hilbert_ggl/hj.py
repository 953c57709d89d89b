"""Minus (ceiling) continued fractions of rationals.

p/q = b1 - 1/(b2 - 1/(...)) with all digits >= 2; shared by the cusp and
cyclic-quotient resolution modules.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError


def hj_expand(p: int, q: int) -> list[int]:
    """Digits of the minus continued fraction of p/q, for p > q >= 1 coprime."""
    if q < 1 or p <= q:
        raise DomainError(f"need p > q >= 1, got ({p}, {q})")
    if math.gcd(p, q) != 1:
        raise DomainError(f"need gcd(p, q) = 1, got gcd({p}, {q}) = {math.gcd(p, q)}")
    digits = []
    while q:
        b = -(-p // q)
        digits.append(b)
        p, q = q, b * q - p
    return digits


def hj_reconstruct(digits: list[int]) -> Fraction:
    """Evaluate b1 - 1/(b2 - 1/(...)) exactly; inverse of hj_expand."""
    if not digits:
        raise DomainError("empty digit list")
    if any(b < 2 for b in digits):
        raise DomainError(f"digits must all be >= 2, got {digits}")
    x = Fraction(digits[-1])
    for b in reversed(digits[:-1]):
        x = b - 1 / x
    return x
