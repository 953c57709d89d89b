"""Exact invariants of real quadratic fields Q(sqrt(D)).

Everything discrete is integer arithmetic:

* fundamental unit: the classical continued fraction of
  omega = (sigma + sqrt(D))/2 run until the (P, Q) state repeats; the product
  of the period digit matrices has trace t and norm (-1)^(period length),
  and u is recovered exactly from t^2 - D u^2 = +-4.
* class numbers: cycles of reduced indefinite forms (a, b, c) under the rho
  operation.  The narrow number h+ is the cycle count; the unit norm is read
  off the principal cycle (it contains a form with a = -1 iff norm -1), which
  cross-checks the continued-fraction parity by an independent route.
* regulator: log of the exact unit at working precision scaled to the size
  of t, so the float64 result is correctly rounded.

zeta_K(2) = zeta(2) L(2, chi_D) is evaluated two independent ways in
``zeta_K2_dual``: the character route (reciprocity-built table, partial sums
with Abel certificate) and an ideal-counting route (divisor convolution of an
Euler-criterion character sieve, truncation completed exactly through the
identity sum_{d<=X} chi(d)/d^2 * (zeta(2) - H2(X//d)) and an Abel remainder).
Disagreement beyond the combined certificates raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt

import mpmath as mp
import numpy as np

from .errors import BudgetExceededError, DomainError, NumericalAgreementError
from .lfunctions import (
    L_value,
    character_table,
    closed_form_l1,
    euler_chi_array,
    is_fundamental_discriminant,
    is_squarefree,
    kronecker_table,
    l2_certified,
    primes_up_to,
    zeta2_constant,
)

_invsq_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def fundamental_discriminant(m: int) -> int:
    """Discriminant of Q(sqrt(m)) for squarefree m >= 2."""
    if m < 2 or not is_squarefree(m):
        raise DomainError(f"need a squarefree integer >= 2, got {m}")
    return m if m % 4 == 1 else 4 * m


def fundamental_discriminant_signed(r: int) -> int:
    """Discriminant of Q(sqrt(r)) for any nonsquare integer r."""
    if r == 0:
        raise DomainError("radicand must be nonzero")
    n = abs(r)
    kern = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                kern *= p
        p += 1 if p == 2 else 2
    kern *= n
    k = kern if r > 0 else -kern
    if k == 1:
        raise DomainError(f"{r} is a perfect square")
    return k if k % 4 == 1 else 4 * k


def fundamental_discriminants_up_to(limit: int) -> np.ndarray:
    """All real quadratic field discriminants D <= limit, ascending."""
    if limit < 5:
        return np.zeros(0, dtype=np.int64)
    m = np.arange(limit + 1, dtype=np.int64)
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    for p in primes_up_to(isqrt(limit)):
        p2 = int(p) * int(p)
        sf[p2::p2] = False
    d_odd = m[sf & (m % 4 == 1) & (m >= 5)]
    m_even = m[sf & ((m % 4 == 2) | (m % 4 == 3)) & (4 * m <= limit)]
    return np.sort(np.concatenate([d_odd, 4 * m_even]))


def _check_field_discriminant(D: int) -> None:
    if D <= 0 or not is_fundamental_discriminant(D):
        raise DomainError(f"{D} is not a real quadratic field discriminant")


def continued_fraction_unit(D: int) -> tuple[int, int, int]:
    """(t, u, norm) with epsilon = (t + u sqrt(D))/2 fundamental, t^2 - D u^2 = 4 norm."""
    _check_field_discriminant(D)
    s = isqrt(D)
    sigma = D % 2
    P, Q = sigma, 2
    seen: dict[tuple[int, int], int] = {}
    digits: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(digits)
        a = (P + s) // Q
        digits.append(a)
        P = a * Q - P
        num = D - P * P
        if num <= 0 or num % Q:
            raise RuntimeError(f"continued fraction state invariant broken at D={D}")
        Q = num // Q
    word = digits[seen[(P, Q)] :]
    m00, m01, m10, m11 = 1, 0, 0, 1
    for b in word:
        m00, m01, m10, m11 = m00 * b + m01, m00, m10 * b + m11, m10
    t = m00 + m11
    norm = -1 if len(word) % 2 else 1
    u_sq, rem = divmod(t * t - 4 * norm, D)
    if rem:
        raise RuntimeError(f"trace {t} incompatible with D={D}")
    u = isqrt(u_sq)
    if u * u != u_sq:
        raise RuntimeError(f"unit coefficient not integral for D={D}")
    return t, u, norm


@dataclass(frozen=True)
class FundamentalUnit:
    D: int
    t: int
    u: int
    norm: int

    def elem(self):
        from .quadratic import QuadElem

        return QuadElem.from_pq(self.t, self.u, self.D)

    def totally_positive_generator(self):
        """Generator of the totally positive units: epsilon, or its square if norm -1."""
        e = self.elem()
        return e if self.norm == 1 else e * e

    def regulator(self) -> float:
        prec = max(80, self.t.bit_length() + self.u.bit_length() + 40)
        with mp.workprec(prec):
            return float(mp.log((self.t + self.u * mp.sqrt(self.D)) / 2))


def fundamental_unit(D: int) -> FundamentalUnit:
    t, u, norm = continued_fraction_unit(D)
    return FundamentalUnit(D=D, t=t, u=u, norm=norm)


def regulator(D: int) -> float:
    return fundamental_unit(D).regulator()


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Reduced indefinite forms (a, b, c) of discriminant D: sqrt(D)-b < 2|a| < sqrt(D)+b."""
    _check_field_discriminant(D)
    s = isqrt(D)
    out = []
    b = 1 if D % 2 else 2
    while b <= s:
        n4 = D - b * b
        if n4 % 4:
            raise RuntimeError(f"parity broken for D={D}, b={b}")
        n = n4 // 4
        for a in _divisors(n):
            two_a = 2 * a
            if (two_a + b) ** 2 > D and (two_a - b < 0 or (two_a - b) ** 2 < D):
                out.append((a, b, -(n // a)))
                out.append((-a, b, n // a))
        b += 2
    return sorted(out)


def rho_step(form: tuple[int, int, int], D: int) -> tuple[int, int, int]:
    """Right neighbor: (a, b, c) -> (c, r, (r^2 - D)/(4c)), r = -b mod 2|c| nearest sqrt(D)."""
    _a, b, c = form
    s = isqrt(D)
    r = s - ((s + b) % (2 * abs(c)))
    num = r * r - D
    if num % (4 * c):
        raise RuntimeError(f"rho step not integral at {form}, D={D}")
    return (c, r, num // (4 * c))


def principal_form(D: int) -> tuple[int, int, int]:
    s = isqrt(D)
    b0 = s if (s - D) % 2 == 0 else s - 1
    return (1, b0, (b0 * b0 - D) // 4)


def form_cycles(D: int) -> list[list[tuple[int, int, int]]]:
    forms = reduced_forms(D)
    fset = set(forms)
    visited: set[tuple[int, int, int]] = set()
    cycles = []
    for f in forms:
        if f in visited:
            continue
        cyc = []
        g = f
        while True:
            cyc.append(g)
            visited.add(g)
            g = rho_step(g, D)
            if g not in fset:
                raise RuntimeError(f"rho left the reduced set at {g}, D={D}")
            if g == f:
                break
            if g in visited:
                raise RuntimeError(f"rho cycles merged at {g}, D={D}")
        cycles.append(cyc)
    return cycles


@dataclass(frozen=True)
class ClassData:
    D: int
    h: int
    h_plus: int
    unit_norm: int


def class_number(D: int) -> ClassData:
    """Wide and narrow class numbers from form cycles.

    The unit norm comes from the principal cycle (contains some (-1, b, c)
    iff the fundamental unit has norm -1), not from the continued fraction,
    so callers can compare the two routes.
    """
    cycles = form_cycles(D)
    h_plus = len(cycles)
    pf = principal_form(D)
    principal_cycle = None
    for cyc in cycles:
        if pf in cyc:
            principal_cycle = cyc
            break
    if principal_cycle is None:
        raise RuntimeError(f"principal form {pf} not reduced for D={D}")
    norm = -1 if any(a == -1 for (a, _b, _c) in principal_cycle) else 1
    if norm == -1:
        h = h_plus
    else:
        if h_plus % 2:
            raise RuntimeError(f"narrow class number parity broken at D={D}")
        h = h_plus // 2
    return ClassData(D=D, h=h, h_plus=h_plus, unit_norm=norm)


def hr_fast(D: int, table: np.ndarray | None = None) -> tuple[float, float]:
    """h * R via the class number formula hR = sqrt(D) L(1, chi_D) / 2."""
    value, cert = closed_form_l1(D, table)
    scale = math.sqrt(D) / 2.0
    return scale * value, scale * cert + 1e-15


@dataclass(frozen=True)
class QuadraticFieldInvariants:
    D: int
    h: int
    h_plus: int
    t: int
    u: int
    unit_norm: int
    regulator: float
    hr: float
    l1_value: float
    l1_cert: float
    zeta2: float
    zeta2_cert: float
    acnf_residual: float


def invariants(D: int, *, zeta_tol: float = 1e-9,
               acnf_tol: float = 1e-8) -> QuadraticFieldInvariants:
    """All field data for the criterion, with the analytic cross-check enforced.

    Raises NumericalAgreementError if |2hR/sqrt(D) - L(1, chi_D)| exceeds
    acnf_tol plus the L-value certificate, or if the two unit-norm routes
    disagree (the latter would be a bug, not a tolerance issue).
    """
    _check_field_discriminant(D)
    unit = fundamental_unit(D)
    cd = class_number(D)
    if cd.unit_norm != unit.norm:
        raise NumericalAgreementError(
            f"D={D}: unit norm {unit.norm} from continued fraction vs "
            f"{cd.unit_norm} from form cycles"
        )
    reg = unit.regulator()
    hr = cd.h * reg
    table = character_table(D)
    l1, l1_cert = closed_form_l1(D, table)
    residual = abs(2.0 * hr / math.sqrt(D) - l1)
    if residual > acnf_tol + l1_cert:
        raise NumericalAgreementError(
            f"D={D}: class number formula residual {residual:.3e} exceeds "
            f"{acnf_tol:.1e} + {l1_cert:.1e}"
        )
    l2, l2_cert = l2_certified(D, zeta_tol, table)
    z2 = zeta2_constant()
    return QuadraticFieldInvariants(
        D=D, h=cd.h, h_plus=cd.h_plus, t=unit.t, u=unit.u, unit_norm=unit.norm,
        regulator=reg, hr=hr, l1_value=l1, l1_cert=l1_cert,
        zeta2=z2 * l2, zeta2_cert=z2 * l2_cert + 1e-15,
        acnf_residual=residual,
    )


def _invsq_h2(limit: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _invsq_cache.get(limit)
    if cached is None:
        invsq = np.zeros(limit + 1, dtype=np.float64)
        n = np.arange(1, limit + 1, dtype=np.float64)
        invsq[1:] = 1.0 / (n * n)
        h2 = np.cumsum(invsq)
        _invsq_cache.clear()
        _invsq_cache[limit] = (invsq, h2)
        cached = (invsq, h2)
    return cached


def ideal_norm_counts(D: int, limit: int) -> np.ndarray:
    """r(n) = number of integral ideals of norm n, n = 0..limit.

    Divisor convolution of the Euler-criterion character array: small divisors
    by strided scalar adds, large ones (quotient <= 64) by gathered index adds.
    """
    _check_field_discriminant(D)
    chi = euler_chi_array(D, limit)
    r = np.zeros(limit + 1, dtype=np.int32)
    k_split = 64
    cut = limit // k_split
    for d in range(1, cut + 1):
        c = int(chi[d])
        if c:
            r[d::d] += c
    lo = cut + 1
    for k in range(1, k_split + 1):
        hi = limit // k
        if hi < lo:
            break
        dd = np.arange(lo, hi + 1, dtype=np.int64)
        r[k * dd] += chi[dd]
    return r


def zeta2_ideal_route(D: int, limit: int = 300_000) -> tuple[float, float]:
    """zeta_K(2) as sum r(n)/n^2, truncation completed exactly.

    sum_{n<=X} r(n)/n^2 counts pairs d*b = n; the missing pairs with d <= X,
    b > X//d are restored via sum chi(d)/d^2 (zeta(2) - H2(X//d)), leaving
    only the d > X tail, which Abel-bounds by 2 M zeta(2)/(X+1)^2.
    """
    _check_field_discriminant(D)
    if limit < D:
        raise DomainError(f"cutoff {limit} below conductor {D}")
    z2 = zeta2_constant()
    invsq, h2 = _invsq_h2(limit)
    chi = euler_chi_array(D, limit)
    r = ideal_norm_counts(D, limit)
    s1 = float(np.sum(r[1:].astype(np.float64) * invsq[1:]))
    quot = limit // np.arange(1, limit + 1, dtype=np.int64)
    comp = float(np.sum(chi[1:].astype(np.float64) * invsq[1:] * (z2 - h2[quot])))
    m_bound = int(np.max(np.abs(np.cumsum(chi[1 : D + 1], dtype=np.int64))))
    cert = z2 * 2.0 * m_bound / float(limit + 1) ** 2 + 3e-13
    return s1 + comp, cert


@dataclass(frozen=True)
class DualZeta:
    D: int
    char_value: float
    char_cert: float
    ideal_value: float
    ideal_cert: float
    difference: float


def zeta_K2_dual(D: int, char_tol: float = 2e-9, limit: int = 300_000,
                 term_budget: int = 10**7) -> DualZeta:
    """zeta_K(2) by two routes sharing no character code; raises on disagreement."""
    _check_field_discriminant(D)
    z2 = zeta2_constant()
    lv = L_value(2, D, char_tol, term_budget, table=kronecker_table(D))
    char_value = z2 * lv.value
    char_cert = z2 * lv.error_bound + 1e-15
    ideal_value, ideal_cert = zeta2_ideal_route(D, limit)
    diff = abs(char_value - ideal_value)
    if diff > char_cert + ideal_cert + 1e-12:
        raise NumericalAgreementError(
            f"D={D}: zeta_K(2) routes differ by {diff:.3e}, "
            f"certificates {char_cert:.3e} + {ideal_cert:.3e}"
        )
    return DualZeta(D=D, char_value=char_value, char_cert=char_cert,
                    ideal_value=ideal_value, ideal_cert=ideal_cert, difference=diff)


def dirichlet_L(s: int, d_signed: int, tol: float = 1e-10) -> float:
    """L(s, chi_d) for s in {1, 2} with absolute error at most tol.

    s = 2 runs certified partial sums with the Abel tail bound; s = 1 uses
    the finite closed form, whose only error is float rounding.  If the
    achievable certificate exceeds tol the evaluation refuses rather than
    silently under-deliver.
    """
    if s not in (1, 2):
        raise DomainError(f"s must be 1 or 2, got {s!r}")
    if not (tol > 0):
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    if not is_fundamental_discriminant(d_signed):
        raise DomainError(f"{d_signed} is not a fundamental discriminant")
    if s == 2:
        return L_value(2, d_signed, tol).value
    value, cert = closed_form_l1(d_signed)
    if cert > tol:
        raise BudgetExceededError(
            f"closed form for L(1, chi_{d_signed}) certifies only {cert:.2e} > {tol:.2e}",
            needed=math.ceil(cert / tol),
            budget=1,
        )
    return value


def zeta_K2(inv_or_D, char_tol: float = 2e-9, limit: int = 300_000) -> float:
    """zeta_K(2) with the two independent evaluation routes cross-checked.

    Accepts either a discriminant or an invariants record.  Raises
    NumericalAgreementError when the character route and the ideal-norm
    route differ beyond their combined certificates.
    """
    D = inv_or_D.D if hasattr(inv_or_D, "D") else int(inv_or_D)
    dual = zeta_K2_dual(D, char_tol=char_tol, limit=limit)
    return dual.char_value
