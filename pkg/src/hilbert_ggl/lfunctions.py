"""Dirichlet L-values for quadratic characters, with certified error bounds.

Evaluation routes:

* ``L_value``: truncated character sum with an Abel-summation tail certificate.
  For non-principal chi mod q every partial sum S(x) = sum_{n<=x} chi(n) is
  bounded by M = max over one period (S is q-periodic since the full period
  sums to zero), and summation by parts gives

      | sum_{n>N} chi(n) n^(-s) |  <=  2 M (N+1)^(-s).

  The number of terms needed is (2M/tol)^(1/s); when that exceeds the term
  budget a BudgetExceededError is raised instead of silently degrading.

* ``closed_form_l1``: exact finite evaluation of L(1, chi_d) used by the
  analytic class-number checks and bulk scans, where the partial-sum route
  would need ~2M/tol terms.  For odd characters (d < 0) the value is
  -pi q^(-3/2) sum a chi(a); for even ones (d > 0) it is
  -(1/sqrt(q)) sum chi(a) log sin(pi a / q).

Character tables are built two independent ways: ``kronecker_chi`` (the
reciprocity algorithm) and ``character_table`` (product of prime-discriminant
tables, quadratic residues found by squaring).  The ideal-counting route in
``field_invariants`` uses a third construction (Euler-criterion sieve) so the
dual zeta evaluations share no character code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DomainError

_CHUNK = 1 << 18

# fixed tables for the even-conductor prime discriminants, index n mod q
_TABLE_M4 = np.array([0, 1, 0, -1], dtype=np.int8)
_TABLE_P8 = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)
_TABLE_M8 = np.array([0, 1, 0, 1, 0, -1, 0, -1], dtype=np.int8)

_legendre_cache: dict[int, np.ndarray] = {}
_small_table_cache: dict[int, np.ndarray] = {}
_primes_cache: dict[int, np.ndarray] = {}


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return True


def is_fundamental_discriminant(x: int) -> bool:
    """Discriminant of a quadratic field (positive or negative), excluding 1."""
    if x == 0 or x == 1:
        return False
    if x % 4 == 1:
        return is_squarefree(x)
    if x % 4 == 0:
        m = x // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker_chi(d: int, n: int) -> int:
    """Kronecker symbol (d / n) for n >= 0."""
    a = d
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # factor twos out of n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        t = 0
        while a % 2 == 0:
            a //= 2
            t += 1
        if t % 2 == 1 and n % 8 in (3, 5):
            result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result if n == 1 else 0


def primes_up_to(limit: int) -> np.ndarray:
    for cap, arr in _primes_cache.items():
        if cap >= limit:
            return arr[arr <= limit]
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    arr = np.nonzero(sieve)[0]
    _primes_cache.clear()
    _primes_cache[limit] = arr
    return arr


def _legendre_table(p: int) -> np.ndarray:
    tbl = _legendre_cache.get(p)
    if tbl is None:
        tbl = np.full(p, -1, dtype=np.int8)
        tbl[0] = 0
        a = np.arange(1, p, dtype=np.int64)
        tbl[np.unique(a * a % p)] = 1
        if len(_legendre_cache) > 64:
            _legendre_cache.clear()
        _legendre_cache[p] = tbl
    return tbl


def factor_fundamental(d: int) -> list[int]:
    """Prime-discriminant factorization of a fundamental discriminant."""
    if not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a fundamental discriminant")
    m = abs(d)
    while m % 2 == 0:
        m //= 2
    parts = []
    rest = m
    p = 3
    while p * p <= rest:
        if rest % p == 0:
            parts.append(p if p % 4 == 1 else -p)
            rest //= p
        else:
            p += 2
    if rest > 1:
        parts.append(rest if rest % 4 == 1 else -rest)
    odd_prod = math.prod(parts) if parts else 1
    two_part = d // odd_prod
    if two_part != 1:
        if two_part not in (-4, 8, -8):
            raise DomainError(f"unexpected even part {two_part} of discriminant {d}")
        parts.append(two_part)
    return parts


def character_table(d: int) -> np.ndarray:
    """Values chi_d(n), n = 0..|d|-1, as the product of prime-discriminant tables."""
    q = abs(d)
    cached = _small_table_cache.get(d)
    if cached is not None:
        return cached
    arr = np.ones(q, dtype=np.int8)
    for part in factor_fundamental(d):
        if part == -4:
            tbl = _TABLE_M4
        elif part == 8:
            tbl = _TABLE_P8
        elif part == -8:
            tbl = _TABLE_M8
        else:
            tbl = _legendre_table(abs(part))
        arr *= np.resize(tbl, q)
    if q <= 4096:
        _small_table_cache[d] = arr
    return arr


def kronecker_table(d: int) -> np.ndarray:
    """Same values as character_table but via the reciprocity algorithm."""
    if not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a fundamental discriminant")
    return np.array([kronecker_chi(d, n) for n in range(abs(d))], dtype=np.int8)


def max_partial_sum(table: np.ndarray) -> int:
    """Exact max |sum_{n<=x} chi(n)| over a period; valid for all x by periodicity."""
    return int(np.max(np.abs(np.cumsum(table, dtype=np.int64))))


@dataclass(frozen=True)
class LValue:
    value: float
    error_bound: float
    terms: int
    s: int
    d: int


def _tail_sum(table: np.ndarray, s: int, n_terms: int) -> float:
    """sum_{n<=N} chi(n)/n^s, fixed-chunk order so results are reproducible."""
    q = len(table)
    total = 0.0
    for start in range(1, n_terms + 1, _CHUNK):
        stop = min(start + _CHUNK, n_terms + 1)
        idx = np.arange(start, stop, dtype=np.int64)
        vals = table[idx % q].astype(np.float64)
        if s == 1:
            total += float(np.sum(vals / idx))
        else:
            total += float(np.sum(vals / (idx.astype(np.float64) ** s)))
    return total


def L_value(s: int, d: int, tol: float, term_budget: int = 10**7,
            table: np.ndarray | None = None) -> LValue:
    """L(s, chi_d) by partial sums, absolute error <= tol certified by Abel tail."""
    if s not in (1, 2):
        raise DomainError(f"s must be 1 or 2, got {s}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if table is None:
        table = character_table(d)
    m_bound = max_partial_sum(table)
    # the certificate is Abel tail + float rounding guard; aim the tail at
    # tol minus the worst-case guard so the total stays within tol
    round_guard = 5e-15 * max(1.0, math.log(term_budget + 1))
    tail_target = tol - round_guard
    if tail_target <= 0:
        raise BudgetExceededError(
            f"L({s}, chi_{d}) tolerance {tol} is below the float rounding floor "
            f"{round_guard:.1e}",
            needed=term_budget + 1, budget=term_budget,
        )
    n_needed = math.ceil((2.0 * m_bound / tail_target) ** (1.0 / s))
    if n_needed > term_budget:
        raise BudgetExceededError(
            f"L({s}, chi_{d}) to tol {tol} needs {n_needed} terms, budget {term_budget}",
            needed=n_needed, budget=term_budget,
        )
    value = _tail_sum(table, s, n_needed)
    cert = 2.0 * m_bound / float(n_needed + 1) ** s + 5e-15 * max(1.0, math.log(n_needed + 1))
    if cert > tol:
        raise BudgetExceededError(
            f"L({s}, chi_{d}) certificate {cert:.3e} exceeds requested {tol:.3e}",
            needed=n_needed + 1, budget=term_budget,
        )
    return LValue(value=value, error_bound=cert, terms=n_needed, s=s, d=d)


def closed_form_l1(d: int, table: np.ndarray | None = None) -> tuple[float, float]:
    """Exact finite-sum evaluation of L(1, chi_d); returns (value, error bound)."""
    q = abs(d)
    if table is None:
        table = character_table(d)
    if d < 0:
        # fold a <-> q-a (chi odd): sum a*chi(a) = sum_{a<q/2} chi(a)(2a - q)
        half = (q - 1) // 2
        a = np.arange(1, half + 1, dtype=np.int64)
        s_int = int(np.sum(table[1 : half + 1].astype(np.int64) * (2 * a - q)))
        value = -math.pi * s_int / q**1.5
        return value, 4e-15 * (abs(value) + 1.0)
    # chi even: fold around q/2, log sin symmetric
    half = (q - 1) // 2
    a = np.arange(1, half + 1, dtype=np.float64)
    logsin = np.log(np.sin(math.pi / q * a))
    terms = table[1 : half + 1].astype(np.float64) * logsin
    value = -2.0 * float(np.sum(terms)) / math.sqrt(q)
    cert = 2.0 ** -50 * float(np.sum(np.abs(logsin))) / math.sqrt(q) + 1e-14
    return value, cert


def l2_certified(d: int, tol: float, table: np.ndarray | None = None,
                 n_cap: int = 2_000_000) -> tuple[float, float]:
    """L(2, chi_d) by partial sums with exact-M Abel certificate, term count capped.

    Unlike L_value this never raises on budget; it reports the certificate it
    achieved (scans record it in the output tolerances).
    """
    if table is None:
        table = character_table(d)
    m_bound = max_partial_sum(table)
    n_terms = min(n_cap, math.ceil(math.sqrt(2.0 * m_bound / tol)))
    value = _tail_sum(table, 2, n_terms)
    cert = 2.0 * m_bound / float(n_terms + 1) ** 2 + 5e-15 * max(1.0, math.log(n_terms + 1))
    return value, cert


def zeta2_constant() -> float:
    return math.pi * math.pi / 6.0


def euler_chi_array(D: int, limit: int) -> np.ndarray:
    """chi_D(n) for n = 0..limit via Euler's criterion at primes + multiplicativity.

    Independent of both kronecker_chi and character_table; feeds the
    ideal-counting route.
    """
    chi = np.ones(limit + 1, dtype=np.int8)
    chi[0] = 0
    for p in primes_up_to(limit):
        p = int(p)
        if p == 2:
            val = 0 if D % 2 == 0 else (1 if D % 8 == 1 else -1)
        elif D % p == 0:
            val = 0
        else:
            val = 1 if pow(D % p, (p - 1) >> 1, p) == 1 else -1
        if val == 1:
            continue
        if val == 0:
            chi[p::p] = 0
        else:
            pk = p
            while pk <= limit:
                chi[pk::pk] *= -1
                pk *= p
    return chi
