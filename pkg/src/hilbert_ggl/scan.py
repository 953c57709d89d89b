"""Bulk criterion scans over fundamental discriminants.

The per-field fast path never computes h and R separately: the class number
formula gives hR = sqrt(D) L(1, chi_D) / 2 from the finite closed form, and
zeta_K(2) comes from the certified partial sum of L(2, chi_D).  Fields whose
verdict comes out Satisfied (none are expected at desk scale) are recomputed
on the exact path, which also runs the full agreement checks.

Scans are deterministic: per-field work is a pure function of (D, parameters),
records are merged sorted by D, and the same code path runs serially or under
a process pool (HILBERT_GGL_WORKERS or the workers argument).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .criteria import FieldInputs, verdict
from .cyclic import to_fraction
from .elliptic import elliptic_summary, imag_class_numbers, l1_imag
from .errors import DomainError
from .field_invariants import class_number, fundamental_discriminants_up_to, regulator
from .lfunctions import character_table, closed_form_l1, l2_certified, zeta2_constant

WORKERS_ENV = "HILBERT_GGL_WORKERS"


@dataclass(frozen=True)
class FieldRecord:
    """One scanned field; h and R are filled only on the exact path."""

    D: int
    h: int | None
    R: float | None
    hr: float
    zeta2: float
    zeta2_cert: float
    l1: float
    l1_cert: float
    nu_max: float
    nu_required: float
    margin: float
    elliptic_total_bound: float
    elliptic_exponent: float
    verdict: str
    flags: tuple[str, ...]
    exact: bool

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "h": self.h,
            "R": self.R,
            "hr": self.hr,
            "zeta2": self.zeta2,
            "zeta2_cert": self.zeta2_cert,
            "l1": self.l1,
            "l1_cert": self.l1_cert,
            "nu_max": self.nu_max,
            "nu_required": self.nu_required,
            "margin": self.margin,
            "elliptic_total_bound": self.elliptic_total_bound,
            "elliptic_exponent": self.elliptic_exponent,
            "verdict": self.verdict,
            "flags": list(self.flags),
            "exact": self.exact,
        }

    @classmethod
    def from_dict(cls, rec: dict) -> "FieldRecord":
        return cls(
            D=int(rec["D"]),
            h=None if rec["h"] is None else int(rec["h"]),
            R=None if rec["R"] is None else float(rec["R"]),
            hr=float(rec["hr"]),
            zeta2=float(rec["zeta2"]),
            zeta2_cert=float(rec["zeta2_cert"]),
            l1=float(rec["l1"]),
            l1_cert=float(rec["l1_cert"]),
            nu_max=float(rec["nu_max"]),
            nu_required=float(rec["nu_required"]),
            margin=float(rec["margin"]),
            elliptic_total_bound=float(rec["elliptic_total_bound"]),
            elliptic_exponent=float(rec["elliptic_exponent"]),
            verdict=str(rec["verdict"]),
            flags=tuple(rec["flags"]),
            exact=bool(rec["exact"]),
        )


def scan_field(D: int, epsilon, n: int = 2, zeta_tol: float = 1e-6,
               l1_lookup=None, exact: bool = False) -> FieldRecord:
    """Evaluate the criterion for one field.

    l1_lookup optionally supplies L(1, chi_d) for the negative discriminants
    of the elliptic bounds (a scan shares one class-number sieve); without it
    each value falls back to the closed form.
    """
    table = character_table(D)
    l1_val, l1_cert = closed_form_l1(D, table)
    hr = math.sqrt(D) * l1_val / 2.0
    l2_val, l2_cert = l2_certified(D, zeta_tol / zeta2_constant(), table)
    zeta2 = zeta2_constant() * l2_val
    zeta2_cert = zeta2_constant() * l2_cert

    def l1_for(d: int) -> float:
        if d == D:
            return l1_val
        if l1_lookup is not None:
            return l1_lookup(d)
        return closed_form_l1(d)[0]

    ell = elliptic_summary(D, hr_field=hr, l1=l1_for)
    h = None
    reg = None
    rep = verdict(FieldInputs(D=D, hr=hr, zeta2=zeta2), n, epsilon, ell)
    if exact or rep.verdict == "Satisfied":
        h = class_number(D).h
        reg = regulator(D)
        hr_exact = h * reg
        if abs(hr_exact - hr) > 1e-6 * max(1.0, hr):
            raise RuntimeError(
                "exact hR = %r disagrees with closed form %r for D=%d" % (hr_exact, hr, D)
            )
        hr = hr_exact
        rep = verdict(FieldInputs(D=D, hr=hr, zeta2=zeta2), n, epsilon, ell)
    return FieldRecord(
        D=D,
        h=h,
        R=reg,
        hr=hr,
        zeta2=zeta2,
        zeta2_cert=zeta2_cert,
        l1=l1_val,
        l1_cert=l1_cert,
        nu_max=rep.nu_max,
        nu_required=rep.nu_required,
        margin=rep.margin,
        elliptic_total_bound=ell.total_bound,
        elliptic_exponent=ell.exponent_record,
        verdict=rep.verdict,
        flags=rep.flags,
        exact=exact or rep.verdict == "Satisfied",
    )


@dataclass(frozen=True)
class DyadicBlock:
    lo: int
    hi: int
    n_fields: int
    n_failing: int

    @property
    def failing_fraction(self) -> float:
        return self.n_failing / self.n_fields if self.n_fields else 0.0


@dataclass(frozen=True)
class ScanResult:
    dmax: int
    n: int
    epsilon: Fraction
    zeta_tol: float
    records: tuple[FieldRecord, ...]
    satisfied: tuple[int, ...]
    n_exceptional: int
    largest_failing_D: int | None
    dyadic: tuple[DyadicBlock, ...]


_WORKER_STATE: dict = {}


def _init_worker(limit: int) -> None:
    if _WORKER_STATE.get("limit", -1) < limit:
        _WORKER_STATE["h_table"] = imag_class_numbers(limit)
        _WORKER_STATE["limit"] = limit


def _scan_chunk(args) -> list[FieldRecord]:
    ds, epsilon, n, zeta_tol = args
    h_table = _WORKER_STATE["h_table"]

    def lookup(d: int) -> float:
        if d < 0:
            return l1_imag(d, h_table)
        return closed_form_l1(d)[0]

    return [scan_field(D, epsilon, n=n, zeta_tol=zeta_tol, l1_lookup=lookup) for D in ds]


def _dyadic_blocks(records) -> tuple[DyadicBlock, ...]:
    blocks = []
    lo = 4
    dmax = max((r.D for r in records), default=0)
    while lo <= dmax:
        hi = lo * 2
        in_block = [r for r in records if lo <= r.D < hi]
        if in_block:
            failing = sum(1 for r in in_block if r.verdict != "Satisfied")
            blocks.append(DyadicBlock(lo=lo, hi=hi, n_fields=len(in_block), n_failing=failing))
        lo = hi
    return tuple(blocks)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "")
        workers = int(raw) if raw.strip() else 1
    if workers < 1:
        raise DomainError("worker count must be >= 1, got %d" % workers)
    return workers


def scan(dmax: int, epsilon="0.01", n: int = 2, zeta_tol: float = 1e-6,
         workers: int | None = None, precomputed: dict[int, FieldRecord] | None = None,
         on_record=None) -> ScanResult:
    """Scan all fundamental discriminants D <= dmax.

    precomputed maps D to already-known records (cache hits); on_record, if
    given, is called with each freshly computed record in ascending D order
    (the CLI streams these into the cache file).
    """
    if dmax < 5:
        raise DomainError("dmax must be at least 5, got %d" % dmax)
    eps = to_fraction(epsilon, "epsilon")
    ds = [int(d) for d in fundamental_discriminants_up_to(dmax)]
    done = dict(precomputed) if precomputed else {}
    todo = [d for d in ds if d not in done]

    workers = resolve_workers(workers)
    sieve_limit = 4 * dmax + 16
    fresh: list[FieldRecord] = []
    if todo:
        if workers == 1:
            _init_worker(sieve_limit)
            fresh = _scan_chunk((todo, eps, n, zeta_tol))
        else:
            chunks = [todo[i::workers] for i in range(workers)]
            chunks = [c for c in chunks if c]
            with ProcessPoolExecutor(
                max_workers=len(chunks), initializer=_init_worker, initargs=(sieve_limit,)
            ) as pool:
                out = pool.map(_scan_chunk, [(c, eps, n, zeta_tol) for c in chunks])
                fresh = [rec for sub in out for rec in sub]
    fresh.sort(key=lambda r: r.D)
    if on_record is not None:
        for rec in fresh:
            on_record(rec)

    merged = {r.D: r for r in fresh}
    merged.update(done)
    records = tuple(merged[d] for d in ds)

    satisfied = tuple(r.D for r in records if r.verdict == "Satisfied")
    failing = [r.D for r in records if r.verdict != "Satisfied"]
    return ScanResult(
        dmax=dmax,
        n=n,
        epsilon=eps,
        zeta_tol=zeta_tol,
        records=records,
        satisfied=satisfied,
        n_exceptional=len(failing),
        largest_failing_D=max(failing) if failing else None,
        dyadic=_dyadic_blocks(records),
    )
