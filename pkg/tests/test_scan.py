"""Bulk scans: determinism, worker independence, caching hooks."""

import math
from fractions import Fraction

import pytest

from hilbert_ggl.errors import DomainError
from hilbert_ggl.field_invariants import class_number, regulator
from hilbert_ggl.lfunctions import closed_form_l1
from hilbert_ggl.scan import (
    FieldRecord,
    WORKERS_ENV,
    resolve_workers,
    scan,
    scan_field,
)


def test_scan_field_fast_path_matches_closed_form():
    rec = scan_field(5, Fraction(1, 100))
    assert rec.h is None and rec.R is None and not rec.exact
    assert rec.hr == math.sqrt(5) * closed_form_l1(5)[0] / 2.0
    # nu_max scales like zeta2^(1/n), so the default zeta_tol=1e-6 certificate
    # allows a drift of about cert/(2 zeta2) relative
    assert abs(rec.nu_max - 0.1760065078159474) < 1e-7
    tight = scan_field(5, Fraction(1, 100), zeta_tol=1e-12)
    assert abs(tight.nu_max - 0.1760065078159474) < 1e-12
    assert abs(rec.nu_required - 2 / 0.98) < 1e-15
    assert abs(rec.margin - (rec.nu_max - rec.nu_required)) < 1e-15
    assert rec.verdict == "CandidateExceptional"
    assert abs(rec.elliptic_total_bound - 14.0) < 1e-9


def test_scan_field_exact_path_consistent():
    for D in (5, 8, 40, 229):
        fast = scan_field(D, Fraction(1, 100))
        exact = scan_field(D, Fraction(1, 100), exact=True)
        assert exact.exact
        assert exact.h == class_number(D).h
        assert exact.R == regulator(D)
        assert exact.hr == exact.h * exact.R
        assert abs(exact.hr - fast.hr) <= 1e-6 * max(1.0, fast.hr)
        assert abs(exact.nu_max - fast.nu_max) <= 1e-6 * max(1.0, fast.nu_max)
        assert exact.verdict == fast.verdict


def test_scan_deterministic_reruns():
    a = scan(200)
    b = scan(200)
    assert a.records == b.records
    assert a.dyadic == b.dyadic
    assert a.epsilon == Fraction(1, 100)
    assert [r.D for r in a.records] == sorted(r.D for r in a.records)


def test_scan_worker_count_does_not_change_records():
    serial = scan(150, workers=1)
    pooled = scan(150, workers=2)
    assert serial.records == pooled.records


def test_scan_precomputed_and_streaming():
    base = scan(150)
    seen = []
    done = {r.D: r for r in base.records[:10]}
    resumed = scan(150, precomputed=done, on_record=lambda r: seen.append(r.D))
    assert resumed.records == base.records
    fresh_ds = [r.D for r in base.records[10:]]
    assert seen == fresh_ds  # ascending, only the non-cached fields
    # records handed in via precomputed are trusted verbatim
    doctored = base.records[0].to_dict()
    doctored["verdict"] = "Satisfied"
    injected = scan(150, precomputed={doctored["D"]: FieldRecord.from_dict(doctored)})
    assert injected.records[0].verdict == "Satisfied"
    assert doctored["D"] in injected.satisfied


def test_scan_small_epsilon_example():
    res = scan(100, epsilon="0.05")
    assert all(r.verdict == "CandidateExceptional" for r in res.records)
    assert res.n_exceptional == len(res.records)
    assert res.largest_failing_D == 97
    assert res.satisfied == ()
    assert sum(b.n_fields for b in res.dyadic) == len(res.records)
    assert all(b.failing_fraction == 1.0 for b in res.dyadic)


def test_scan_margin_shrinks_with_epsilon():
    tight = scan(100, epsilon="0.01")
    loose = scan(100, epsilon="0.2")
    failing_tight = {r.D for r in tight.records if r.verdict != "Satisfied"}
    failing_loose = {r.D for r in loose.records if r.verdict != "Satisfied"}
    assert failing_tight <= failing_loose
    for rt, rl in zip(tight.records, loose.records):
        assert rl.nu_required > rt.nu_required
        assert rl.margin < rt.margin
        assert rl.nu_max == rt.nu_max


def test_scan_validation_and_workers():
    with pytest.raises(DomainError):
        scan(4)
    with pytest.raises(DomainError):
        scan(100, workers=0)
    assert resolve_workers(3) == 3


def test_resolve_workers_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers(None) == 1
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert resolve_workers(None) == 4
    monkeypatch.setenv(WORKERS_ENV, " ")
    assert resolve_workers(None) == 1
    monkeypatch.setenv(WORKERS_ENV, "0")
    with pytest.raises(DomainError):
        resolve_workers(None)


def test_field_record_round_trip():
    rec = scan_field(13, Fraction(1, 100), exact=True)
    assert FieldRecord.from_dict(rec.to_dict()) == rec
    fast = scan_field(13, Fraction(1, 100))
    assert FieldRecord.from_dict(fast.to_dict()) == fast
