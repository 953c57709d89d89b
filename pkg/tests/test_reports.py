"""Report documents, CSV layout, and the checksummed scan cache."""

import json
from fractions import Fraction

import pytest

from hilbert_ggl.criteria import FieldInputs, verdict
from hilbert_ggl.cusps import cusp_cycle, verify_cusp_tangency
from hilbert_ggl.elliptic import elliptic_summary
from hilbert_ggl.errors import CacheError
from hilbert_ggl.field_invariants import invariants
from hilbert_ggl.reports import (
    CSV_COLUMNS,
    ScanCache,
    build_field_document,
    build_scan_document,
    canonical_record_json,
    csv_rows,
    fmt10,
    json_dumps,
    render_field_text,
)
from hilbert_ggl.scan import scan, scan_field


def test_fmt10():
    assert fmt10(None) == ""
    assert fmt10(0.4812118250596034) == "0.4812118251"
    assert fmt10(14.0) == "14"
    assert fmt10(12345678901.2345) == "1.23456789e+10"
    assert fmt10(3) == "3"
    assert fmt10(Fraction(1, 3)) == "1/3"
    assert fmt10("CandidateExceptional") == "CandidateExceptional"


def test_json_dumps_fractions_and_floats():
    doc = {"eps": Fraction(1, 100), "vals": (Fraction(2, 3), 0.1), "n": 2}
    parsed = json.loads(json_dumps(doc))
    assert parsed == {"eps": "1/100", "vals": ["2/3", 0.1], "n": 2}
    # full-precision floats survive a round trip bit for bit
    x = 0.17600650779927407
    assert json.loads(json_dumps({"x": x}))["x"] == x
    with pytest.raises(ValueError):
        json_dumps({"x": float("nan")})
    assert "\n" not in json_dumps({"a": 1}, indent=None)


def test_csv_rows_frozen_layout():
    fast = scan_field(5, Fraction(1, 100))
    assert csv_rows([fast.to_dict()]) == (
        "D,h,R,hR,zeta2,nu_max,nu_required,margin,elliptic_total_bound,verdict\n"
        "5,,,0.4812118251,1.161671195,0.1760065078,2.040816327,"
        "-1.864809819,14,CandidateExceptional\n"
    )
    exact = scan_field(5, Fraction(1, 100), exact=True)
    assert csv_rows([exact.to_dict()]).splitlines()[1] == (
        "5,1,0.4812118251,0.4812118251,1.161671195,0.1760065078,2.040816327,"
        "-1.864809819,14,CandidateExceptional"
    )
    assert csv_rows([]) == ",".join(CSV_COLUMNS) + "\n"


def test_canonical_record_json_is_stable():
    rec = {"b": 1, "a": Fraction(1, 2), "c": [1.5, None]}
    canon = canonical_record_json(rec)
    assert canon == '{"a":"1/2","b":1,"c":[1.5,null]}'
    assert canonical_record_json(dict(reversed(list(rec.items())))) == canon


def test_scan_cache_round_trip(tmp_path):
    path = str(tmp_path / "scan.cache")
    cache = ScanCache(path, params={"n": 2, "epsilon": "1/100", "zeta_tol": 1e-6})
    assert cache.load() == {}
    records = [scan_field(D, Fraction(1, 100)).to_dict() for D in (5, 8, 12)]
    cache.append(records[0])
    cache.append(records[1])
    assert cache.load() == {5: records[0], 8: records[1]}
    cache.write_all(records)
    assert cache.load() == {5: records[0], 8: records[1], 12: records[2]}
    # a second handle with identical params reads the same file
    again = ScanCache(path, params={"n": 2, "epsilon": "1/100", "zeta_tol": 1e-6})
    assert again.load() == cache.load()


def test_scan_cache_header_mismatch(tmp_path):
    path = str(tmp_path / "scan.cache")
    ScanCache(path, params={"epsilon": "1/100"}).append(
        scan_field(5, Fraction(1, 100)).to_dict()
    )
    other = ScanCache(path, params={"epsilon": "1/20"})
    with pytest.raises(CacheError) as err:
        other.load()
    assert err.value.key == "header"
    assert err.value.path == path


def test_scan_cache_corruption(tmp_path):
    path = str(tmp_path / "scan.cache")
    cache = ScanCache(path, params={"epsilon": "1/100"})
    cache.append(scan_field(5, Fraction(1, 100)).to_dict())

    with open(path, "a", encoding="utf-8") as fh:
        fh.write("this is not json\n")
    with pytest.raises(CacheError) as err:
        cache.load()
    assert err.value.key == "line 3"

    lines = open(path, encoding="utf-8").read().splitlines()[:2]
    tampered = lines[1].replace("CandidateExceptional", "Satisfied")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(lines[0] + "\n" + tampered + "\n")
    with pytest.raises(CacheError) as err:
        cache.load()
    assert err.value.key == "D=5"

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n")
    with pytest.raises(CacheError) as err:
        cache.load()
    assert err.value.key == "header"


def _field_pipeline(D=5, n=2, eps=Fraction(1, 100)):
    inv = invariants(D)
    ell = elliptic_summary(D, hr_field=inv.hr)
    rep = verdict(FieldInputs(D=D, hr=inv.hr, zeta2=inv.zeta2), n, eps, ell)
    cyc = cusp_cycle(D)
    tan = verify_cusp_tangency(cyc)
    return inv, rep, ell, cyc, tan


def test_build_field_document_and_text():
    inv, rep, ell, cyc, tan = _field_pipeline()
    params = {"D": 5, "n": 2, "epsilon": "1/100", "zeta_tol": 1e-9, "acnf_tol": 1e-8}
    doc = build_field_document(params, inv, rep, ell, cyc, tan,
                               timings={"total": 0.25})
    assert doc["schema_version"] == 1
    assert doc["command"] == "field"
    rec = doc["records"][0]
    assert rec["D"] == 5
    assert rec["invariants"]["h"] == 1
    assert rec["criterion"]["verdict"] == "CandidateExceptional"
    assert len(rec["criterion"]["orbits"]) == len(rep.elliptic_detail)
    assert len(rec["elliptic"]["classes"]) == 4
    assert rec["cusp"]["digits"] == [3]
    assert rec["cusp"]["tangency"]["ok"]
    # the whole document serializes and parses back
    parsed = json.loads(json_dumps(doc))
    assert parsed["records"][0]["invariants"]["hr"] == inv.hr

    text = render_field_text(doc)
    assert text.startswith("field D=5\n")
    assert "  h=1  h_plus=1\n" in text
    assert "  fundamental unit: t=1 u=1 norm=-1\n" in text
    assert "  nu_max=0.1760065078\n" in text
    assert "  tangency: ok (1 charts, unimodular=True)\n" in text
    assert "timing total=0.250s\n" in text
    assert text.endswith("verdict: CandidateExceptional\n")


def test_build_scan_document():
    result = scan(100, epsilon="0.05")
    params = {"dmax": 100, "n": 2, "epsilon": "1/20", "zeta_tol": 1e-6}
    doc = build_scan_document(result, params, timings={"total": 0.1})
    assert doc["command"] == "scan"
    assert doc["summary"]["fields"] == len(result.records)
    assert doc["summary"]["satisfied"] == []
    assert doc["summary"]["largest_failing_D"] == 97
    assert [b["lo"] for b in doc["summary"]["dyadic"]] == [4, 8, 16, 32, 64]
    parsed = json.loads(json_dumps(doc))
    assert parsed["records"][0]["D"] == 5
