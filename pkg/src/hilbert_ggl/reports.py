"""Report documents, CSV rendering, and the single-file scan cache.

Documents are plain dicts serialized as JSON; floats keep full repr precision
so a written report parses back to identical values.  Human-facing numbers go
through fmt10 (10 significant digits).  The scan cache is a line-oriented
file: one JSON header carrying the parameters that key the cache, then one
JSON line per field record protected by a CRC32 of its canonical form.
"""

from __future__ import annotations

import json
import os
import zlib
from fractions import Fraction

from .errors import CacheError

SCHEMA_VERSION = 1
CACHE_FORMAT = "hilbert-ggl-scan-cache"
CSV_COLUMNS = (
    "D",
    "h",
    "R",
    "hR",
    "zeta2",
    "nu_max",
    "nu_required",
    "margin",
    "elliptic_total_bound",
    "verdict",
)


def fmt10(x) -> str:
    """10-significant-digit rendering for human output."""
    if x is None:
        return ""
    if isinstance(x, float):
        return "%.10g" % x
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def json_dumps(doc, indent: int | None = 2) -> str:
    """JSON with full-precision floats and Fractions rendered as 'p/q'."""
    return json.dumps(_jsonable(doc), indent=indent, allow_nan=False)


def csv_rows(records) -> str:
    """Fixed-column CSV for scan records (dicts keyed like FieldRecord).

    h and R are empty on fast-path records; floats keep 10 significant
    digits.
    """
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        row = []
        for col in CSV_COLUMNS:
            key = "hr" if col == "hR" else col
            row.append(fmt10(rec.get(key)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def canonical_record_json(record: dict) -> str:
    return json.dumps(_jsonable(record), sort_keys=True, separators=(",", ":"), allow_nan=False)


class ScanCache:
    """Append-only scan cache in one file, keyed by scan parameters.

    Layout: first line a JSON header {format, cache_version, schema_version,
    params}; every further line {"D": ..., "crc": ..., "record": {...}} where
    crc is the CRC32 of the record's canonical JSON.  A parameter mismatch or
    any corrupted line raises CacheError naming the file and offending key.
    """

    CACHE_VERSION = 1

    def __init__(self, path: str, params: dict):
        self.path = path
        self.params = _jsonable(params)

    def _header(self) -> dict:
        return {
            "format": CACHE_FORMAT,
            "cache_version": self.CACHE_VERSION,
            "schema_version": SCHEMA_VERSION,
            "params": self.params,
        }

    def load(self) -> dict[int, dict]:
        """Records already present, or {} when the file does not exist yet."""
        if not os.path.exists(self.path):
            return {}
        out: dict[int, dict] = {}
        with open(self.path, "r", encoding="utf-8") as fh:
            header_line = fh.readline()
            if not header_line.strip():
                raise CacheError("cache file is empty", path=self.path, key="header")
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError as exc:
                raise CacheError(
                    "cache header is not valid JSON: %s" % exc, path=self.path, key="header"
                ) from exc
            if header != self._header():
                raise CacheError(
                    "cache header %r does not match requested parameters %r"
                    % (header, self._header()),
                    path=self.path,
                    key="header",
                )
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    d = entry["D"]
                    crc = entry["crc"]
                    record = entry["record"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise CacheError(
                        "cache line %d is corrupt: %s" % (lineno, exc),
                        path=self.path,
                        key="line %d" % lineno,
                    ) from exc
                actual = zlib.crc32(canonical_record_json(record).encode("ascii"))
                if actual != crc:
                    raise CacheError(
                        "checksum mismatch for D=%s (stored %s, computed %s)" % (d, crc, actual),
                        path=self.path,
                        key="D=%s" % d,
                    )
                out[int(d)] = record
        return out

    def write_all(self, records) -> None:
        """Rewrite the cache with a header and the given records (dicts)."""
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self._header(), sort_keys=True) + "\n")
            for rec in records:
                fh.write(self._entry_line(rec))
        os.replace(tmp, self.path)

    def append(self, record: dict) -> None:
        """Append one record, writing the header first if the file is new."""
        new = not os.path.exists(self.path)
        with open(self.path, "a", encoding="utf-8") as fh:
            if new:
                fh.write(json.dumps(self._header(), sort_keys=True) + "\n")
            fh.write(self._entry_line(record))

    def _entry_line(self, record: dict) -> str:
        canon = canonical_record_json(record)
        return (
            json.dumps(
                {"D": record["D"], "crc": zlib.crc32(canon.encode("ascii")), "record": _jsonable(record)},
                sort_keys=True,
                separators=(",", ":"),
            )
            + "\n"
        )


def build_field_document(params: dict, inv, rep, ell, cyc, tan, timings=None) -> dict:
    """Single-field report document (full invariant, criterion, elliptic,
    cusp and tangency data); everything JSON-serializable."""
    orbits = [
        {
            "label": o.label,
            "m": o.m,
            "nu_required": o.nu_required,
            "rr_coefficient": o.rr_coefficient,
            "ok": o.ok,
        }
        for o in rep.elliptic_detail
    ]
    classes = []
    for b in ell.bounds:
        cm = None
        if b.cm is not None:
            cm = {
                "subfield_discs": list(b.cm.subfield_discs),
                "d_Kprime": b.cm.d_Kprime,
                "w_prime": b.cm.w_prime,
                "hR_prime": b.cm.hR_prime,
                "N_rel_disc": b.cm.N_rel_disc,
                "N_U0_sq": b.cm.N_U0_sq,
            }
        classes.append(
            {
                "s": str(b.trace),
                "p": b.trace.p,
                "q": b.trace.q,
                "rationality": b.trace.rationality,
                "bound": b.value,
                "exact": b.exact,
                "unresolved_unit_ratio": b.unresolved_unit_ratio,
                "cm": cm,
            }
        )
    record = {
        "D": inv.D,
        "invariants": {
            "h": inv.h,
            "h_plus": inv.h_plus,
            "t": inv.t,
            "u": inv.u,
            "unit_norm": inv.unit_norm,
            "regulator": inv.regulator,
            "hr": inv.hr,
            "l1": inv.l1_value,
            "l1_cert": inv.l1_cert,
            "zeta2": inv.zeta2,
            "zeta2_cert": inv.zeta2_cert,
            "acnf_residual": inv.acnf_residual,
        },
        "criterion": {
            "n": rep.n,
            "epsilon": rep.epsilon,
            "nu_max": rep.nu_max,
            "nu_required": rep.nu_required,
            "margin": rep.margin,
            "rr_coefficient_at_required": rep.rr_coefficient_at_required,
            "elliptic_feasible": rep.elliptic_feasible,
            "orbits": orbits,
            "flags": list(rep.flags),
            "verdict": rep.verdict,
        },
        "elliptic": {
            "classes": classes,
            "total_bound": ell.total_bound,
            "exponent_record": ell.exponent_record,
        },
        "cusp": {
            "digits": list(cyc.digits),
            "period": cyc.period,
            "v_power": cyc.v_power,
            "eta": str(cyc.eta),
            "rays": [str(r) for r in cyc.rays],
            "module": [str(g) for g in cyc.module],
            "unimodular": cyc.unimodular,
            "tangency": {
                "ok": tan.ok,
                "unimodular": tan.unimodular,
                "charts": [
                    {
                        "index": c.index,
                        "det": str(c.det),
                        "sqrt_coeff": c.sqrt_coeff,
                        "multiplicities": list(c.multiplicities),
                        "coord_det": c.coord_det,
                        "degenerate": c.degenerate,
                    }
                    for c in tan.charts
                ],
            },
        },
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "field",
        "params": params,
        "records": [record],
        "tolerances": {
            "zeta_tol": params.get("zeta_tol"),
            "acnf_tol": params.get("acnf_tol"),
            "l1_cert": inv.l1_cert,
            "zeta2_cert": inv.zeta2_cert,
        },
        "timings": timings,
    }


def _digits_str(digits) -> str:
    return "(" + ", ".join(str(b) for b in digits) + ")"


def render_field_text(doc: dict) -> str:
    """Human layout of a field document; floats at 10 significant digits."""
    rec = doc["records"][0]
    inv = rec["invariants"]
    cri = rec["criterion"]
    ell = rec["elliptic"]
    cusp = rec["cusp"]
    tan = cusp["tangency"]
    lines = []
    lines.append("field D=%d" % rec["D"])
    lines.append("invariants:")
    lines.append("  h=%d  h_plus=%d" % (inv["h"], inv["h_plus"]))
    lines.append(
        "  fundamental unit: t=%d u=%d norm=%+d" % (inv["t"], inv["u"], inv["unit_norm"])
    )
    lines.append("  regulator R=%s" % fmt10(inv["regulator"]))
    lines.append("  hR=%s" % fmt10(inv["hr"]))
    lines.append("  L(1,chi_D)=%s (cert %s)" % (fmt10(inv["l1"]), "%.3e" % inv["l1_cert"]))
    lines.append(
        "  zeta_K(2)=%s (cert %s)" % (fmt10(inv["zeta2"]), "%.3e" % inv["zeta2_cert"])
    )
    lines.append("  class number formula residual=%s" % ("%.3e" % inv["acnf_residual"]))
    lines.append("criterion: n=%d epsilon=%s" % (cri["n"], cri["epsilon"]))
    lines.append("  nu_max=%s" % fmt10(cri["nu_max"]))
    lines.append("  nu_required=%s" % fmt10(cri["nu_required"]))
    lines.append("  margin=%s" % fmt10(cri["margin"]))
    lines.append(
        "  rr coefficient at nu_required=%s" % fmt10(cri["rr_coefficient_at_required"])
    )
    for orb in cri["orbits"]:
        lines.append(
            "  orbit %s: m=%s nu=%s rr=%s %s"
            % (
                orb["label"],
                orb["m"],
                fmt10(orb["nu_required"]),
                fmt10(orb["rr_coefficient"]),
                "ok" if orb["ok"] else "infeasible",
            )
        )
    if cri["flags"]:
        lines.append("  flags: %s" % ", ".join(cri["flags"]))
    lines.append("elliptic classes:")
    for c in ell["classes"]:
        note = "exact" if c["exact"] else (
            "unit ratio unresolved" if c["unresolved_unit_ratio"] else "upper bound"
        )
        lines.append("  s=%s (%s): bound=%s (%s)" % (c["s"], c["rationality"], fmt10(c["bound"]), note))
    lines.append(
        "  total=%s  exponent record=%s"
        % (fmt10(ell["total_bound"]), fmt10(ell["exponent_record"]))
    )
    lines.append(
        "cusp cycle: digits %s period=%d v_power=%d"
        % (_digits_str(cusp["digits"]), cusp["period"], cusp["v_power"])
    )
    lines.append("  eta=%s" % cusp["eta"])
    lines.append("  rays: %s" % "; ".join(cusp["rays"]))
    lines.append("  module: (%s, %s)" % (cusp["module"][0], cusp["module"][1]))
    lines.append(
        "  tangency: %s (%d charts, unimodular=%s)"
        % ("ok" if tan["ok"] else "FAILED", len(tan["charts"]), tan["unimodular"])
    )
    if doc.get("timings"):
        for name, secs in doc["timings"].items():
            lines.append("timing %s=%.3fs" % (name, secs))
    lines.append("verdict: %s" % cri["verdict"])
    return "\n".join(lines) + "\n"


def build_scan_document(result, params: dict, timings=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "scan",
        "params": params,
        "records": [r.to_dict() for r in result.records],
        "summary": {
            "fields": len(result.records),
            "satisfied": list(result.satisfied),
            "n_exceptional": result.n_exceptional,
            "largest_failing_D": result.largest_failing_D,
            "dyadic": [
                {
                    "lo": b.lo,
                    "hi": b.hi,
                    "n_fields": b.n_fields,
                    "n_failing": b.n_failing,
                }
                for b in result.dyadic
            ],
        },
        "timings": timings,
    }
