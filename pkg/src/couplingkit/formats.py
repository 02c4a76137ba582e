"""JSON and CSV file formats.

Every number travels as a string: rationals in lowest terms (``"-2/9"``,
``"3"``), floats as decimal digits, and ``"inf"`` for an infinite coupling
constant.  Emitters sort keys so identical inputs give identical bytes.
"""
from __future__ import annotations

import io
import json
from typing import Any

from gmpy2 import mpfr

from .algebra import EXACT, FLOAT, Poly, precision, scalar_to_str, to_scalar
from .ch_app import CHSpectralData, Multipeakon
from .coupling import INF, CouplingData, SolutionPair, SolverTrace, VerificationReport, is_inf
from .errors import DuplicateLambda, SchemaError, ZeroLambda
from .herglotz import ContinuedFraction
from .string_app import DiscreteString, StringSpectralData

KIND_NAMES = {"rational": EXACT, "float": FLOAT}
KIND_LABELS = {v: k for k, v in KIND_NAMES.items()}


def dumps(doc: Any) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()


def _load(raw: bytes | str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _field(doc: dict, key: str, path: str = "") -> Any:
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path or "$")
    if key not in doc:
        raise SchemaError("missing field", f"{path}.{key}" if path else key)
    return doc[key]


def _str_list(doc: dict, key: str) -> list[str]:
    items = _field(doc, key)
    if not isinstance(items, list):
        raise SchemaError("expected an array", key)
    for i, s in enumerate(items):
        if not isinstance(s, str):
            raise SchemaError("expected a string", f"{key}[{i}]")
    return items


def _scalar(s: str, kind: str, path: str):
    try:
        return to_scalar(s, kind)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not a number: {s!r}", path) from exc


def _scalars(doc: dict, key: str, kind: str) -> list:
    return [_scalar(s, kind, f"{key}[{i}]") for i, s in enumerate(_str_list(doc, key))]


def _strs(values) -> list[str]:
    return [scalar_to_str(v) for v in values]


# ---------------------------------------------------------------- problems

def parse_problem(raw: bytes | str, kind: str | None = None) -> CouplingData:
    """Problem document to :class:`CouplingData`; ``kind`` overrides the file."""
    doc = _load(raw)
    label = doc.get("kind", "rational") if isinstance(doc, dict) else None
    if kind is None:
        if label not in KIND_NAMES:
            raise SchemaError(f"unknown kind {label!r}", "kind")
        kind = KIND_NAMES[label]
    sigma = _scalars(doc, "sigma", kind)
    eta_s = _str_list(doc, "eta")
    if len(eta_s) != len(sigma):
        raise SchemaError(f"{len(eta_s)} entries for {len(sigma)} points", "eta")
    eta = [INF if s.strip().lower() in ("inf", "infinity") else _scalar(s, kind, f"eta[{i}]") for i, s in enumerate(eta_s)]
    for i, lam in enumerate(sigma):
        if lam == 0:
            raise ZeroLambda("sigma must not contain zero", f"sigma[{i}]")
        if lam in sigma[:i]:
            raise DuplicateLambda(f"{scalar_to_str(lam)} appears twice", f"sigma[{i}]")
    return CouplingData(tuple(sigma), tuple(eta), kind)


def emit_problem(data: CouplingData) -> bytes:
    return dumps({
        "sigma": _strs(data.sigma),
        "eta": ["inf" if is_inf(e) else scalar_to_str(e) for e in data.eta],
        "kind": KIND_LABELS[data.kind],
    })


# ---------------------------------------------------------------- continued fractions and traces

def cf_to_doc(cf: ContinuedFraction) -> list:
    return [{"l": scalar_to_str(l), "omega": scalar_to_str(o), "upsilon": scalar_to_str(u)} for l, o, u in cf]


def cf_from_doc(items: list, kind: str = EXACT) -> ContinuedFraction:
    if not isinstance(items, list):
        raise SchemaError("expected an array of triples", "$")
    out = []
    for i, t in enumerate(items):
        out.append(tuple(_scalar(_field(t, k, f"[{i}]"), kind, f"[{i}].{k}") for k in ("l", "omega", "upsilon")))
    return ContinuedFraction(tuple(out))


def trace_to_doc(trace: SolverTrace) -> dict:
    doc: dict = {
        "reduction": {
            "sigma_minus": _strs(trace.reduction[0]),
            "sigma_plus": _strs(trace.reduction[1]),
        }
    }
    if trace.cf is not None:
        doc["cf"] = cf_to_doc(trace.cf)
        doc["l"] = _strs(trace.cf.l)
    if trace.n0 is not None:
        doc["n0"] = trace.n0
        doc["delta"] = scalar_to_str(trace.delta)
    if trace.residuals:
        doc["residuals"] = {k: scalar_to_str(v) for k, v in trace.residuals.items()}
    return doc


def trace_from_doc(doc: dict, kind: str = EXACT) -> SolverTrace:
    red = doc.get("reduction", {})
    trace = SolverTrace(
        reduction=(
            tuple(_scalar(s, kind, "trace.reduction") for s in red.get("sigma_minus", [])),
            tuple(_scalar(s, kind, "trace.reduction") for s in red.get("sigma_plus", [])),
        )
    )
    if "cf" in doc:
        trace.cf = cf_from_doc(doc["cf"], kind)
    if "n0" in doc:
        trace.n0 = int(doc["n0"])
        trace.delta = _scalar(doc["delta"], kind, "trace.delta")
    if "residuals" in doc:
        trace.residuals = {k: mpfr(v) for k, v in doc["residuals"].items()}
    return trace


# ---------------------------------------------------------------- solutions

def emit_solution(pair: SolutionPair) -> bytes:
    doc: dict = {"phi_minus": pair.phi_minus.to_strings(), "phi_plus": pair.phi_plus.to_strings()}
    doc["trace"] = trace_to_doc(pair.trace) if pair.trace is not None else {}
    return dumps(doc)


def parse_solution(raw: bytes | str, kind: str = EXACT) -> SolutionPair:
    doc = _load(raw)
    phim = Poly(_scalars(doc, "phi_minus", kind), kind)
    phip = Poly(_scalars(doc, "phi_plus", kind), kind)
    tdoc = doc.get("trace") or {}
    if not isinstance(tdoc, dict):
        raise SchemaError("expected an object", "trace")
    return SolutionPair(phim, phip, trace_from_doc(tdoc, kind) if tdoc else None)


# ---------------------------------------------------------------- reports

def report_to_doc(report: VerificationReport) -> dict:
    def word(ok: bool) -> str:
        return "pass" if ok else "fail"

    return {
        "checks": {k: word(v) for k, v in report.checks.items()},
        "subchecks": {k: word(v) for k, v in report.subchecks.items()},
        "failures": report.failures,
        "passed": report.passed,
    }


def emit_report(report: VerificationReport | SolverTrace) -> bytes:
    """Deterministic bytes for a verification report or a solver trace."""
    if isinstance(report, SolverTrace):
        return dumps(trace_to_doc(report))
    return dumps(report_to_doc(report))


def parse_report(raw: bytes | str) -> VerificationReport:
    doc = _load(raw)
    checks = {k: v == "pass" for k, v in _field(doc, "checks").items()}
    sub = {k: v == "pass" for k, v in doc.get("subchecks", {}).items()}
    return VerificationReport(checks, sub, doc.get("failures", {}))


# ---------------------------------------------------------------- strings

def emit_string(s: DiscreteString) -> bytes:
    return dumps({"positions": _strs(s.positions), "masses": _strs(s.masses)})


def parse_string(raw: bytes | str, kind: str = EXACT) -> DiscreteString:
    doc = _load(raw)
    try:
        return DiscreteString(tuple(_scalars(doc, "positions", kind)), tuple(_scalars(doc, "masses", kind)))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def emit_spectral(d: StringSpectralData) -> bytes:
    return dumps({
        "eigenvalues": _strs(d.eigenvalues),
        "norming_sq": _strs(d.norming),
        "wronskian": d.wronskian.to_strings(),
        "prec_bits": d.prec_bits,
    })


def parse_spectral(raw: bytes | str, prec_bits: int | None = None) -> StringSpectralData:
    doc = _load(raw)
    bits = int(prec_bits or doc.get("prec_bits", 256))
    eig_s = _str_list(doc, "eigenvalues")
    # decimal digits mean the spectrum was computed in float kind
    kind = FLOAT if any("." in s or "e" in s.lower() for s in eig_s) else EXACT
    with precision(bits):
        eig = _scalars(doc, "eigenvalues", kind)
        gam = _scalars(doc, "norming_sq", kind)
    if len(gam) != len(eig):
        raise SchemaError(f"{len(gam)} entries for {len(eig)} eigenvalues", "norming_sq")
    W = Poly(_scalars(doc, "wronskian", EXACT), EXACT)
    return StringSpectralData(tuple(eig), tuple(gam), W, bits)


# ---------------------------------------------------------------- peakons

def parse_peakons(raw: bytes | str) -> Multipeakon:
    doc = _load(raw)
    q = _scalars(doc, "q", EXACT)
    p = _scalars(doc, "p", EXACT)
    try:
        return Multipeakon(tuple(q), tuple(p))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def emit_peakons(mp: Multipeakon) -> bytes:
    return dumps({"q": _strs(mp.q), "p": _strs(mp.p)})


def emit_ch_spectral(d: CHSpectralData) -> bytes:
    return dumps({
        "eigenvalues": _strs(d.eigenvalues),
        "couplings0": _strs(d.couplings0),
        "wronskian": d.wronskian.to_strings(),
        "prec_bits": d.prec_bits,
    })


def parse_ch_spectral(raw: bytes | str) -> CHSpectralData:
    doc = _load(raw)
    bits = int(doc.get("prec_bits", 256))
    with precision(bits):
        eig = _scalars(doc, "eigenvalues", FLOAT)
        cs = _scalars(doc, "couplings0", FLOAT)
        W = Poly(_scalars(doc, "wronskian", FLOAT), FLOAT)
    return CHSpectralData(tuple(eig), tuple(cs), W, bits)


def field_csv(values, x_grid, t_grid) -> bytes:
    """CSV with header ``t,x,u``; failed cells are written as ``nan``."""
    buf = io.StringIO()
    buf.write("t,x,u\n")
    for i, t in enumerate(t_grid):
        for j, x in enumerate(x_grid):
            buf.write(f"{float(t)!r},{float(x)!r},{float(values[i][j])!r}\n")
    return buf.getvalue().encode()


def field_json(values, x_grid, t_grid) -> bytes:
    return dumps({
        "t": [float(t) for t in t_grid],
        "x": [float(x) for x in x_grid],
        "u": [[None if v != v else float(v) for v in row] for row in values],
    })
