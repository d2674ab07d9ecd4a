"""JSON wire formats shared by the library and the command line tools.

Writers emit plain dict/list trees.  ``canonical_json`` renders a tree with
sorted keys and a trailing newline so identical inputs always produce
byte-identical reports.  Readers validate shape and raise
:class:`~torusquant.errors.FormatError` on anything malformed, which the
command line maps to its parse-failure exit code.

Formats:

* integer matrix            ``{"n": int, "rows": [[int, ...], ...]}``
* Siegel parameter          ``{"re": rows, "im": rows}``
* Fourier polynomial        ``{"chart": {...}, "modes": [{"m": [...],
  "coeff": [{"exp": [...], "re": f, "im": f}, ...]}, ...]}`` with the mode
  list sorted lexicographically
* quantum state             ``{"frame": {...}, "coeffs": [[re, im], ...]}``
* endomorphism matrix       ``{"frame": {...}, "provenance": str,
  "entries": [[[re, im], ...], ...]}``
* verification record       ``{"test": str, "params": {...},
  "residual": float, "tolerance": float, "pass": bool}``
"""

from __future__ import annotations

import json

import numpy as np

from .errors import FormatError
from .fiber import BraneChart, DolbeaultForm, FourierPolynomial
from .lattice import SiegelPoint, TwistedSymplectic
from .mirror import EndoMatrix
from .polynomials import BasePolynomial
from .theta import FiberPoint, QuantumState, ThetaFrame

__all__ = [
    "canonical_json",
    "matrix_to_json", "matrix_from_json",
    "siegel_to_json", "siegel_from_json",
    "symplectic_from_json",
    "chart_to_json", "chart_from_json",
    "fourier_to_json", "fourier_from_json",
    "dolbeault_to_json", "dolbeault_from_json",
    "frame_from_json",
    "state_from_json",
    "endomatrix_from_json",
    "make_report",
]


def canonical_json(tree) -> str:
    """Byte-stable rendering: sorted keys, two-space indent, final newline."""
    return json.dumps(tree, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# low-level shape checks
# ---------------------------------------------------------------------------

def _need(data, key, kind=None):
    if not isinstance(data, dict):
        raise FormatError("expected a JSON object")
    if key not in data:
        raise FormatError(f"missing key {key!r}")
    value = data[key]
    if kind is not None and not isinstance(value, kind):
        raise FormatError(f"key {key!r} has the wrong type")
    return value


def _int_list(value, what):
    if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
        raise FormatError(f"{what} must be a list of integers")
    return [int(v) for v in value]


def _float_list(value, what):
    if not isinstance(value, list) or \
            not all(isinstance(v, (int, float)) for v in value):
        raise FormatError(f"{what} must be a list of numbers")
    return [float(v) for v in value]


# ---------------------------------------------------------------------------
# matrices and Siegel parameters
# ---------------------------------------------------------------------------

def matrix_to_json(rows) -> dict:
    rows = [[int(v) for v in row] for row in rows]
    return {"n": len(rows), "rows": rows}


def matrix_from_json(data):
    n = _need(data, "n", int)
    rows = _need(data, "rows", list)
    if len(rows) != n:
        raise FormatError("row count does not match n")
    out = [_int_list(row, "matrix row") for row in rows]
    if any(len(row) != n for row in out):
        raise FormatError("matrix rows must have length n")
    return out


def siegel_to_json(point: SiegelPoint) -> dict:
    return point.to_json()


def siegel_from_json(data) -> SiegelPoint:
    re = _need(data, "re", list)
    im = _need(data, "im", list)
    try:
        return SiegelPoint(np.array(re, dtype=float) + 1j * np.array(im, dtype=float))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def symplectic_from_json(data) -> TwistedSymplectic:
    """An integer matrix payload plus the invariant factors it must respect."""
    hvec = _int_list(_need(data, "h", list), "invariant factors")
    rows = matrix_from_json(data)
    try:
        return TwistedSymplectic(hvec, rows)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# polynomial term lists
# ---------------------------------------------------------------------------

def _coeff_to_json(poly: BasePolynomial) -> list:
    out = []
    for exp, c in poly.coeffs.items():
        c = complex(c)
        out.append({"exp": list(exp), "re": float(c.real), "im": float(c.imag)})
    out.sort(key=lambda t: t["exp"])
    return out


def _coeff_from_json(nvars, terms) -> BasePolynomial:
    if not isinstance(terms, list):
        raise FormatError("coefficient must be a list of terms")
    coeffs = {}
    for term in terms:
        exp = tuple(_int_list(_need(term, "exp", list), "term exponent"))
        re = _need(term, "re", (int, float))
        im = _need(term, "im", (int, float))
        value = float(re) if im == 0 else complex(re, im)
        coeffs[exp] = coeffs.get(exp, 0) + value
    try:
        return BasePolynomial(nvars, coeffs)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _gauge_triples(poly: BasePolynomial) -> list:
    return sorted([list(e), float(complex(c).real), float(complex(c).imag)]
                  for e, c in poly.coeffs.items())


def _gauge_from_triples(nvars, triples) -> BasePolynomial:
    if not isinstance(triples, list):
        raise FormatError("gauge component must be a list of terms")
    coeffs = {}
    for item in triples:
        if not isinstance(item, list) or len(item) != 3:
            raise FormatError("gauge term must be [exponent, re, im]")
        exp, re, im = item
        coeffs[tuple(_int_list(exp, "gauge exponent"))] = \
            float(re) if im == 0 else complex(re, im)
    return BasePolynomial(nvars, coeffs)


# ---------------------------------------------------------------------------
# charts and Fourier polynomials
# ---------------------------------------------------------------------------

def chart_to_json(chart: BraneChart) -> dict:
    return {
        "hvec": list(chart.hvec),
        "k": chart.k,
        "gcheck": [float(v) for v in chart.gcheck],
        "g": [_gauge_triples(p) for p in chart.g],
    }


def chart_from_json(data) -> BraneChart:
    hvec = _int_list(_need(data, "hvec", list), "hvec")
    k = _need(data, "k", int)
    dim = 2 * len(hvec)
    gcheck = _float_list(data.get("gcheck", [0.0] * dim), "gcheck")
    g_terms = data.get("g")
    if g_terms is None:
        g = None
    else:
        if not isinstance(g_terms, list) or len(g_terms) != dim:
            raise FormatError("gauge must list 2n components")
        g = [_gauge_from_triples(dim, t) for t in g_terms]
    try:
        return BraneChart(hvec, g=g, gcheck=gcheck, k=k)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def fourier_to_json(f: FourierPolynomial) -> dict:
    return {"chart": chart_to_json(f.chart), "modes": _modes_to_json(f)}


def fourier_from_json(data, chart: BraneChart = None) -> FourierPolynomial:
    """Decode a symbol; an explicit chart overrides the embedded one."""
    if chart is None:
        chart = chart_from_json(_need(data, "chart", dict))
    mode_list = _need(data, "modes", list)
    modes = {}
    for entry in mode_list:
        m = tuple(_int_list(_need(entry, "m", list), "mode vector"))
        if len(m) != chart.dim:
            raise FormatError("mode vector length must be 2n")
        poly = _coeff_from_json(chart.dim, _need(entry, "coeff", list))
        if m in modes:
            raise FormatError(f"duplicate mode {list(m)}")
        modes[m] = poly
    return FourierPolynomial(chart, modes)


def _modes_to_json(f: FourierPolynomial) -> list:
    modes = [{"m": list(m), "coeff": _coeff_to_json(p)}
             for m, p in f.modes.items()]
    modes.sort(key=lambda entry: entry["m"])
    return modes


def dolbeault_to_json(form: DolbeaultForm) -> dict:
    comps = [{"index": list(idx), "modes": _modes_to_json(fp)}
             for idx, fp in form.components.items()]
    comps.sort(key=lambda entry: entry["index"])
    return {"chart": chart_to_json(form.chart), "degree": form.degree,
            "components": comps}


def dolbeault_from_json(data) -> DolbeaultForm:
    chart = chart_from_json(_need(data, "chart", dict))
    degree = _need(data, "degree", int)
    comps = {}
    for entry in _need(data, "components", list):
        idx = tuple(_int_list(_need(entry, "index", list), "component index"))
        fp = fourier_from_json({"modes": _need(entry, "modes", list)}, chart)
        comps[idx] = fp
    try:
        return DolbeaultForm(chart, degree, comps)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# frames, states, endomorphism matrices
# ---------------------------------------------------------------------------

def frame_from_json(data) -> ThetaFrame:
    chart_data = {"hvec": _need(data, "hvec", list), "k": _need(data, "k", int)}
    for key in ("gcheck", "g"):
        if data.get(key) is not None:
            chart_data[key] = data[key]
    chart = chart_from_json(chart_data)
    x = _float_list(_need(data, "x", list), "x")
    ycheck = _float_list(_need(data, "ycheck", list), "ycheck")
    omega = siegel_from_json(_need(data, "omega", dict))
    trunc = _need(data, "trunc", int)
    try:
        return ThetaFrame(FiberPoint(chart, x, ycheck), omega, trunc)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def state_from_json(data) -> QuantumState:
    frame = frame_from_json(_need(data, "frame", dict))
    pairs = _need(data, "coeffs", list)
    coeffs = []
    for pair in pairs:
        pair = _float_list(pair, "coefficient pair")
        if len(pair) != 2:
            raise FormatError("coefficients must be [re, im] pairs")
        coeffs.append(complex(pair[0], pair[1]))
    if len(coeffs) != frame.dim:
        raise FormatError("coefficient count must match the frame dimension")
    return QuantumState(frame, coeffs)


def endomatrix_from_json(data) -> EndoMatrix:
    frame = frame_from_json(_need(data, "frame", dict))
    provenance = _need(data, "provenance", str)
    rows = _need(data, "entries", list)
    try:
        entries = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as exc:
        raise FormatError("entries must be a matrix of [re, im] pairs") from exc
    try:
        return EndoMatrix(frame, entries, provenance)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# verification records
# ---------------------------------------------------------------------------

def make_report(test: str, params: dict, residual: float, tolerance: float) -> dict:
    residual = float(residual)
    return {
        "test": test,
        "params": params,
        "residual": residual,
        "tolerance": float(tolerance),
        "pass": bool(residual <= tolerance),
    }
