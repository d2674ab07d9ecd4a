"""Chart reduction pipeline, atlas gluing checks, and example geometries.

Connection 1-forms are kept in full-turn units (the bundle connection is
d - 2 pi i theta), gauge exponents likewise, so every gluing statement is
either an exact polynomial identity or an integrality test.  Coordinates
are ordered (x_1..x_2n, y^1..y^2n) throughout.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import MissingOverlap, UnknownExample
from .fiber import BraneChart
from .forms import PolyForm, differential, one_form, primitive
from .lattice import (
    IntSkewForm,
    SemiCharacter,
    TwistedSymplectic,
    int_inverse,
    skew_smith_normal_form,
    standard_form,
)
from .polynomials import BasePolynomial, QQi

__all__ = [
    "RawBraneData",
    "Transition",
    "BraneAtlas",
    "raw_connection",
    "skew_smith_connection",
    "reduce_to_skew_smith",
    "reassemble_connection",
    "validate_chart",
    "complex_coordinates",
    "holomorphic_symplectic_form",
    "derive_transition",
    "cocycle_check",
    "builtin_example",
    "kodaira_thurston_coframe",
    "EXAMPLE_NAMES",
]

EXAMPLE_NAMES = ("cylinder2", "kodaira_thurston", "ooguri_vafa")


def _lift_x(poly: BasePolynomial, n2: int) -> BasePolynomial:
    """Embed a polynomial in x into the (x, y) ring."""
    return poly.extend_vars(2 * n2, range(n2))


def _transpose(rows):
    return [list(col) for col in zip(*rows)]


def _fiber_block(a_rows):
    """The (x, y) change matrix diag(A, A^{-T}) for the base change x -> A x."""
    n2 = len(a_rows)
    ainv = int_inverse(a_rows)
    out = [[Fraction(0)] * (2 * n2) for _ in range(2 * n2)]
    for i in range(n2):
        for j in range(n2):
            out[i][j] = Fraction(a_rows[i][j])
            out[n2 + i][n2 + j] = ainv[j][i]
    return out


# ---------------------------------------------------------------------------
# connection 1-forms
# ---------------------------------------------------------------------------

def raw_connection(raw: "RawBraneData") -> PolyForm:
    """(1/2) f . dx + gtilde . dy + (1/2) y . H dy on (x, y), in turns."""
    n2 = raw.form.dim
    nv = 2 * n2
    comps = [_lift_x(p, n2) * Fraction(1, 2) for p in raw.f]
    for j in range(n2):
        c = _lift_x(raw.gtilde[j], n2)
        for i in range(n2):
            if raw.form.rows[i][j]:
                c = c + BasePolynomial.variable(nv, n2 + i,
                                                Fraction(raw.form.rows[i][j], 2))
        comps.append(c)
    return one_form(comps)


def skew_smith_connection(chart: BraneChart) -> PolyForm:
    """x1 . Hinv dx2 + (y2 + g2) . H d(y1 + g1) on (x, y), in turns.

    This is the level-one connection of the normal-form data; the level-k
    bundle carries k times this form.
    """
    n, n2 = chart.n, chart.dim
    nv = 2 * n2
    theta = PolyForm.zero(nv, 1)
    for i in range(n):
        theta = theta + PolyForm(
            nv, 1, {(n + i,): BasePolynomial.variable(nv, i, Fraction(1, chart.hvec[i]))})
        w2 = BasePolynomial.variable(nv, n2 + n + i) + _lift_x(chart.g[n + i], n2)
        dw1 = PolyForm.coordinate(nv, n2 + i) + differential(_lift_x(chart.g[i], n2))
        theta = theta + dw1 * (w2 * chart.hvec[i])
    return theta


# ---------------------------------------------------------------------------
# raw data and the reduction pipeline
# ---------------------------------------------------------------------------

class RawBraneData:
    """Pre-reduction brane data (f, gtilde, H, chi) over an affine chart.

    f and gtilde hold 2n polynomial components in the base coordinates;
    chi is a semi-character of the integer skew form.  Construction
    enforces the compatibility identities that make the data reducible:
    with F = (Df - Df^T)/2 and G = D(H^{-T} gtilde), G must be symmetric
    and F + G H G = -H^{-1} as polynomial matrices.
    """

    def __init__(self, f, gtilde, form: IntSkewForm, chi: SemiCharacter):
        self.form = form
        n2 = form.dim
        self.f = tuple(f)
        self.gtilde = tuple(gtilde)
        if len(self.f) != n2 or len(self.gtilde) != n2:
            raise ValueError("f and gtilde must have 2n components")
        if any(p.nvars != n2 for p in self.f + self.gtilde):
            raise ValueError("components must live in the 2n base variables")
        if chi.form.rows != form.rows:
            raise ValueError("semi-character must live on the same skew form")
        self.chi = chi

        hinv = int_inverse(form.rows)
        hinvt = _transpose(hinv)
        g = [sum((self.gtilde[j] * hinvt[i][j] for j in range(n2)
                  if hinvt[i][j]), BasePolynomial.zero(n2)) for i in range(n2)]
        jac = [[g[i].diff(j) for j in range(n2)] for i in range(n2)]
        for i in range(n2):
            for j in range(i + 1, n2):
                if jac[i][j] != jac[j][i]:
                    raise ValueError("H^{-T} gtilde must have a symmetric Jacobian")
        for i in range(n2):
            for j in range(n2):
                lhs = (self.f[i].diff(j) - self.f[j].diff(i)) * Fraction(1, 2)
                for a in range(n2):
                    for b in range(n2):
                        if form.rows[a][b]:
                            lhs = lhs + jac[i][a] * jac[j][b] * form.rows[a][b]
                if lhs != BasePolynomial.constant(n2, -hinv[i][j]):
                    raise ValueError("data violates the inverse-form identity")


def reduce_to_skew_smith(raw: RawBraneData, k: int = 1):
    """Normal-form chart plus the coordinate/gauge log that produced it.

    The log lists ("coordinate", A) and ("gauge", psi) steps with psi a
    polynomial in (x, y) in full-turn units; reassemble_connection walks it
    backwards and recovers the raw connection exactly.  NotClosed or
    NotExactOnDomain propagate from the primitive search when the supplied
    data admits no polynomial potential.
    """
    n2 = raw.form.dim
    n = n2 // 2
    nv = 2 * n2
    hvec, arows = skew_smith_normal_form(raw.form)
    ainv = [[int(v) for v in row] for row in int_inverse(arows)]

    def move(p):
        return p.compose_affine(ainv, [0] * n2)

    fp = [sum((move(raw.f[j]) * ainv[j][i] for j in range(n2) if ainv[j][i]),
              BasePolynomial.zero(n2)) for i in range(n2)]
    gtp = [sum((move(raw.gtilde[j]) * arows[i][j] for j in range(n2) if arows[i][j]),
               BasePolynomial.zero(n2)) for i in range(n2)]
    gcheck = raw.chi.transform(arows).gcheck

    g = [gtp[n + i] * Fraction(-1, hvec[i]) for i in range(n)]
    g += [gtp[i] * Fraction(1, hvec[i]) for i in range(n)]

    psi2 = BasePolynomial.zero(nv)
    for i in range(n):
        psi2 = psi2 + _lift_x(g[i], n2) \
            * BasePolynomial.variable(nv, n2 + n + i, Fraction(hvec[i], 2))
        psi2 = psi2 + _lift_x(g[n + i], n2) \
            * BasePolynomial.variable(nv, n2 + i, Fraction(-hvec[i], 2))

    comps = []
    for j in range(n2):
        c = fp[j]
        for i in range(n):
            c = c + (g[i] * g[n + i].diff(j) - g[n + i] * g[i].diff(j)) * hvec[i]
        if j < n:
            c = c + BasePolynomial.variable(n2, n + j, Fraction(1, hvec[j]))
        else:
            c = c - BasePolynomial.variable(n2, j - n, Fraction(1, hvec[j - n]))
        comps.append(c)
    psi3 = _lift_x(primitive(one_form(comps)), n2) * Fraction(-1, 2)

    psi4 = BasePolynomial.zero(nv)
    for i in range(n):
        psi4 = psi4 + BasePolynomial.variable(nv, i) \
            * BasePolynomial.variable(nv, n + i, Fraction(1, 2 * hvec[i]))
        w1 = BasePolynomial.variable(nv, n2 + i) + _lift_x(g[i], n2)
        w2 = BasePolynomial.variable(nv, n2 + n + i) + _lift_x(g[n + i], n2)
        psi4 = psi4 + w2 * w1 * Fraction(hvec[i], 2)

    chart = BraneChart(hvec, g=g, gcheck=gcheck, k=k)
    log = [("coordinate", [list(r) for r in arows]),
           ("gauge", psi2), ("gauge", psi3), ("gauge", psi4)]
    return chart, log


def reassemble_connection(chart: BraneChart, log) -> PolyForm:
    """Undo a reduction log: the raw connection in the original coordinates."""
    theta = skew_smith_connection(chart)
    for kind, data in reversed(log):
        if kind == "gauge":
            theta = theta - differential(data)
        elif kind == "coordinate":
            theta = theta.pullback(_fiber_block(data))
        else:
            raise ValueError(f"unknown log step {kind!r}")
    return theta


def validate_chart(chart) -> dict:
    """Report-style validation of normal-form chart data.

    Accepts anything with hvec, g, k attributes so candidate data can be
    screened without going through the chart constructor.
    """
    g = tuple(chart.g)
    n2 = len(g)
    sym = [(a, b) for a in range(n2) for b in range(a + 1, n2)
           if g[a].diff(b) != g[b].diff(a)]
    hvec = tuple(int(h) for h in chart.hvec)
    chain = [i for i in range(len(hvec))
             if hvec[i] <= 0 or (i > 0 and hvec[i] % hvec[i - 1])]
    report = {
        "symmetric_jacobian": {"pass": not sym, "violations": sym},
        "divisor_chain": {"pass": not chain, "violations": chain},
        "level": {"pass": int(chart.k) >= 1, "k": int(chart.k)},
    }
    report["pass"] = all(section["pass"] for section in report.values())
    return report


# ---------------------------------------------------------------------------
# complex coordinates and the symplectic normal form
# ---------------------------------------------------------------------------

def complex_coordinates(chart: BraneChart):
    """(re, im) polynomial pairs of z = x + i Hstd (y + g) on (x, y)."""
    n, n2 = chart.n, chart.dim
    nv = 2 * n2
    out = []
    for a in range(n2):
        re = BasePolynomial.variable(nv, a)
        if a < n:
            im = (BasePolynomial.variable(nv, n2 + n + a)
                  + _lift_x(chart.g[n + a], n2)) * (-chart.hvec[a])
        else:
            i = a - n
            im = (BasePolynomial.variable(nv, n2 + i)
                  + _lift_x(chart.g[i], n2)) * chart.hvec[i]
        out.append((re, im))
    return out


def holomorphic_symplectic_form(chart: BraneChart):
    """Curvature plus i omega, re-expressed in the complex coordinates.

    Asserts the normal form dz1 ^ Hinv dz2 as an exact polynomial identity
    and returns the constant matrix C with the form sum_{a<b} C[a][b]
    dz^a ^ dz^b.
    """
    n, n2 = chart.n, chart.dim
    nv = 2 * n2
    lhs = skew_smith_connection(chart).d()
    for a in range(n2):
        lhs = lhs + PolyForm(nv, 2, {(a, n2 + a): BasePolynomial.constant(nv, QQi(0, 1))})
    dz = [differential(re) + differential(im) * QQi(0, 1)
          for re, im in complex_coordinates(chart)]
    rhs = PolyForm.zero(nv, 2)
    coeffs = [[Fraction(0)] * n2 for _ in range(n2)]
    for i in range(n):
        coeffs[i][n + i] = Fraction(1, chart.hvec[i])
        rhs = rhs + dz[i].wedge(dz[n + i]) * Fraction(1, chart.hvec[i])
    if lhs != rhs:
        raise AssertionError("curvature plus i omega missed the normal form")
    return coeffs


# ---------------------------------------------------------------------------
# transitions and atlases
# ---------------------------------------------------------------------------

def _vec(values, n2):
    if values is None:
        return (Fraction(0),) * n2
    out = tuple(Fraction(v) if isinstance(v, (int, Fraction)) else float(v)
                for v in values)
    if len(out) != n2:
        raise ValueError("vector length must be 2n")
    return out


class Transition:
    """Chart-to-chart transition: an affine base change with a gauge exponent.

    Carries source-chart data to the target chart: x_t = A (x_s + b),
    y_t = A^{-T} y_s, and sections are multiplied by
    exp(2 pi i psi(x_s, y_s)).  c is the constant imaginary shift of the
    induced map on complex coordinates, z_t = A (z_s + b + i c).
    """

    def __init__(self, a: TwistedSymplectic, b=None, c=None, gauge_exponent=None):
        self.a = a
        n2 = 2 * a.n
        self.b = _vec(b, n2)
        self.c = _vec(c, n2)
        if gauge_exponent is None:
            gauge_exponent = BasePolynomial.zero(2 * n2)
        if gauge_exponent.nvars != 2 * n2:
            raise ValueError("gauge exponent must be a polynomial in (x, y)")
        self.gauge_exponent = gauge_exponent

    @classmethod
    def identity(cls, hvec) -> "Transition":
        return cls(TwistedSymplectic.identity(hvec))

    def affine(self):
        """(mat, offset) acting on stacked (x, y) coordinates."""
        n2 = 2 * self.a.n
        mat = _fiber_block(self.a.rows)
        off = [sum(Fraction(self.a.rows[i][j]) * self.b[j] for j in range(n2))
               for i in range(n2)] + [Fraction(0)] * n2
        return mat, off

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        """Numeric image of (x, y) sample rows under the coordinate change."""
        pts = np.asarray(pts, dtype=float)
        mat, off = self.affine()
        m = np.array([[float(v) for v in row] for row in mat])
        o = np.array([float(v) for v in off])
        return pts @ m.T + o

    def compose(self, inner: "Transition") -> "Transition":
        """This transition applied after `inner`."""
        a = self.a @ inner.a
        inv = int_inverse(inner.a.rows)
        n2 = 2 * a.n
        b = [inner.b[i] + sum(inv[i][j] * self.b[j] for j in range(n2))
             for i in range(n2)]
        c = [inner.c[i] + sum(inv[i][j] * self.c[j] for j in range(n2))
             for i in range(n2)]
        mat, off = inner.affine()
        psi = inner.gauge_exponent + self.gauge_exponent.compose_affine(mat, off)
        return Transition(a, b, c, psi)

    def inverse(self) -> "Transition":
        n2 = 2 * self.a.n
        b = [-sum(Fraction(self.a.rows[i][j]) * self.b[j] for j in range(n2))
             for i in range(n2)]
        c = [-sum(Fraction(self.a.rows[i][j]) * self.c[j] for j in range(n2))
             for i in range(n2)]
        ainv = self.a.inverse()
        mat = _fiber_block(ainv.rows)
        off = [-v for v in self.b] + [Fraction(0)] * n2
        psi = self.gauge_exponent.compose_affine(mat, off) * -1
        return Transition(ainv, b, c, psi)

    def connection_defect(self, source: BraneChart, target: BraneChart) -> PolyForm:
        """Pulled-back target connection minus source connection minus d psi."""
        mat, off = self.affine()
        pulled = skew_smith_connection(target).pullback(mat, off)
        return pulled - skew_smith_connection(source) \
            - differential(self.gauge_exponent)

    def to_json(self) -> dict:
        terms = sorted((list(exp), complex(c).real, complex(c).imag)
                       for exp, c in self.gauge_exponent.coeffs.items())
        return {
            "a": self.a.to_json(),
            "b": [float(v) for v in self.b],
            "c": [float(v) for v in self.c],
            "gauge_exponent": [[e, re, im] for e, re, im in terms],
        }


def _gauge_shift(source: BraneChart, target: BraneChart, a: TwistedSymplectic, b):
    """The constant A^T g_t(A(x+b)) - g_s(x), or None if not constant."""
    n2 = source.dim
    arows = [list(r) for r in a.rows]
    off = [sum(Fraction(arows[i][j]) * b[j] for j in range(n2)) for i in range(n2)]
    gamma = []
    for i in range(n2):
        p = source.g[i] * -1
        for j in range(n2):
            if arows[j][i]:
                p = p + target.g[j].compose_affine(arows, off) * arows[j][i]
        if p.degree() > 0:
            return None
        gamma.append(p.constant_term())
    return gamma


def derive_transition(source: BraneChart, target: BraneChart,
                      a: TwistedSymplectic, b=None) -> Transition:
    """Transition over a given affine base change, solving for psi and c.

    The gauge exponent is the radial primitive of the connection mismatch
    (NotClosed when the charts are incompatible over this map); c comes
    from the constant gauge-map shift via the skew form.
    """
    probe = Transition(a, b)
    psi = primitive(probe.connection_defect(source, target))
    gamma = _gauge_shift(source, target, a, probe.b)
    if gamma is None:
        raise ValueError("gauge maps differ by a non-constant vector")
    n = source.n
    c = [-source.hvec[i] * gamma[n + i] for i in range(n)]
    c += [source.hvec[i] * gamma[i] for i in range(n)]
    return Transition(a, probe.b, c, psi)


class BraneAtlas:
    """Charts glued by transitions over declared overlaps.

    transitions[(i, j)] carries chart-j data to chart-i data; reverse
    directions missing from the input are filled in as exact inverses.
    overlap_samples[(i, j)] holds (x, y) rows in chart-j coordinates, and
    triple_samples[(i, j, k)] rows in chart-k coordinates for the cocycle
    composition checks.  Construction verifies that every transition glues
    the chart connections as an exact polynomial identity and that its c
    vector matches the gauge-map shift.
    """

    def __init__(self, charts, transitions=None, overlap_samples=None,
                 triple_samples=None, domains=None, name=""):
        self.charts = list(charts)
        if not self.charts:
            raise ValueError("an atlas needs at least one chart")
        hv, k0 = self.charts[0].hvec, self.charts[0].k
        if any(c.hvec != hv or c.k != k0 for c in self.charts):
            raise ValueError("charts must share invariant factors and level")
        self.name = str(name)
        self.domains = list(domains) if domains is not None \
            else [None] * len(self.charts)

        trans = dict(transitions or {})
        nc = len(self.charts)
        for (i, j), t in trans.items():
            if not (0 <= i < nc and 0 <= j < nc) or i == j:
                raise ValueError("transition indices out of range")
            if t.a.hvec != hv:
                raise ValueError("transition invariant factors mismatch the atlas")
            if not t.connection_defect(self.charts[j], self.charts[i]).is_zero():
                raise ValueError(f"transition {(i, j)} does not glue the connections")
            gamma = _gauge_shift(self.charts[j], self.charts[i], t.a, t.b)
            if gamma is None:
                raise ValueError(f"transition {(i, j)} has a non-constant gauge shift")
            n = len(hv)
            want = [-hv[i2] * gamma[n + i2] for i2 in range(n)]
            want += [hv[i2] * gamma[i2] for i2 in range(n)]
            if any(w != have for w, have in zip(want, t.c)):
                raise ValueError(f"transition {(i, j)} stores an inconsistent c")
        for key in list(trans):
            rev = (key[1], key[0])
            if rev not in trans:
                trans[rev] = trans[key].inverse()
        self.transitions = trans

        samples = {k: np.asarray(v, dtype=float)
                   for k, v in (overlap_samples or {}).items()}
        for key in list(samples):
            rev = (key[1], key[0])
            if rev not in samples and key in self.transitions:
                samples[rev] = self.transitions[key].apply_points(samples[key])
        self.overlap_samples = samples
        self.triple_samples = {k: np.asarray(v, dtype=float)
                               for k, v in (triple_samples or {}).items()}

    @property
    def invariant_factors(self):
        return self.charts[0].hvec

    def to_json(self) -> dict:
        charts = [{
            "hvec": list(c.hvec),
            "k": c.k,
            "gcheck": [float(v) for v in c.gcheck],
            "g": [sorted((list(e), complex(cf).real, complex(cf).imag)
                         for e, cf in p.coeffs.items()) for p in c.g],
        } for c in self.charts]
        return {
            "name": self.name,
            "charts": charts,
            "domains": self.domains,
            "transitions": {f"{i},{j}": t.to_json()
                            for (i, j), t in sorted(self.transitions.items())},
            "overlap_samples": {f"{i},{j}": pts.tolist()
                                for (i, j), pts in sorted(self.overlap_samples.items())},
        }


def _loop_defect(loop: Transition, samples) -> float:
    n2 = 2 * loop.a.n
    dev = max(abs(loop.a.rows[i][j] - int(i == j))
              for i in range(n2) for j in range(n2))
    dev = float(max([dev] + [abs(float(v)) for v in loop.b + loop.c]))
    if samples is not None and len(samples):
        pts = np.asarray(samples, dtype=float)
        vals = loop.gauge_exponent.eval_grid([pts[:, t] for t in range(2 * n2)])
        frac = np.abs(vals.real - np.round(vals.real)) + np.abs(vals.imag)
        dev = max(dev, float(frac.max()))
    return dev


def cocycle_check(atlas: BraneAtlas) -> float:
    """Max gauge defect over the atlas' stored loops, in turns mod 1.

    Pair loops compose a transition with its reverse; stored triples
    compose (i<-j) o (j<-k) against (i<-k).  The affine parts of every loop
    must be exactly the identity; any deviation folds into the returned
    defect.  MissingOverlap if a stored triple lacks one of its pairwise
    transitions.
    """
    worst = 0.0
    for (i, j), t in atlas.transitions.items():
        loop = atlas.transitions[(j, i)].compose(t)
        worst = max(worst, _loop_defect(loop, atlas.overlap_samples.get((i, j))))
    for (i, j, k), pts in atlas.triple_samples.items():
        for pair in ((i, j), (j, k), (i, k)):
            if pair not in atlas.transitions:
                raise MissingOverlap(f"no transition stored for pair {pair}")
        comp = atlas.transitions[(i, j)].compose(atlas.transitions[(j, k)])
        loop = atlas.transitions[(i, k)].inverse().compose(comp)
        worst = max(worst, _loop_defect(loop, pts))
    return worst


# ---------------------------------------------------------------------------
# bundled example geometries
# ---------------------------------------------------------------------------

OVERLAP_SAMPLE_COUNT = 50


def _kt_deck(a: int, d) -> Transition:
    """Deck transition of the sheared torus base for the lattice shift d."""
    d1, d2 = int(d[0]), int(d[1])
    mat = TwistedSymplectic((1,), [[1, 0], [2 * a * d1, 1]])
    b = (Fraction(d1), Fraction(d2 - a * d1 * d1))
    psi = BasePolynomial(4, {
        (2, 0, 0, 0): Fraction(a * d1),
        (1, 0, 0, 0): Fraction(2 * a * d1 * d1),
        (0, 1, 0, 0): Fraction(d1),
        (0, 0, 0, 2): Fraction(-a * d1),
    })
    return Transition(mat, b, None, psi)


def _sector_points(rng, lo: float, hi: float, count: int) -> np.ndarray:
    th = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), count)
    r = rng.uniform(0.6, 1.4, count)
    xy = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    return np.concatenate([xy, rng.uniform(0.0, 1.0, (count, 2))], axis=1)


def builtin_example(name: str, a: int = 0) -> BraneAtlas:
    """The bundled example geometries.

    cylinder2: a single chart over the affine plane with unit invariant
    factor.  kodaira_thurston: the sheared torus base at shear a >= 0,
    modeled by deck-window charts indexed by lattice shifts in {-1,0,1}^2.
    ooguri_vafa: three angular-sector charts with unipotent monodromy and
    invariant factor 2.
    """
    if name == "cylinder2":
        dom = {"kind": "box", "min": [-1.0, -1.0], "max": [1.0, 1.0]}
        return BraneAtlas([BraneChart((1,))], name=name, domains=[dom])

    if name == "kodaira_thurston":
        a = int(a)
        if a < 0:
            raise ValueError("the shear parameter must be a nonnegative integer")
        shifts = [(p, q) for p in (-1, 0, 1) for q in (-1, 0, 1)]
        charts = [BraneChart((1,)) for _ in shifts]
        trans = {}
        for i, mi in enumerate(shifts):
            for j, mj in enumerate(shifts):
                if i != j:
                    trans[(i, j)] = _kt_deck(a, (mi[0] - mj[0], mi[1] - mj[1]))
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.0, 1.0, (OVERLAP_SAMPLE_COUNT, 4))
        samples = {key: pts for key in trans}
        triples = {(i, j, k): pts
                   for i in range(9) for j in range(9) for k in range(9)
                   if len({i, j, k}) == 3}
        doms = [{"kind": "box", "min": [0.0, 0.0], "max": [1.0, 1.0]}
                for _ in shifts]
        return BraneAtlas(charts, trans, overlap_samples=samples,
                          triple_samples=triples, domains=doms, name=name)

    if name == "ooguri_vafa":
        charts = [BraneChart((2,)) for _ in range(3)]
        shear = TwistedSymplectic((2,), [[1, 1], [0, 1]])
        psi = BasePolynomial(4, {(0, 2, 0, 0): Fraction(1, 4),
                                 (0, 0, 2, 0): Fraction(-1)})
        trans = {
            (0, 1): Transition.identity((2,)),
            (1, 2): Transition.identity((2,)),
            (2, 0): Transition(shear, None, None, psi),
        }
        rng = np.random.default_rng(11)
        pi = np.pi
        samples = {
            (0, 1): _sector_points(rng, pi, 1.5 * pi, OVERLAP_SAMPLE_COUNT),
            (1, 2): _sector_points(rng, 1.5 * pi, 2 * pi, OVERLAP_SAMPLE_COUNT),
            (2, 0): _sector_points(rng, 0.0, pi, OVERLAP_SAMPLE_COUNT),
        }
        doms = [{"kind": "sector", "radius": [0.0, None], "angle": [0.0, 1.5 * pi]},
                {"kind": "sector", "radius": [0.0, None], "angle": [pi, 2 * pi]},
                {"kind": "sector", "radius": [0.0, None], "angle": [-0.5 * pi, pi]}]
        return BraneAtlas(charts, trans, overlap_samples=samples,
                          domains=doms, name=name)

    raise UnknownExample(f"no example named {name!r}")


def kodaira_thurston_coframe(a: int):
    """The global base/fiber coframe (dx1, dx2 - 2a x1 dx1, dy1 + 2a x1 dy2, dy2)."""
    x1 = BasePolynomial.variable(4, 0, Fraction(2 * int(a)))
    a1 = PolyForm.coordinate(4, 0)
    a2 = PolyForm.coordinate(4, 1) - a1 * x1
    a3 = PolyForm.coordinate(4, 2) + PolyForm.coordinate(4, 3) * x1
    a4 = PolyForm.coordinate(4, 3)
    return a1, a2, a3, a4
