"""Band-limited fiberwise Fourier algebra on a torus fibration chart.

Functions are finite sums  f = sum_m fhat_m(x) e^{2 pi i m.u},  m in Z^{2n},
with polynomial base coefficients and u = y + g(x) the gauged fiber
coordinate.  The star product twists mode convolution by the phase
e^{-hbar pi i m.H^{-1}m'}; all identities of the algebra are mode-wise
finite, so they can be checked exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ChartMismatch, NotInStabilizer
from .lattice import IntSkewForm, SemiCharacter, TwistedSymplectic, standard_form
from .polynomials import BasePolynomial, PiPoly, QQi, _is_zero

__all__ = [
    "BraneChart",
    "FourierPolynomial",
    "DolbeaultForm",
    "star_product",
    "poisson_bracket",
    "dolbeault",
    "graded_star",
    "semiclassical_defect",
    "chart_transition_pullback",
    "dbar_linear_coordinate",
    "cis_turns",
]

GRID_POINTS_PER_CIRCLE = 16
BASE_SAMPLE_COUNT = 5


@lru_cache(maxsize=4096)
def _cis_cached(num: int, den: int) -> complex:
    return complex(np.exp(2j * np.pi * (num / den)))


def cis_turns(t):
    """e^{2 pi i t} for t in turns; exact values at quarter turns.

    Rational turns are cached by reduced numerator/denominator so equal
    phases are bit-identical across call sites.
    """
    if isinstance(t, (int, Fraction)):
        tm = Fraction(t) % 1
        if tm.denominator == 1:
            return 1.0 + 0.0j
        if tm.denominator == 2:
            return -1.0 + 0.0j
        if tm.denominator == 4:
            return 1.0j if tm.numerator % 4 == 1 else -1.0j
        return _cis_cached(tm.numerator, tm.denominator)
    return complex(np.exp(2j * np.pi * (float(t) % 1.0)))


def _phase_value(t):
    """Phase as QQi at quarter turns (keeps exact coefficients exact)."""
    if isinstance(t, (int, Fraction)):
        tm = Fraction(t) % 1
        if tm.denominator == 1:
            return QQi(1)
        if tm.denominator == 2:
            return QQi(-1)
        if tm.denominator == 4:
            return QQi(0, 1) if tm.numerator % 4 == 1 else QQi(0, -1)
    return cis_turns(t)


class BraneChart:
    """Normal-form chart data (x, g, gcheck, H) at level k.

    hvec lists the invariant factors h_1 | ... | h_n; g is the gauge map
    (2n polynomial components of x with symmetric Jacobian); gcheck is the
    constant semi-character vector.
    """

    def __init__(self, hvec, g=None, gcheck=None, k=1):
        self.hvec = tuple(int(h) for h in hvec)
        if any(h <= 0 for h in self.hvec):
            raise ValueError("invariant factors must be positive")
        for i in range(len(self.hvec) - 1):
            if self.hvec[i + 1] % self.hvec[i]:
                raise ValueError("invariant factors must form a divisor chain")
        n2 = 2 * len(self.hvec)
        if g is None:
            g = [BasePolynomial.zero(n2) for _ in range(n2)]
        self.g = tuple(g)
        if len(self.g) != n2 or any(p.nvars != n2 for p in self.g):
            raise ValueError("gauge must have 2n polynomial components in 2n vars")
        for a in range(n2):
            for b in range(a + 1, n2):
                if self.g[a].diff(b) != self.g[b].diff(a):
                    raise ValueError("gauge Jacobian must be symmetric")
        self.gcheck = tuple(Fraction(v) if isinstance(v, (int, Fraction)) else float(v)
                            for v in (gcheck or [0] * n2))
        if len(self.gcheck) != n2:
            raise ValueError("gcheck must have 2n entries")
        self.k = int(k)
        if self.k < 1:
            raise ValueError("level k must be >= 1")

    @property
    def n(self) -> int:
        return len(self.hvec)

    @property
    def dim(self) -> int:
        return 2 * len(self.hvec)

    @property
    def form(self) -> IntSkewForm:
        return IntSkewForm(standard_form(self.hvec))

    def kappa(self, m, mp) -> Fraction:
        """The skew pairing m . H^{-1} m' of two modes."""
        n = self.n
        return sum((Fraction(m[i] * mp[n + i] - m[n + i] * mp[i], self.hvec[i])
                    for i in range(n)), Fraction(0))

    def hinv_apply(self, m):
        """H^{-1} m as a vector of Fractions."""
        n = self.n
        out = [Fraction(m[n + i], self.hvec[i]) for i in range(n)]
        out += [Fraction(-m[i], self.hvec[i]) for i in range(n)]
        return out

    def __eq__(self, other):
        return isinstance(other, BraneChart) and self.hvec == other.hvec \
            and self.g == other.g and self.gcheck == other.gcheck \
            and self.k == other.k

    def __hash__(self):
        return hash((self.hvec, self.gcheck, self.k))


class FourierPolynomial:
    """Finite mode sum with polynomial base coefficients."""

    def __init__(self, chart: BraneChart, modes=None):
        self.chart = chart
        self.modes = {}
        for m, poly in (modes or {}).items():
            m = tuple(int(v) for v in m)
            if len(m) != chart.dim:
                raise ValueError(f"mode {m} has wrong length")
            if not isinstance(poly, BasePolynomial):
                poly = BasePolynomial.constant(chart.dim, poly)
            if poly.nvars != chart.dim:
                raise ValueError("coefficient variable count mismatch")
            if not poly.is_zero():
                self.modes[m] = poly

    # ---- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, chart) -> "FourierPolynomial":
        return cls(chart, {})

    @classmethod
    def unit(cls, chart) -> "FourierPolynomial":
        return cls(chart, {(0,) * chart.dim: 1})

    @classmethod
    def single_mode(cls, chart, m, coeff=1) -> "FourierPolynomial":
        return cls(chart, {tuple(m): coeff})

    # ---- queries -----------------------------------------------------------

    @property
    def band(self) -> int:
        """Sup-norm band bound of the mode support."""
        if not self.modes:
            return 0
        return max(max(abs(v) for v in m) for m in self.modes)

    def is_zero(self) -> bool:
        return not self.modes

    def __eq__(self, other):
        if not isinstance(other, FourierPolynomial):
            return NotImplemented
        if self.chart != other.chart:
            return False
        keys = set(self.modes) | set(other.modes)
        z = BasePolynomial.zero(self.chart.dim)
        return all(self.modes.get(k, z) == other.modes.get(k, z) for k in keys)

    # ---- linear structure ---------------------------------------------------

    def _check(self, other):
        if self.chart != other.chart:
            raise ChartMismatch("operands live on different charts")

    def __add__(self, other):
        if isinstance(other, FourierPolynomial):
            self._check(other)
            out = dict(self.modes)
            for m, p in other.modes.items():
                s = out.get(m)
                s = p if s is None else s + p
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
            return FourierPolynomial(self.chart, out)
        return self + FourierPolynomial(self.chart,
                                        {(0,) * self.chart.dim: other})

    __radd__ = __add__

    def __neg__(self):
        return FourierPolynomial(self.chart,
                                 {m: -p for m, p in self.modes.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, FourierPolynomial)
                       else FourierPolynomial(self.chart,
                                              {(0,) * self.chart.dim: -other}))

    def __mul__(self, scalar):
        if isinstance(scalar, FourierPolynomial):
            # pointwise product = untwisted mode convolution
            return star_product(self, scalar, 0)
        return FourierPolynomial(self.chart,
                                 {m: p * scalar for m, p in self.modes.items()})

    __rmul__ = __mul__

    def conjugate(self) -> "FourierPolynomial":
        out = {}
        for m, p in self.modes.items():
            mneg = tuple(-v for v in m)
            out[mneg] = p.map_coeffs(
                lambda c: c.conjugate() if isinstance(c, (QQi, complex))
                else c)
        return FourierPolynomial(self.chart, out)

    # ---- evaluation -----------------------------------------------------------

    def eval(self, x, u) -> complex:
        """Value at base point x and gauged fiber coordinate u."""
        total = 0j
        for m, p in self.modes.items():
            total += p.eval(x) * complex(np.exp(2j * np.pi * np.dot(m, u)))
        return total

    def eval_grid(self, x, ugrid) -> np.ndarray:
        """Evaluate at one base point against an array of u-columns.

        ugrid has shape (2n, ...); returns the broadcast value array.
        """
        ugrid = np.asarray(ugrid, dtype=float)
        total = np.zeros(ugrid.shape[1:], dtype=complex)
        for m, p in self.modes.items():
            phase = np.exp(2j * np.pi * np.tensordot(np.array(m, dtype=float),
                                                     ugrid, axes=(0, 0)))
            total = total + p.eval(x) * phase
        return total

    def map_coeffs(self, fn) -> "FourierPolynomial":
        return FourierPolynomial(self.chart,
                                 {m: p.map_coeffs(fn) for m, p in self.modes.items()})

    def __repr__(self):
        return f"FourierPolynomial({len(self.modes)} modes, band {self.band})"


def star_product(f: FourierPolynomial, g: FourierPolynomial,
                 hbar) -> FourierPolynomial:
    """Twisted mode convolution  (f star g)_q = sum e^{-hbar pi i kappa} f g.

    Rational hbar keeps quarter-turn phases exact; hbar = 0 is the
    pointwise product.
    """
    if f.chart != g.chart:
        raise ChartMismatch("star product needs a common chart")
    chart = f.chart
    out = {}
    exact_h = isinstance(hbar, (int, Fraction))
    for m, fp in f.modes.items():
        for mp, gp in g.modes.items():
            kappa = chart.kappa(m, mp)
            if exact_h:
                phase = _phase_value(Fraction(-hbar) * kappa / 2)
            else:
                phase = cis_turns(-float(hbar) * float(kappa) / 2.0)
            if phase == QQi(1) or phase == 1:
                term = fp * gp
            else:
                term = (fp * gp) * phase
            q = tuple(a + b for a, b in zip(m, mp))
            acc = out.get(q)
            acc = term if acc is None else acc + term
            if acc.is_zero():
                out.pop(q, None)
            else:
                out[q] = acc
    return FourierPolynomial(chart, out)


def poisson_bracket(f: FourierPolynomial, g: FourierPolynomial) -> FourierPolynomial:
    """{f, g} on modes: -2 pi sum_{m+m'=q} kappa(m, m') fhat_m ghat_m'.

    The 2 pi factor is carried exactly (PiPoly coefficients) so that nested
    brackets cancel symbolically.
    """
    if f.chart != g.chart:
        raise ChartMismatch("bracket needs a common chart")
    chart = f.chart
    out = {}
    for m, fp in f.modes.items():
        for mp, gp in g.modes.items():
            kappa = chart.kappa(m, mp)
            if kappa == 0:
                continue
            term = (fp * gp) * PiPoly({1: QQi(-2 * kappa)})
            q = tuple(a + b for a, b in zip(m, mp))
            acc = out.get(q)
            acc = term if acc is None else acc + term
            if acc.is_zero():
                out.pop(q, None)
            else:
                out[q] = acc
    return FourierPolynomial(chart, out)


# ---------------------------------------------------------------------------
# Dolbeault complex
# ---------------------------------------------------------------------------

class DolbeaultForm:
    """(0, p)-form: components indexed by strictly increasing dzbar tuples."""

    def __init__(self, chart: BraneChart, degree: int, components=None):
        self.chart = chart
        self.degree = int(degree)
        if self.degree < 0 or (self.degree > chart.dim and components):
            raise ValueError("degree out of range")
        self.components = {}
        for idx, fp in (components or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"index tuple {idx} not strictly increasing "
                                 f"of length {self.degree}")
            if any(not 0 <= i < chart.dim for i in idx):
                raise ValueError("component index out of range")
            if fp.chart != chart:
                raise ChartMismatch("component chart mismatch")
            if not fp.is_zero():
                self.components[idx] = fp

    @classmethod
    def from_function(cls, f: FourierPolynomial) -> "DolbeaultForm":
        return cls(f.chart, 0, {(): f})

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, DolbeaultForm):
            return NotImplemented
        if self.chart != other.chart or self.degree != other.degree:
            return False
        keys = set(self.components) | set(other.components)
        z = FourierPolynomial.zero(self.chart)
        return all(self.components.get(k, z) == other.components.get(k, z)
                   for k in keys)

    def __add__(self, other):
        if self.chart != other.chart or self.degree != other.degree:
            raise ChartMismatch("cannot add forms of different type")
        out = dict(self.components)
        for idx, fp in other.components.items():
            s = out.get(idx)
            s = fp if s is None else s + fp
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DolbeaultForm(self.chart, self.degree, out)

    def __neg__(self):
        return DolbeaultForm(self.chart, self.degree,
                             {i: -f for i, f in self.components.items()})

    def __sub__(self, other):
        return self + (-other)


def _dzbar_mode(chart: BraneChart, a: int, poly: BasePolynomial,
                m) -> BasePolynomial:
    """Mode coefficient of d/dzbar^a: (1/2)(d/dx_a + 2 pi (H^{-1}m)_a)."""
    mult = chart.hinv_apply(m)[a]
    out = poly.diff(a) * Fraction(1, 2)
    if mult:
        out = out + poly * PiPoly({1: QQi(mult)})
    return out


def dolbeault(alpha) -> DolbeaultForm:
    """The operator dbar; raises form degree by one.

    On a mode m the a-th component derivative is
    (1/2)[d fhat/dx_a + 2 pi (H^{-1}m)_a fhat]; the gauge terms of the
    coordinate vector fields cancel against the derivative of e^{2 pi i m.u}.
    """
    if isinstance(alpha, FourierPolynomial):
        alpha = DolbeaultForm.from_function(alpha)
    chart = alpha.chart
    out = {}
    for idx, fp in alpha.components.items():
        for a in range(chart.dim):
            if a in idx:
                continue
            pos = sum(1 for i in idx if i < a)
            sign = -1 if pos % 2 else 1
            new_idx = tuple(sorted(idx + (a,)))
            dmodes = {}
            for m, poly in fp.modes.items():
                d = _dzbar_mode(chart, a, poly, m)
                if not d.is_zero():
                    dmodes[m] = d
            if not dmodes:
                continue
            term = FourierPolynomial(chart, dmodes)
            if sign < 0:
                term = -term
            acc = out.get(new_idx)
            acc = term if acc is None else acc + term
            if acc.is_zero():
                out.pop(new_idx, None)
            else:
                out[new_idx] = acc
    return DolbeaultForm(chart, alpha.degree + 1, out)


def graded_star(alpha, beta, hbar) -> DolbeaultForm:
    """Wedge on dzbar indices with the star product on coefficients."""
    if isinstance(alpha, FourierPolynomial):
        alpha = DolbeaultForm.from_function(alpha)
    if isinstance(beta, FourierPolynomial):
        beta = DolbeaultForm.from_function(beta)
    if alpha.chart != beta.chart:
        raise ChartMismatch("graded star needs a common chart")
    chart = alpha.chart
    degree = alpha.degree + beta.degree
    out = {}
    for ia, fa in alpha.components.items():
        for ib, fb in beta.components.items():
            if set(ia) & set(ib):
                continue
            merged = ia + ib
            perm = sorted(range(len(merged)), key=lambda t: merged[t])
            inv = 0
            for s in range(len(perm)):
                for t in range(s + 1, len(perm)):
                    if perm[s] > perm[t]:
                        inv += 1
            sign = -1 if inv % 2 else 1
            idx = tuple(sorted(merged))
            term = star_product(fa, fb, hbar)
            if sign < 0:
                term = -term
            acc = out.get(idx)
            acc = term if acc is None else acc + term
            if acc.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = acc
    return DolbeaultForm(chart, degree, out)


def dbar_linear_coordinate(chart: BraneChart, xpart: BasePolynomial, ucoeffs):
    """dbar components of  xpart(x) + sum_d ucoeffs[d] u^d  (u affine part).

    Component a equals (1/2)[d xpart/dx_a - i (H^{-1} c)_a]; the gauge
    terms cancel identically.  Returns a list of 2n BasePolynomials.
    Useful for checking that the holomorphic coordinates are dbar-closed.
    """
    n2 = chart.dim
    ucoeffs = list(ucoeffs)
    if len(ucoeffs) != n2:
        raise ValueError("ucoeffs must have 2n entries")
    out = []
    n = chart.n
    minus_i = QQi(0, -1)
    for a in range(n2):
        comp = xpart.diff(a) * Fraction(1, 2)
        src, h = (ucoeffs[n + a], chart.hvec[a]) if a < n \
            else (-ucoeffs[a - n], chart.hvec[a - n])
        hc = Fraction(src, h) if isinstance(src, int) else src / h
        const = minus_i * hc * Fraction(1, 2) if isinstance(hc, (int, Fraction, QQi)) \
            else -0.5j * hc
        if not _is_zero(const):
            comp = comp + BasePolynomial.constant(n2, const)
        out.append(comp)
    return out


# ---------------------------------------------------------------------------
# semiclassical comparison
# ---------------------------------------------------------------------------

def _base_samples(dim: int) -> np.ndarray:
    """Fixed base sample points for sup-norm grids."""
    rng = np.random.default_rng(0)
    return rng.uniform(-1.0, 1.0, size=(BASE_SAMPLE_COUNT, dim))


def _fiber_grid(dim: int) -> np.ndarray:
    """Uniform grid, GRID_POINTS_PER_CIRCLE per circle direction."""
    axes = [np.arange(GRID_POINTS_PER_CIRCLE) / GRID_POINTS_PER_CIRCLE
            for _ in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=0)


def sup_norm_on_grid(f: FourierPolynomial) -> float:
    """Sup of |f| over the fixed evaluation grid."""
    ugrid = _fiber_grid(f.chart.dim)
    worst = 0.0
    for x in _base_samples(f.chart.dim):
        vals = f.eval_grid(x, ugrid)
        if vals.size:
            worst = max(worst, float(np.max(np.abs(vals))))
    return worst


def semiclassical_defect(f: FourierPolynomial, g: FourierPolynomial,
                         hbar) -> float:
    """Sup-norm distance of the rescaled star correction from the bracket.

    For hbar != 0 this is sup |(2/hbar)(f star g - f g) - i {f, g}|, which
    decreases O(hbar); at hbar = 0 it degenerates to sup |f star_0 g - f g|,
    the commutative limit (exactly zero up to roundoff).
    """
    if f.chart != g.chart:
        raise ChartMismatch("defect needs a common chart")
    fg = star_product(f, g, 0).map_coeffs(complex)
    if hbar == 0:
        # commutative limit: star_0 evaluated on the grid vs pointwise product
        ugrid = _fiber_grid(f.chart.dim)
        worst = 0.0
        for x in _base_samples(f.chart.dim):
            lhs = fg.eval_grid(x, ugrid)
            rhs = f.eval_grid(x, ugrid) * g.eval_grid(x, ugrid)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst
    sf = star_product(f, g, hbar).map_coeffs(complex)
    corr = (sf - fg) * (2.0 / float(hbar))
    br = poisson_bracket(f, g).map_coeffs(complex) * 1j
    return sup_norm_on_grid(corr - br)


# ---------------------------------------------------------------------------
# chart transitions
# ---------------------------------------------------------------------------

def chart_transition_pullback(f: FourierPolynomial, a: TwistedSymplectic,
                              b, c) -> FourierPolynomial:
    """Pull back along x = A(x' + b), u = A^{-T} u' + H^{-1} A c.

    Modes transform m -> A^{-1} m with phase e^{2 pi i m . d}, d = H^{-1}Ac;
    base coefficients compose with the affine map.  The star product and
    bracket are equivariant under this operation.
    """
    chart = f.chart
    if a.hvec != chart.hvec:
        raise NotInStabilizer("transition must preserve the chart form")
    n2 = chart.dim
    n = chart.n
    rows = [list(r) for r in a.rows]
    b = list(b)
    c = list(c)
    if len(b) != n2 or len(c) != n2:
        raise ValueError("b and c must be 2n-vectors")

    # d = H^{-1} A c
    ac = [sum_exact(rows[i][j] * c[j] for j in range(n2)) for i in range(n2)]
    d = [ac[n + i] * _frac(1, chart.hvec[i]) for i in range(n)]
    d += [-(ac[i] * _frac(1, chart.hvec[i])) for i in range(n)]

    # offset Ab for the base substitution x -> A x' + A b
    ab = [sum_exact(rows[i][j] * b[j] for j in range(n2)) for i in range(n2)]

    out = {}
    for m, poly in f.modes.items():
        phase_turns = sum_exact(m[i] * d[i] for i in range(n2))
        if isinstance(phase_turns, Fraction):
            phase = _phase_value(phase_turns)
        else:
            phase = cis_turns(phase_turns)
        newpoly = poly.compose_affine(rows, ab)
        if not (phase == QQi(1) or phase == 1):
            newpoly = newpoly * phase
        # m' = A^{-1} m  <=>  m = A m'; use exact inverse through transpose trick
        mprime = _int_solve(rows, m)
        out[tuple(mprime)] = newpoly

    new_g = _transition_gauge(chart, rows, ab, d)
    new_gcheck = _transition_gcheck(chart, rows)
    new_chart = BraneChart(chart.hvec, new_g, new_gcheck, chart.k)
    return FourierPolynomial(new_chart, out)


def _frac(a, b):
    return Fraction(a, b)


def sum_exact(it):
    total = None
    for v in it:
        total = v if total is None else total + v
    return 0 if total is None else total


def _int_solve(rows, m):
    """Solve A m' = m exactly for integer unimodular A."""
    from .lattice import int_inverse

    inv = int_inverse(rows)
    out = []
    for i in range(len(rows)):
        v = sum(inv[i][j] * m[j] for j in range(len(rows)))
        if v.denominator != 1:
            raise ValueError("mode image not integral")
        out.append(int(v))
    return out


def _transition_gauge(chart: BraneChart, rows, ab, d):
    """g'(x') = A^T g(A x' + A b) - A^T d-correction, as polynomials."""
    n2 = chart.dim
    composed = [p.compose_affine(rows, ab) for p in chart.g]
    at = [[rows[j][i] for j in range(n2)] for i in range(n2)]
    out = []
    for i in range(n2):
        p = BasePolynomial.zero(n2)
        for j in range(n2):
            if at[i][j]:
                p = p + composed[j] * at[i][j]
        # subtract (A^T d)_i as a constant
        const = sum_exact(at[i][j] * d[j] for j in range(n2))
        if not _is_zero(const):
            p = p - BasePolynomial.constant(n2, const)
        out.append(p)
    return out


def _transition_gcheck(chart: BraneChart, rows):
    """Transport the semi-character vector along the stabilizer element."""
    if all(isinstance(v, Fraction) for v in chart.gcheck):
        chi = SemiCharacter(chart.form, chart.gcheck)
        return chi.transform(rows).gcheck
    n2 = chart.dim
    return tuple(sum(rows[i][j] * float(chart.gcheck[j]) for j in range(n2))
                 for i in range(n2))
