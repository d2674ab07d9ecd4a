"""Fiberwise geometric quantization on torus fibers.

Gaussian theta bases, lattice-series expansions, sesquilinear pairings with
half-form factors, and the pairing maps between different fiber complex
structures.  Every lattice series is truncated to a recentered window around
its Gaussian peak, so the truncation radius controls a uniform tail bound.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegreeOverflow,
    IndexOutOfRange,
    PointMismatch,
    QuadratureUnderflow,
    TruncationTooSmall,
)
from .fiber import BraneChart
from .lattice import SiegelPoint
from .polynomials import BasePolynomial

TRUNCATION_RADIUS = 10
QUADRATURE_POINTS = 256
HERMITE_DEGREE_CAP = 8

_TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class FiberPoint:
    """A base point x together with dual-torus coordinates ycheck.

    The translated coordinates ucheck = ycheck - k * gcheck are always
    recomputed from the stored fields.  An optional box restricts x to the
    chart's domain.
    """

    chart: BraneChart
    x: tuple
    ycheck: tuple
    box: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "ycheck", tuple(float(v) for v in self.ycheck))
        dim = self.chart.dim
        if len(self.x) != dim or len(self.ycheck) != dim:
            raise ValueError("x and ycheck must have 2n entries")
        if not all(math.isfinite(v) for v in self.x + self.ycheck):
            raise ValueError("coordinates must be finite")
        if self.box is not None:
            box = tuple((float(lo), float(hi)) for lo, hi in self.box)
            object.__setattr__(self, "box", box)
            if len(box) != dim:
                raise ValueError("box must have 2n coordinate ranges")
            for v, (lo, hi) in zip(self.x, box):
                if not lo <= v <= hi:
                    raise ValueError("x outside the chart domain box")

    @property
    def ucheck(self):
        gc = np.array([float(v) for v in self.chart.gcheck])
        return np.array(self.ycheck) - self.chart.k * gc

    def gauge_values(self):
        """The gauge map g evaluated at x, as a real 2n-vector."""
        return np.array([complex(p.eval(self.x)).real for p in self.chart.g])


class ThetaFrame:
    """Gaussian theta basis attached to a fiber point and Siegel parameter.

    The basis is indexed by the residue set {0..k h_1 - 1} x ... x
    {0..k h_n - 1}; its size is the quantum dimension prod_i (k h_i).
    """

    def __init__(self, point, omega, trunc=TRUNCATION_RADIUS):
        if not isinstance(omega, SiegelPoint):
            omega = SiegelPoint(omega)
        if omega.n != point.chart.n:
            raise ValueError("Siegel parameter size must match the chart")
        if trunc < 8:
            raise TruncationTooSmall("truncation radius must be at least 8")
        self.point = point
        self.omega = omega
        self.trunc = int(trunc)
        k = point.chart.k
        self.index_set = tuple(itertools.product(
            *(range(k * h) for h in point.chart.hvec)))
        self._index_lookup = frozenset(self.index_set)

    @property
    def chart(self):
        return self.point.chart

    @property
    def dim(self) -> int:
        return len(self.index_set)

    def tail_bound(self) -> float:
        beta = float(np.linalg.eigvalsh(self.omega.omega.imag).min())
        return math.exp(-math.pi * self.chart.k * beta * self.trunc ** 2)

    def sigma(self, l, y):
        return theta_basis_eval(self, l, y)

    def sampler(self, l):
        return lambda y: theta_basis_eval(self, l, y)

    def to_json(self) -> dict:
        return {
            "hvec": list(self.chart.hvec),
            "k": self.chart.k,
            "gcheck": [float(v) for v in self.chart.gcheck],
            "g": [sorted([list(e), float(complex(c).real), float(complex(c).imag)]
                         for e, c in p.coeffs.items())
                  for p in self.chart.g],
            "x": list(self.point.x),
            "ycheck": list(self.point.ycheck),
            "omega": self.omega.to_json(),
            "trunc": self.trunc,
        }


def gaussian_envelope(a, b, omega, k, hvec):
    """k^{n/4} exp(pi i (a + (kH)^{-1}b) . (k Omega) (a + (kH)^{-1}b))."""
    om = omega.omega if isinstance(omega, SiegelPoint) else np.asarray(omega, dtype=complex)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    kh = k * np.asarray(hvec, dtype=float)
    v = a + b / kh
    quad = np.einsum("...i,ij,...j->...", v, k * om, v)
    return (k ** (len(hvec) / 4.0)) * np.exp(np.pi * 1j * quad)


def lattice_shift_factor(frame, lam, y):
    """Automorphy factor e^{2 pi i (k gcheck . lam + k lam2 . H u1)} at y."""
    chart = frame.chart
    n = chart.n
    lam = np.asarray(lam, dtype=float)
    y = np.asarray(y, dtype=float)
    gx = frame.point.gauge_values()
    u1 = y[..., :n] + gx[:n]
    gc = np.array([float(v) for v in chart.gcheck])
    h = np.asarray(chart.hvec, dtype=float)
    phase = chart.k * (lam @ gc) + chart.k * np.einsum(
        "...i,i,...i->...", np.broadcast_to(lam[n:], u1.shape), h, u1)
    return np.exp(_TWO_PI_I * phase)


def _window_offsets(n, radius):
    rng = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def theta_basis_eval(frame, l, y):
    """Evaluate the theta basis vector sigma_l at fiber coordinates y.

    The q-series is truncated to a window of radius frame.trunc recentered
    on the Gaussian peak, giving a tail below frame.tail_bound().
    """
    if isinstance(l, int):
        l = (l,)
    l = tuple(int(v) for v in l)
    if l not in frame._index_lookup:
        raise IndexOutOfRange(f"label {l} outside the residue index set")
    chart = frame.chart
    n, k = chart.n, chart.k
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 1
    if scalar:
        y = y[None, :]
    gx = frame.point.gauge_values()
    u = y + gx
    u1, u2 = u[..., :n], u[..., n:]
    y2 = y[..., n:]
    uc = frame.point.ucheck
    uc1, uc2 = uc[:n], uc[n:]
    kh = k * np.asarray(chart.hvec, dtype=float)
    larr = np.asarray(l, dtype=float)

    center = u2 + (uc1 - larr) / kh
    q0 = np.rint(center).astype(int)
    q = q0[..., None, :] + _window_offsets(n, frame.trunc)

    env = gaussian_envelope(u2[..., None, :] - q, uc1 - larr,
                            frame.omega, k, chart.hvec)
    gc = np.array([float(v) for v in chart.gcheck])
    base_phase = k * (y @ gc) - float(gx[:n] @ uc1)
    phase = (base_phase[..., None]
             + (y2[..., None, :] - q) @ uc2
             + np.einsum("...wi,...i->...w", larr + kh * q, u1))
    val = np.sum(env * np.exp(_TWO_PI_I * phase), axis=-1)
    return val[0] if scalar else val


def half_form_factor(omega, omegap):
    """Principal sqrt(det((Omega - conj(Omega'))/i)) on a continuous branch.

    The matrix has positive definite real part Im Omega + Im Omega', so it
    factors through a symmetric positive square root and the branch is fixed
    factorwise on the right half plane.
    """
    om = omega.omega if isinstance(omega, SiegelPoint) else np.asarray(omega, dtype=complex)
    omp = omegap.omega if isinstance(omegap, SiegelPoint) else np.asarray(omegap, dtype=complex)
    ysum = om.imag + omp.imag
    adiff = om.real - omp.real
    w, vecs = np.linalg.eigh(ysum)
    inv_root = vecs @ np.diag(w ** -0.5) @ vecs.T
    lam = np.linalg.eigvalsh(inv_root @ adiff @ inv_root)
    out = math.sqrt(float(np.prod(w)))
    for ev in lam:
        out = out * np.sqrt(1 - 1j * ev)
    return complex(out)


def pairing_quadrature(s, sp, omega, omegap, grid_points=QUADRATURE_POINTS):
    """Half-form factor times the periodic trapezoid average of s conj(sp).

    The samplers must be vectorized over a trailing 2n coordinate axis and
    quasi-periodic for the same prequantum data, so the integrand descends
    to the torus and the uniform grid rule converges spectrally.
    """
    if grid_points < 8:
        raise QuadratureUnderflow("need at least 8 quadrature points per axis")
    om = omega if isinstance(omega, SiegelPoint) else SiegelPoint(omega)
    omp = omegap if isinstance(omegap, SiegelPoint) else SiegelPoint(omegap)
    if omp.n != om.n:
        raise ValueError("Siegel parameters of different size")
    dim = 2 * om.n
    axis = np.arange(grid_points) / grid_points
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    grid = np.stack([g.ravel() for g in mesh], axis=-1)
    vals = s(grid) * np.conj(sp(grid))
    return half_form_factor(om, omp) * complex(vals.mean())


def weil_brezin_expand(data, frame, tail_tol=1e-8):
    """Series expansion of two-variable transform data into a fiber sampler.

    ``data(x, v, w)`` must be vectorized over matching leading axes of v and
    w and decay jointly (Gaussian class).  The returned sampler evaluates
    the triple lattice series truncated at the frame radius and raises
    TruncationTooSmall when the boundary-shell estimate exceeds tail_tol.
    """
    chart = frame.chart
    n, k = chart.n, chart.k
    point = frame.point
    gx = point.gauge_values()
    uc = point.ucheck
    uc1, uc2 = uc[:n], uc[n:]
    kh = k * np.asarray(chart.hvec, dtype=float)
    gc = np.array([float(v) for v in chart.gcheck])
    radius = frame.trunc
    offsets = _window_offsets(n, radius)
    edge = np.max(np.abs(offsets), axis=-1) == radius

    def sampler(y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 1
        if scalar:
            y = y[None, :]
        u = y + gx
        u1, y2 = u[..., :n], y[..., n:]
        base = k * (y @ gc) - float(gx[:n] @ uc1)
        r0 = np.rint(y2).astype(int)
        r = r0[..., None, :] + offsets
        varg = y2[..., None, :] - r
        total = np.zeros(y.shape[:-1], dtype=complex)
        shell_max = 0.0
        for l in frame.index_set:
            larr = np.asarray(l, dtype=float)
            qc0 = np.rint((uc1 - larr) / kh).astype(int)
            for qoff in _window_offsets(n, radius):
                qc = qc0 + qoff
                warg = uc1 - larr - kh * qc
                vals = data(point.x, varg, np.broadcast_to(warg, varg.shape))
                shell_vals = vals if np.max(np.abs(qoff)) == radius \
                    else vals[..., edge]
                if shell_vals.size:
                    shell_max = max(shell_max,
                                    float(np.max(np.abs(shell_vals))))
                phase = (base[..., None]
                         + varg @ uc2
                         + np.einsum("...wi,...i->...w",
                                     larr + kh * (r + qc), u1))
                total = total + np.sum(vals * np.exp(_TWO_PI_I * phase), axis=-1)
        tail_est = shell_max * float((2 * radius + 3) ** n)
        if tail_est > tail_tol:
            raise TruncationTooSmall(
                f"series tail estimate {tail_est:.3e} above {tail_tol:.1e}")
        return total[0] if scalar else total

    return sampler


def pairing_lattice_sum(data, datap, frame, framep, window=6,
                        integration_radius=8.0, step=0.0625):
    """Closed lattice-sum form of the sesquilinear pairing on transform data.

    Sums e^{2 pi i m2 . uc2} integral data(x, t + m2, uc1 - m1 - kH m2)
    conj(datap(x, t, uc1 - m1)) d^n t over integer shifts m = (m1, m2),
    scaled by the half-form factor.
    """
    if frame.point != framep.point or frame.chart != framep.chart:
        raise PointMismatch("pairing requires a shared fiber point")
    chart = frame.chart
    n, k = chart.n, chart.k
    uc = frame.point.ucheck
    uc1, uc2 = uc[:n], uc[n:]
    kh = k * np.asarray(chart.hvec, dtype=float)
    axis = np.arange(-integration_radius, integration_radius + step / 2, step)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    tgrid = np.stack([g.ravel() for g in mesh], axis=-1)
    x = frame.point.x
    total = 0j
    for m in itertools.product(*([range(-window, window + 1)] * (2 * n))):
        m1 = np.asarray(m[:n], dtype=float)
        m2 = np.asarray(m[n:], dtype=float)
        left = data(x, tgrid + m2, np.broadcast_to(uc1 - m1 - kh * m2, tgrid.shape))
        right = datap(x, tgrid, np.broadcast_to(uc1 - m1, tgrid.shape))
        integral = complex(np.sum(left * np.conj(right))) * step ** n
        total += np.exp(_TWO_PI_I * float(m2 @ uc2)) * integral
    return half_form_factor(frame.omega, framep.omega) * total


class QuantumState:
    """Coefficient vector over a theta frame."""

    def __init__(self, frame, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (frame.dim,):
            raise ValueError("coefficient vector length must equal frame dim")
        if not np.all(np.isfinite(coeffs.view(float))):
            raise ValueError("coefficients must be finite")
        self.frame = frame
        self.coeffs = coeffs

    def norm(self) -> float:
        # the theta basis is orthonormal for the half-form pairing
        return float(np.linalg.norm(self.coeffs))

    def evaluate(self, y):
        out = None
        for c, l in zip(self.coeffs, self.frame.index_set):
            term = c * theta_basis_eval(self.frame, l, y)
            out = term if out is None else out + term
        return out

    def to_json(self) -> dict:
        return {
            "frame": self.frame.to_json(),
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }


def bks_transform(state, target):
    """Map a state to the frame at another Siegel parameter, same point.

    In theta frames the pairing map is the identity on coefficients.
    """
    if isinstance(target, ThetaFrame):
        if target.point != state.frame.point:
            raise PointMismatch("pairing map requires the same fiber point")
        frame = target
    else:
        frame = ThetaFrame(state.frame.point, target, state.frame.trunc)
    return QuantumState(frame, state.coeffs.copy())


class MirrorSectionRep:
    """Finite Hermite-Gaussian profile in the dual variables.

    A sum of terms xpoly(x) * bpoly(b) * e^{2 pi i beta . b} *
    e^{-pi |b - c|^2} with polynomial x-coefficients.  The class is closed
    under integer shifts of b, phase multiplication, differentiation, and
    multiplication by polynomials, with the Hermite degree capped.
    """

    def __init__(self, n, nx, terms):
        self.n = int(n)
        self.nx = int(nx)
        norm_terms = []
        for xpoly, bpoly, beta, center in terms:
            if xpoly.nvars != self.nx or bpoly.nvars != self.n:
                raise ValueError("term arity mismatch")
            if bpoly.degree() > HERMITE_DEGREE_CAP:
                raise DegreeOverflow(
                    f"Hermite degree {bpoly.degree()} exceeds cap"
                    f" {HERMITE_DEGREE_CAP}")
            if not (bpoly.is_zero() and xpoly.is_zero()):
                norm_terms.append((xpoly, bpoly,
                                   tuple(complex(v) for v in beta),
                                   tuple(float(v) for v in center)))
        self.terms = tuple(norm_terms)

    @classmethod
    def zero(cls, n, nx):
        return cls(n, nx, [])

    @classmethod
    def gaussian(cls, n, nx, beta=None, center=None, xpoly=None, bpoly=None):
        beta = beta if beta is not None else (0.0,) * n
        center = center if center is not None else (0.0,) * n
        xpoly = xpoly if xpoly is not None else BasePolynomial.constant(nx, 1)
        bpoly = bpoly if bpoly is not None else BasePolynomial.constant(n, 1)
        return cls(n, nx, [(xpoly, bpoly, beta, center)])

    def degree(self) -> int:
        return max((b.degree() for _, b, _, _ in self.terms), default=0)

    def _map_terms(self, fn):
        out = []
        for term in self.terms:
            out.extend(fn(term))
        return MirrorSectionRep(self.n, self.nx, out)

    def __add__(self, other):
        if not isinstance(other, MirrorSectionRep):
            return NotImplemented
        if (other.n, other.nx) != (self.n, self.nx):
            raise ValueError("profile arity mismatch")
        return MirrorSectionRep(self.n, self.nx, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = complex(c)
        return self._map_terms(
            lambda t: [(t[0] * c, t[1], t[2], t[3])])

    def shift(self, m1):
        """Translate the profile argument: value'(b) = value(b + m1)."""
        m1 = tuple(float(v) for v in m1)
        ident = [[1 if i == j else 0 for j in range(self.n)]
                 for i in range(self.n)]

        def one(term):
            xpoly, bpoly, beta, center = term
            phase = np.exp(_TWO_PI_I * sum(bi * mi for bi, mi in zip(beta, m1)))
            return [(xpoly * complex(phase), bpoly.compose_affine(ident, m1),
                     beta, tuple(c - m for c, m in zip(center, m1)))]

        return self._map_terms(one)

    def multiply_phase(self, beta_extra, const=1):
        beta_extra = tuple(complex(v) for v in beta_extra)
        c = complex(const)
        return self._map_terms(lambda t: [(
            t[0] * c, t[1],
            tuple(b + e for b, e in zip(t[2], beta_extra)), t[3])])

    def multiply_xpoly(self, poly):
        if poly.nvars != self.nx:
            raise ValueError("x-polynomial arity mismatch")
        return self._map_terms(lambda t: [(t[0] * poly, t[1], t[2], t[3])])

    def multiply_bpoly(self, poly):
        if poly.nvars != self.n:
            raise ValueError("b-polynomial arity mismatch")
        return self._map_terms(lambda t: [(t[0], t[1] * poly, t[2], t[3])])

    def diff_x(self, a):
        return self._map_terms(lambda t: [(t[0].diff(a), t[1], t[2], t[3])])

    def diff_b(self, i):
        def one(term):
            xpoly, bpoly, beta, center = term
            var = BasePolynomial.variable(self.n, i)
            shiftpoly = (var - BasePolynomial.constant(self.n, center[i]))
            out = [(xpoly, bpoly.diff(i), beta, center)]
            out.append((xpoly * (_TWO_PI_I * beta[i]), bpoly, beta, center))
            out.append((xpoly * (-2 * math.pi), bpoly * shiftpoly, beta, center))
            return out

        return self._map_terms(one)

    def evaluate(self, x, b):
        """Value at base point x and profile argument array b (..., n)."""
        b = np.asarray(b, dtype=float)
        scalar = b.ndim <= 1
        barr = np.atleast_2d(b) if b.ndim <= 1 else b
        out = np.zeros(barr.shape[:-1], dtype=complex)
        for xpoly, bpoly, beta, center in self.terms:
            xv = complex(xpoly.eval(tuple(x)))
            if xv == 0:
                continue
            pv = bpoly.eval_grid([barr[..., i] for i in range(self.n)])
            ph = np.exp(_TWO_PI_I * (barr @ np.asarray(beta)))
            diff = barr - np.asarray(center)
            env = np.exp(-math.pi * np.einsum("...i,...i->...", diff, diff))
            out = out + xv * pv * ph * env
        return complex(out[0]) if scalar else out

    def is_zero_sampled(self, x, points, tol=1e-12) -> bool:
        return bool(np.max(np.abs(self.evaluate(x, points))) < tol) \
            if len(points) else True


def profile_to_series_data(profile, frame):
    """Embed a dual profile as two-variable transform data.

    Returns data(x, v, w) = profile(x, w) * N_Omega(v + g2(x), w), the
    Gaussian-envelope embedding whose series expansion reproduces the
    underlying holomorphic section.
    """
    chart = frame.chart
    n, k = chart.n, chart.k

    def data(x, v, w):
        g2 = np.array([complex(p.eval(tuple(x))).real for p in chart.g[n:]])
        env = gaussian_envelope(np.asarray(v) + g2, w, frame.omega, k, chart.hvec)
        return profile.evaluate(x, np.asarray(w, dtype=float)) * env

    return data
