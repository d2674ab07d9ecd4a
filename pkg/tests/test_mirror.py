"""Twisted Toeplitz matrices, their oracle, connection, and inverse."""

from fractions import Fraction

import numpy as np
import pytest

from torusquant.errors import BandUnknown, ChartMismatch, PointMismatch
from torusquant.fiber import (
    BraneChart,
    DolbeaultForm,
    FourierPolynomial,
    chart_transition_pullback,
    dolbeault,
)
from torusquant.lattice import SiegelPoint, TwistedSymplectic, int_inverse
from torusquant.mirror import (
    EndoMatrix,
    HeatTwist,
    MirrorConnection,
    connection_apply,
    curvature_form,
    expected_curvature,
    heat_twist_scalar,
    mirror_graded_homomorphism_check,
    mirror_homomorphism_check,
    reconstruct_symbol,
    toeplitz_profile_action,
    toeplitz_quadrature_oracle,
    twisted_toeplitz_matrix,
)
from torusquant.polynomials import BasePolynomial, PiPoly, QQi
from torusquant.theta import FiberPoint, MirrorSectionRep, ThetaFrame

I1 = SiegelPoint(1j * np.eye(1))


def make_chart(h=1, k=1, gauge="zero", gcheck=None, n=1):
    n2 = 2 * n
    if gauge == "zero":
        g = None
    elif gauge == "linear":
        # g = S x with S symmetric, so the Jacobian condition holds
        S = [[Fraction(i + j + 1, 3) for j in range(n2)] for i in range(n2)]
        g = [sum((BasePolynomial.variable(n2, j, S[i][j]) for j in range(n2)),
                 BasePolynomial.zero(n2)) for i in range(n2)]
    elif gauge == "quadratic":
        # gradient of x1^2 x2 / 2 in the first two base variables
        g = [BasePolynomial.zero(n2) for _ in range(n2)]
        g[0] = BasePolynomial(n2, {tuple(1 if t in (0, 1) else 0
                                         for t in range(n2)): Fraction(1)})
        e2 = [0] * n2
        e2[0] = 2
        g[1] = BasePolynomial(n2, {tuple(e2): Fraction(1, 2)})
    return BraneChart((h,) * n, g=g, gcheck=gcheck, k=k)


def rand_point(chart, rng):
    n2 = chart.dim
    return FiberPoint(chart, rng.uniform(-0.5, 0.5, n2), rng.uniform(-0.5, 0.5, n2))


def rand_symbol(chart, rng, band=2, degree=0, terms=4):
    n2 = chart.dim
    modes = {}
    for _ in range(terms):
        m = tuple(int(v) for v in rng.integers(-band, band + 1, n2))
        if degree == 0:
            modes[m] = complex(rng.normal(), rng.normal())
        else:
            coeffs = {}
            for _ in range(3):
                exp = tuple(int(v) for v in rng.integers(0, degree + 1, n2))
                if sum(exp) <= degree:
                    coeffs[exp] = complex(rng.normal(), rng.normal())
            modes[m] = BasePolynomial(n2, coeffs)
    return FourierPolynomial(chart, modes)


def gauge_frame(h, k, rng, omega=1j):
    chart = make_chart(h=h, k=k, gauge="quadratic",
                       gcheck=(Fraction(1, 4), Fraction(1, 3)))
    return ThetaFrame(rand_point(chart, rng), SiegelPoint(omega * np.eye(1)), 10)


# ---------------------------------------------------------------------------
# heat twist
# ---------------------------------------------------------------------------

def test_heat_twist_unit_and_example():
    assert heat_twist_scalar((0, 0), I1, 1, (1,)) == 1.0
    tw = HeatTwist(I1, 1, (1,))
    assert tw.multiplier((0, 0)) == 1.0
    assert tw.multiplier((1, 0)) == pytest.approx(np.exp(np.pi / 2), abs=1e-12)


def _finite_difference_twist(m, omega, k, h, grid=512):
    """Apply the fiber Laplacian to the mode by 4th-order periodic stencils."""
    omega = complex(omega)
    ax = np.arange(grid) / grid
    u1, u2 = np.meshgrid(ax, ax, indexing="ij")
    f = np.exp(2j * np.pi * (m[0] * u1 + m[1] * u2))
    step = 1.0 / grid

    def d4(arr, axis):
        return (-np.roll(arr, -2, axis) + 8 * np.roll(arr, -1, axis)
                - 8 * np.roll(arr, 1, axis) + np.roll(arr, 2, axis)) / (12 * step)

    a = d4(f, 1) + (omega.conjugate() / h) * d4(f, 0)
    b = d4(a, 1) + (omega / h) * d4(a, 0)
    mu = -(1.0 / (8 * np.pi * omega.imag)) * b / f
    return np.exp(np.mean(mu) / k)


@pytest.mark.parametrize("m,omega,k,h", [
    ((1, 0), 1j, 1, 1),
    ((1, 1), 0.4 + 0.8j, 2, 1),
    ((2, -1), 1 + 2j, 2, 2),
])
def test_heat_twist_matches_finite_difference_oracle(m, omega, k, h):
    got = heat_twist_scalar(m, omega * np.eye(1), k, (h,))
    ref = _finite_difference_twist(m, omega, k, h)
    assert abs(got - ref) / abs(ref) < 1e-6


def test_heat_twist_backward_flow_grows():
    for m1 in range(-3, 4):
        for m2 in range(-3, 4):
            if (m1, m2) != (0, 0):
                assert abs(heat_twist_scalar((m1, m2), 2j * np.eye(1), 1, (1,))) > 1
    for m in [(1, 0, 0, 0), (0, 1, 2, 0), (1, 1, -1, 3)]:
        assert abs(heat_twist_scalar(m, 1j * np.diag([1.0, 2.0]), 2, (1, 2))) > 1


def test_heat_twist_conjugation_symmetry_for_imaginary_omega():
    for m1 in range(-2, 3):
        for m2 in range(-2, 3):
            a = heat_twist_scalar((m1, m2), 1.7j * np.eye(1), 2, (2,))
            b = heat_twist_scalar((-m1, -m2), 1.7j * np.eye(1), 2, (2,))
            assert abs(b - np.conjugate(a)) < 1e-14


# ---------------------------------------------------------------------------
# closed form vs quadrature
# ---------------------------------------------------------------------------

def test_unit_symbol_maps_to_identity():
    chart = make_chart(h=1, k=2)
    frame = ThetaFrame(FiberPoint(chart, (0.0, 0.0), (0.0, 0.0)), I1, 10)
    unit = FourierPolynomial.unit(chart)
    closed = twisted_toeplitz_matrix(unit, frame)
    assert closed.provenance == "closed-form"
    assert np.array_equal(closed.entries, np.eye(2))
    quad = toeplitz_quadrature_oracle(unit, frame, 256)
    assert quad.provenance == "quadrature"
    assert np.max(np.abs(quad.entries - np.eye(2))) < 1e-6


def test_single_mode_cyclic_shift_example():
    # trivial brane data: the mode (1, 0) acts by the 2x2 cyclic shift
    chart = make_chart(h=1, k=2)
    frame = ThetaFrame(FiberPoint(chart, (0.0, 0.0), (0.0, 0.0)), I1, 10)
    f = FourierPolynomial.single_mode(chart, (1, 0))
    closed = twisted_toeplitz_matrix(f, frame)
    assert closed.entries[0, 0] == 0 and closed.entries[1, 1] == 0
    assert abs(closed.entries[1, 0]) > 0 and abs(closed.entries[0, 1]) > 0
    quad = toeplitz_quadrature_oracle(f, frame, 256)
    assert np.max(np.abs(closed.entries - quad.entries)) < 1e-6


@pytest.mark.parametrize("h", [1, 2])
@pytest.mark.parametrize("omega", [1j, 1 + 2j])
def test_closed_form_matches_quadrature_oracle(h, omega):
    rng = np.random.default_rng(50 * h + int(omega.real))
    frame = gauge_frame(h, 2, rng, omega)
    for _ in range(2):
        m = tuple(int(v) for v in rng.integers(-2, 3, 2))
        f = FourierPolynomial.single_mode(frame.chart, m,
                                          complex(rng.normal(), rng.normal()))
        closed = twisted_toeplitz_matrix(f, frame)
        quad = toeplitz_quadrature_oracle(f, frame, 256)
        assert np.max(np.abs(closed.entries - quad.entries)) < 1e-6


def test_polynomial_symbol_matches_quadrature_oracle():
    rng = np.random.default_rng(7)
    frame = gauge_frame(2, 2, rng)
    f = rand_symbol(frame.chart, rng, band=2, degree=2)
    closed = twisted_toeplitz_matrix(f, frame)
    quad = toeplitz_quadrature_oracle(f, frame, 256)
    assert np.max(np.abs(closed.entries - quad.entries)) < 1e-6


def test_real_symbol_matrices_are_hermitian():
    rng = np.random.default_rng(8)
    frame = gauge_frame(2, 2, rng)
    f = rand_symbol(frame.chart, rng, band=2, degree=2)
    fsym = f + f.conjugate()
    quad = toeplitz_quadrature_oracle(fsym, frame, 256).entries
    assert np.max(np.abs(quad - quad.conj().T)) < 1e-6
    closed = twisted_toeplitz_matrix(fsym, frame).entries
    assert np.max(np.abs(closed - closed.conj().T)) < 1e-12


def test_matrices_independent_of_siegel_parameter():
    rng = np.random.default_rng(9)
    chart = make_chart(h=2, k=2, gauge="quadratic",
                       gcheck=(Fraction(1, 4), Fraction(1, 3)))
    pt = rand_point(chart, rng)
    f = rand_symbol(chart, rng, band=2, degree=2)
    mats = []
    for omega in (1j, 0.3 + 0.7j):
        frame = ThetaFrame(pt, SiegelPoint(omega * np.eye(1)), 10)
        mats.append(toeplitz_quadrature_oracle(f, frame, 256).entries)
    assert np.max(np.abs(mats[0] - mats[1])) < 1e-8


def test_chart_mismatch_guards():
    chart = make_chart(h=1, k=2)
    frame = ThetaFrame(FiberPoint(chart, (0.0, 0.0), (0.0, 0.0)), I1, 10)
    other = FourierPolynomial.unit(make_chart(h=2, k=2))
    with pytest.raises(ChartMismatch):
        twisted_toeplitz_matrix(other, frame)
    with pytest.raises(ChartMismatch):
        toeplitz_quadrature_oracle(other, frame)
    with pytest.raises(ChartMismatch):
        mirror_homomorphism_check(other, FourierPolynomial.unit(chart), [])


# ---------------------------------------------------------------------------
# homomorphism law
# ---------------------------------------------------------------------------

def test_homomorphism_trivial_cases():
    rng = np.random.default_rng(10)
    chart = make_chart(h=1, k=2)
    pts = [rand_point(chart, rng) for _ in range(3)]
    g = rand_symbol(chart, rng, band=2, degree=2)
    assert mirror_homomorphism_check(FourierPolynomial.unit(chart), g, pts) == 0.0
    fconst = FourierPolynomial(chart, {(0, 0): 2.5 - 1j})
    assert mirror_homomorphism_check(fconst, g, pts) < 1e-14
    assert mirror_homomorphism_check(g, fconst, pts) < 1e-14


def test_homomorphism_random_band_limited_pairs():
    rng = np.random.default_rng(11)
    worst = 0.0
    for h in (1, 2):
        for k in (1, 2, 3):
            chart = make_chart(h=h, k=k, gauge="quadratic",
                               gcheck=(Fraction(1, 4), Fraction(1, 3)))
            pts = [rand_point(chart, rng) for _ in range(5)]
            for _ in range(3):
                f = rand_symbol(chart, rng, band=3, degree=2)
                g = rand_symbol(chart, rng, band=3, degree=2)
                worst = max(worst, mirror_homomorphism_check(f, g, pts))
    assert worst < 1e-10


def test_graded_homomorphism_with_forms():
    rng = np.random.default_rng(12)
    chart = make_chart(h=2, k=2, gauge="quadratic")
    alpha = DolbeaultForm(chart, 1, {
        (0,): rand_symbol(chart, rng, band=2, degree=1),
        (1,): rand_symbol(chart, rng, band=2, degree=1),
    })
    beta = DolbeaultForm(chart, 1, {(1,): rand_symbol(chart, rng, band=2, degree=1)})
    pts = [rand_point(chart, rng) for _ in range(3)]
    assert mirror_graded_homomorphism_check(alpha, beta, pts) < 1e-10
    scalar = rand_symbol(chart, rng, band=2, degree=1)
    assert mirror_graded_homomorphism_check(scalar, alpha, pts) < 1e-10


# ---------------------------------------------------------------------------
# action on dual profiles
# ---------------------------------------------------------------------------

def _characterization_coeffs(profile, frame, window=8):
    """c_l = sum over qc of profile(x, uc1 - l - kH qc) e^{2 pi i qc.uc2}."""
    chart = frame.chart
    n = chart.n
    uc = frame.point.ucheck
    kh = chart.k * np.asarray(chart.hvec, dtype=float)
    qgrid = np.array(np.meshgrid(*([np.arange(-window, window + 1)] * n),
                                 indexing="ij")).reshape(n, -1).T
    out = np.zeros(frame.dim, dtype=complex)
    for i, l in enumerate(frame.index_set):
        args = uc[:n] - np.asarray(l, dtype=float) - qgrid * kh
        vals = profile.evaluate(frame.point.x, args)
        out[i] = np.sum(vals * np.exp(2j * np.pi * (qgrid @ uc[n:])))
    return out


@pytest.mark.parametrize("h,k", [(1, 1), (1, 2), (2, 2)])
def test_profile_action_consistent_with_matrix(h, k):
    rng = np.random.default_rng(40 + 10 * h + k)
    frame = gauge_frame(h, k, rng)
    bpoly = BasePolynomial(1, {(0,): 1.0, (2,): 0.3})
    xpoly = BasePolynomial(2, {(0, 0): 1.0, (1, 1): 0.5})
    prof = MirrorSectionRep.gaussian(1, 2, beta=(0.2,), center=(0.4,),
                                     xpoly=xpoly, bpoly=bpoly)
    f = rand_symbol(frame.chart, rng, band=2, degree=2)
    lhs = _characterization_coeffs(toeplitz_profile_action(f, prof), frame)
    rhs = twisted_toeplitz_matrix(f, frame).entries \
        @ _characterization_coeffs(prof, frame)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_profile_action_of_zero_symbol_is_zero():
    chart = make_chart(h=1, k=1)
    prof = MirrorSectionRep.gaussian(1, 2)
    out = toeplitz_profile_action(FourierPolynomial.zero(chart), prof)
    assert not out.terms


# ---------------------------------------------------------------------------
# connection: intertwining and curvature
# ---------------------------------------------------------------------------

def _intertwining_residual(chart, f, rng, trials=4):
    conn = MirrorConnection(chart)
    n, n2 = chart.n, chart.dim
    derivative = dolbeault(f)
    bpoly = BasePolynomial(n, {tuple(2 if i == 0 else 0 for i in range(n)): 0.4,
                               (0,) * n: 1.0})
    xpoly = BasePolynomial(n2, {(0,) * n2: 1.0,
                                tuple(1 if i == 0 else 0 for i in range(n2)): 0.7})
    prof = MirrorSectionRep.gaussian(n, n2, beta=(0.15,) * n, center=(0.3,) * n,
                                     xpoly=xpoly, bpoly=bpoly)
    moved = toeplitz_profile_action(f, prof)
    worst = 0.0
    for a in range(n2):
        comp = derivative.components.get((a,))
        lhs = toeplitz_profile_action(comp, prof) if comp is not None \
            else MirrorSectionRep.zero(n, n2)
        rhs = connection_apply(conn, ("Zbar", a), moved) \
            - toeplitz_profile_action(f, connection_apply(conn, ("Zbar", a), prof))
        diff = lhs - rhs
        for _ in range(trials):
            x = rng.uniform(-0.7, 0.7, n2)
            b = rng.uniform(-1.5, 1.5, (12, n))
            worst = max(worst, float(np.max(np.abs(diff.evaluate(x, b)))))
    return worst


@pytest.mark.parametrize("gauge", ["zero", "linear"])
def test_dolbeault_intertwining_both_branches(gauge):
    rng = np.random.default_rng(13)
    worst = 0.0
    for h, k in [(1, 1), (2, 3)]:
        chart = make_chart(h=h, k=k, gauge=gauge)
        for _ in range(3):
            m = tuple(int(v) for v in rng.integers(-2, 3, 2))
            f = FourierPolynomial.single_mode(chart, m,
                                              complex(rng.normal(), rng.normal()))
            worst = max(worst, _intertwining_residual(chart, f, rng))
    assert worst < 1e-10


def test_dolbeault_intertwining_two_dimensional_fiber():
    rng = np.random.default_rng(14)
    chart = make_chart(h=2, k=2, gauge="linear", n=2)
    f = FourierPolynomial.single_mode(chart, (1, 0, -1, 2))
    assert _intertwining_residual(chart, f, rng, trials=2) < 1e-10


def test_curvature_matches_constant_plus_gauge_jacobian():
    for n in (1, 2):
        for h in (1, 2):
            for k in (1, 2):
                for gauge in ("zero", "linear", "quadratic"):
                    chart = make_chart(h=h, k=k, gauge=gauge, n=n)
                    got = curvature_form(MirrorConnection(chart))
                    want = expected_curvature(chart)
                    for a in range(chart.dim):
                        for b in range(chart.dim):
                            assert got[a][b] == want[a][b]


def test_curvature_specific_entries():
    # trivial data: only the constant -2 pi i (1/2) H^{-1} block survives
    F = curvature_form(MirrorConnection(make_chart(h=1, k=1)))
    assert F[0][1] == BasePolynomial.constant(3, PiPoly({1: QQi(0, -1)}))
    assert F[1][0] == BasePolynomial.constant(3, PiPoly({1: QQi(0, 1)}))
    assert F[0][0].is_zero() and F[1][1].is_zero()
    # identity Jacobian adds pi k on the diagonal
    gid = [BasePolynomial.variable(2, i, Fraction(1)) for i in range(2)]
    chart = BraneChart((1,), g=gid, k=2)
    F = curvature_form(MirrorConnection(chart))
    assert F[0][0] == BasePolynomial.constant(3, PiPoly({1: QQi(2)}))
    assert all(F[a][b] == expected_curvature(chart)[a][b]
               for a in range(2) for b in range(2))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def test_reconstruction_zero_and_missing_band():
    rng = np.random.default_rng(15)
    chart = make_chart(h=1, k=2)
    frame = ThetaFrame(rand_point(chart, rng), I1, 10)
    zmat = twisted_toeplitz_matrix(FourierPolynomial.zero(chart), frame)
    rec = reconstruct_symbol([zmat], band=[(0, 0), (1, 0)], monomials=[(0, 0)])
    assert rec.is_zero()
    with pytest.raises(BandUnknown):
        reconstruct_symbol([zmat])


def test_reconstruction_constant_coefficients_round_trip():
    rng = np.random.default_rng(16)
    chart = make_chart(h=1, k=2)
    band = [(a, b) for a in range(-2, 3) for b in range(-2, 3)]
    worst = 0.0
    for _ in range(15):
        picks = rng.choice(len(band), size=6, replace=False)
        f = FourierPolynomial(chart, {band[i]: complex(rng.normal(), rng.normal())
                                      for i in picks})
        x = tuple(rng.uniform(-0.5, 0.5, 2))
        mats = [twisted_toeplitz_matrix(
            f, ThetaFrame(FiberPoint(chart, x, rng.uniform(-0.5, 0.5, 2)), I1, 10))
            for _ in range(10)]
        rec = reconstruct_symbol(mats, band=band, monomials=[(0, 0)])
        for m in band:
            want = complex(f.modes[m].constant_term()) if m in f.modes else 0.0
            got = complex(rec.modes[m].constant_term()) if m in rec.modes else 0.0
            worst = max(worst, abs(want - got))
    assert worst < 1e-12


def test_reconstruction_degree_two_coefficients():
    rng = np.random.default_rng(17)
    chart = make_chart(h=1, k=2)
    band = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    f = rand_symbol(chart, rng, band=1, degree=2)
    mats = []
    for xa in np.linspace(-0.8, 0.8, 5):
        for xb in np.linspace(-0.7, 0.9, 5):
            for _ in range(6):
                pt = FiberPoint(chart, (xa, xb), rng.uniform(-0.5, 0.5, 2))
                mats.append(twisted_toeplitz_matrix(f, ThetaFrame(pt, I1, 10)))
    rec = reconstruct_symbol(mats, band=band)
    err = 0.0
    zero = BasePolynomial.zero(2)
    for m in band:
        want = f.modes.get(m, zero)
        got = rec.modes.get(m, zero)
        for exp in set(want.coeffs) | set(got.coeffs):
            err = max(err, abs(complex(want.coeffs.get(exp, 0))
                               - complex(got.coeffs.get(exp, 0))))
    assert err < 1e-10
    redo = twisted_toeplitz_matrix(rec, mats[0].frame)
    assert np.max(np.abs(redo.entries - mats[0].entries)) < 1e-12


# ---------------------------------------------------------------------------
# matrix container
# ---------------------------------------------------------------------------

def test_endomatrix_validation_product_and_json():
    rng = np.random.default_rng(18)
    chart = make_chart(h=1, k=2)
    frame = ThetaFrame(rand_point(chart, rng), I1, 10)
    with pytest.raises(ValueError):
        EndoMatrix(frame, np.zeros((3, 3)), "closed-form")
    with pytest.raises(ValueError):
        EndoMatrix(frame, np.zeros((2, 2)), "guess")
    with pytest.raises(ValueError):
        EndoMatrix(frame, np.full((2, 2), np.nan), "quadrature")
    a = twisted_toeplitz_matrix(rand_symbol(chart, rng), frame)
    b = twisted_toeplitz_matrix(rand_symbol(chart, rng), frame)
    prod = a @ b
    assert prod.provenance == "product"
    assert np.allclose(prod.entries, a.entries @ b.entries)
    blob = prod.to_json()
    assert blob["provenance"] == "product"
    assert blob["frame"]["k"] == 2
    assert len(blob["entries"]) == 2 and len(blob["entries"][0][0]) == 2
    other = ThetaFrame(rand_point(chart, rng), I1, 10)
    with pytest.raises(PointMismatch):
        a @ twisted_toeplitz_matrix(rand_symbol(chart, rng), other)


# ---------------------------------------------------------------------------
# chart equivariance
# ---------------------------------------------------------------------------

def _transition_point(point, a, b, c, new_chart):
    """Image of a fiber point under the transition behind the symbol pullback.

    The base point moves by the inverse affine map; the dual point picks up
    the inverse-linear part plus two exact shifts: a half-characteristic
    from the stabilizer element and a translation paired through the form.
    """
    chart = point.chart
    n, n2, k, hv = chart.n, chart.dim, chart.k, chart.hvec
    rows = a.rows
    ainv = int_inverse(rows)
    xb = [sum(float(ainv[i][j]) * point.x[j] for j in range(n2)) - float(b[i])
          for i in range(n2)]
    u = point.ucheck
    ub = [sum(float(ainv[i][j]) * u[j] for j in range(n2)) for i in range(n2)]
    ac = [sum(Fraction(rows[i][j]) * Fraction(c[j]) for j in range(n2))
          for i in range(n2)]
    d = [ac[n + i] / hv[i] for i in range(n)] + [-ac[i] / hv[i] for i in range(n)]
    for i in range(n):
        half = sum(Fraction(rows[n + t][n + i] * rows[t][n + i] * hv[i] ** 2, hv[t])
                   for t in range(n))
        pair = sum(rows[t][n + i] * d[t] + rows[n + t][n + i] * d[n + t]
                   for t in range(n))
        ub[i] += float(Fraction(k, 2) * half + k * hv[i] * pair)
        half = sum(Fraction(rows[n + t][i] * rows[t][i] * hv[i] ** 2, hv[t])
                   for t in range(n))
        pair = sum(rows[t][i] * d[t] + rows[n + t][i] * d[n + t]
                   for t in range(n))
        ub[n + i] -= float(Fraction(k, 2) * half + k * hv[i] * pair)
    ycheck = [ub[i] + k * float(new_chart.gcheck[i]) for i in range(n2)]
    return FiberPoint(new_chart, xb, ycheck)


def _common_intertwiner(mats_a, mats_b):
    """Unit-Frobenius solution of ma q = q mb shared by all matrix pairs."""
    dim = mats_a[0].shape[0]
    eye = np.eye(dim)
    stack = np.vstack([np.kron(ma, eye) - np.kron(eye, mb.T)
                       for ma, mb in zip(mats_a, mats_b)])
    vals, vecs = np.linalg.svd(stack)[1:]
    return vals, vecs[-1].conj().reshape(dim, dim)


@pytest.mark.parametrize("h,k,rows,b,c", [
    (1, 2, [[1, 1], [0, 1]],
     (Fraction(1, 2), Fraction(-1, 3)), (Fraction(1, 4), Fraction(1, 5))),
    (2, 1, [[0, -1], [1, 0]], (0, 0), (Fraction(1, 3), 0)),
    (2, 3, [[2, 1], [1, 1]],
     (Fraction(-1, 4), Fraction(1, 6)), (Fraction(1, 2), Fraction(-1, 7))),
])
def test_matrices_equivariant_under_chart_transitions(h, k, rows, b, c):
    rng = np.random.default_rng(10 * h + k)
    chart = make_chart(h=h, k=k, gauge="quadratic",
                       gcheck=(Fraction(1, 4), Fraction(1, 3)))
    a = TwistedSymplectic((h,), rows)
    point = rand_point(chart, rng)
    frame = ThetaFrame(point, I1, 10)
    symbols = [rand_symbol(chart, rng, band=2, degree=1, terms=3)
               for _ in range(3)]
    pulled = [chart_transition_pullback(f, a, b, c) for f in symbols]
    new_frame = ThetaFrame(_transition_point(point, a, b, c, pulled[0].chart),
                           I1, 10)
    mats_a = [twisted_toeplitz_matrix(f, frame).entries for f in symbols]
    mats_b = [twisted_toeplitz_matrix(f, new_frame).entries for f in pulled]
    svals, p = _common_intertwiner(mats_a, mats_b)
    assert svals[-1] <= 1e-10
    assert svals[-2] > 1e-6  # the intertwiner is unique up to phase
    p *= np.sqrt(frame.dim) / np.linalg.norm(p)
    assert np.linalg.norm(p @ p.conj().T - np.eye(frame.dim)) <= 1e-8
    for ma, mb in zip(mats_a, mats_b):
        assert np.linalg.norm(ma @ p - p @ mb) <= 1e-8


def test_matrices_equivariant_two_dimensional_fiber():
    rng = np.random.default_rng(21)
    s = [[Fraction(i + j + 1, 3) for j in range(4)] for i in range(4)]
    g = [sum((BasePolynomial.variable(4, j, s[i][j]) for j in range(4)),
             BasePolynomial.zero(4)) for i in range(4)]
    chart = BraneChart((1, 2), g=g,
                       gcheck=(Fraction(1, 4), 0, Fraction(1, 3), Fraction(1, 2)))
    # upper-unipotent block element: B H symmetric puts it in the stabilizer
    a = TwistedSymplectic((1, 2), [[1, 0, 1, 1], [0, 1, 2, 1],
                                   [0, 0, 1, 0], [0, 0, 0, 1]])
    b = (Fraction(1, 2), 0, Fraction(-1, 3), Fraction(1, 5))
    c = (Fraction(1, 4), Fraction(-1, 6), 0, Fraction(1, 2))
    omega = SiegelPoint(1j * np.eye(2))
    point = rand_point(chart, rng)
    frame = ThetaFrame(point, omega, 10)
    symbols = [rand_symbol(chart, rng, band=1, degree=1, terms=3)
               for _ in range(3)]
    pulled = [chart_transition_pullback(f, a, b, c) for f in symbols]
    new_frame = ThetaFrame(_transition_point(point, a, b, c, pulled[0].chart),
                           omega, 10)
    mats_a = [twisted_toeplitz_matrix(f, frame).entries for f in symbols]
    mats_b = [twisted_toeplitz_matrix(f, new_frame).entries for f in pulled]
    svals, p = _common_intertwiner(mats_a, mats_b)
    assert svals[-1] <= 1e-10
    assert svals[-2] > 1e-6
    p *= np.sqrt(frame.dim) / np.linalg.norm(p)
    assert np.linalg.norm(p @ p.conj().T - np.eye(frame.dim)) <= 1e-8
