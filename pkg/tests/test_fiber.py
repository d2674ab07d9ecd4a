"""Star product, Poisson bracket, and Dolbeault operator on fiber algebras."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusquant.errors import ChartMismatch
from torusquant.fiber import (
    BraneChart,
    DolbeaultForm,
    FourierPolynomial,
    chart_transition_pullback,
    dbar_linear_coordinate,
    dolbeault,
    graded_star,
    poisson_bracket,
    semiclassical_defect,
    star_product,
)
from torusquant.lattice import TwistedSymplectic, random_twisted_symplectic, standard_form
from torusquant.polynomials import BasePolynomial, PiPoly, QQi


def _rand_fourier(chart, rng, band=2, deg=2, exact=True, nmodes=4):
    modes = {}
    for _ in range(nmodes):
        m = tuple(int(v) for v in rng.integers(-band, band + 1, size=chart.dim))
        coeffs = {}
        for _ in range(3):
            exp = tuple(int(v) for v in rng.integers(0, deg + 1, size=chart.dim))
            if sum(exp) > deg:
                continue
            if exact:
                coeffs[exp] = QQi(
                    Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))),
                    Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))),
                )
            else:
                coeffs[exp] = complex(rng.normal(), rng.normal())
        p = BasePolynomial(chart.dim, coeffs)
        if not p.is_zero():
            modes[m] = p
    return FourierPolynomial(chart, modes)


def _gauge_chart():
    # gradient gauge: g = grad(x1^2 x2 / 2), so the mixed-partials constraint holds
    phi = BasePolynomial(2, {(2, 1): Fraction(1, 2)})
    return BraneChart((2,), [phi.diff(0), phi.diff(1)])


# ---------------------------------------------------------------------------
# star product
# ---------------------------------------------------------------------------

def test_star_single_modes_pick_up_skew_phase():
    ch = BraneChart((1,))
    f = FourierPolynomial.single_mode(ch, (1, 0))
    g = FourierPolynomial.single_mode(ch, (0, 1))
    for hb in (Fraction(1, 3), 0.7, 1):
        res = star_product(f, g, hb)
        assert set(res.modes) == {(1, 1)}
        val = complex(res.modes[(1, 1)].constant_term())
        assert abs(val - np.exp(-1j * np.pi * float(hb))) < 1e-15


def test_star_unit_and_associativity_exact():
    rng = np.random.default_rng(3)
    for hvec in [(1,), (2,), (1, 2)]:
        # quarter-turn phases need hbar in {L, L/2} for kappa denominators lcm L
        lcm = math.lcm(*hvec)
        ch = BraneChart(hvec)
        one = FourierPolynomial.unit(ch)
        for _ in range(4):
            a = _rand_fourier(ch, rng)
            b = _rand_fourier(ch, rng)
            c = _rand_fourier(ch, rng)
            assert star_product(one, a, Fraction(1, 2)) == a
            assert star_product(a, one, Fraction(1, 2)) == a
            for hb in (lcm, Fraction(lcm, 2)):
                lhs = star_product(star_product(a, b, hb), c, hb)
                rhs = star_product(a, star_product(b, c, hb), hb)
                assert lhs == rhs


def test_star_commutative_at_integer_phase():
    # hbar = 1 with unit periods: the skew phase is (-1)^{int}, symmetric
    rng = np.random.default_rng(4)
    ch = BraneChart((1, 1))
    for _ in range(5):
        a = _rand_fourier(ch, rng)
        b = _rand_fourier(ch, rng)
        assert star_product(a, b, 1) == star_product(b, a, 1)


def test_star_classical_limit_is_pointwise_product():
    rng = np.random.default_rng(5)
    ch = BraneChart((1,))
    for _ in range(5):
        a = _rand_fourier(ch, rng, exact=False)
        b = _rand_fourier(ch, rng, exact=False)
        assert semiclassical_defect(a, b, 0) < 1e-12


def test_star_is_local_over_the_base():
    # coefficients vanishing at a base point stay vanishing after star
    chg = _gauge_chart()
    rng = np.random.default_rng(6)
    x0 = np.array([0.5, -0.25])
    van = FourierPolynomial(chg, {
        (1, 0): BasePolynomial(2, {(1, 0): 1.0, (0, 0): -0.5}),
        (0, 2): BasePolynomial(2, {(0, 1): 2.0, (0, 0): 0.5}),
    })
    other = _rand_fourier(chg, rng, exact=False)
    prod = star_product(van, other, 0.3)
    assert all(abs(p.eval(x0)) < 1e-14 for p in prod.modes.values())


def test_star_rejects_mixed_charts():
    f = FourierPolynomial.unit(BraneChart((1,)))
    g = FourierPolynomial.unit(BraneChart((2,)))
    with pytest.raises(ChartMismatch):
        star_product(f, g, 1)


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------

def test_bracket_of_conjugate_single_modes():
    ch = BraneChart((1,))
    f = FourierPolynomial.single_mode(ch, (1, 0))
    g = FourierPolynomial.single_mode(ch, (0, 1))
    br = poisson_bracket(f, g)
    assert set(br.modes) == {(1, 1)}
    # coefficient is exactly -2*pi, held symbolically in the pi-graded ring
    assert br.modes[(1, 1)].constant_term() == PiPoly({1: QQi(-2)})
    assert abs(complex(br.modes[(1, 1)].constant_term()) + 2 * np.pi) < 1e-14


def test_bracket_antisymmetry_and_jacobi_exact():
    rng = np.random.default_rng(7)
    ch = BraneChart((1,))
    for _ in range(12):
        a = _rand_fourier(ch, rng, nmodes=3)
        b = _rand_fourier(ch, rng, nmodes=3)
        c = _rand_fourier(ch, rng, nmodes=3)
        assert (poisson_bracket(a, b) + poisson_bracket(b, a)).is_zero()
        j = poisson_bracket(a, poisson_bracket(b, c)) \
            + poisson_bracket(b, poisson_bracket(c, a)) \
            + poisson_bracket(c, poisson_bracket(a, b))
        assert j.is_zero()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=3),
       st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
       st.tuples(st.integers(-2, 2), st.integers(-2, 2)))
def test_bracket_is_a_derivation_of_the_product(ms, m1, m2):
    # {f, g*h} = {f, g}*h + g*{f, h} with the pointwise product, exactly
    ch = BraneChart((1,))
    f = FourierPolynomial(ch, {m: BasePolynomial.constant(2, QQi(1)) for m in ms})
    g = FourierPolynomial.single_mode(ch, m1)
    h = FourierPolynomial.single_mode(ch, m2)
    gh = star_product(g, h, 0)
    lhs = poisson_bracket(f, gh)
    rhs = star_product(poisson_bracket(f, g), h, 0) \
        + star_product(g, poisson_bracket(f, h), 0)
    assert lhs == rhs


def test_semiclassical_defect_halves_with_hbar():
    ch = BraneChart((1,))
    f = FourierPolynomial.single_mode(ch, (2, 1))
    g = FourierPolynomial.single_mode(ch, (1, -1))
    d = {hb: semiclassical_defect(f, g, hb) for hb in (0.2, 0.1, 0.05)}
    assert 0.4 <= d[0.1] / d[0.2] <= 0.6
    assert 0.4 <= d[0.05] / d[0.1] <= 0.6
    # commuting modes: the defect is numerically zero at every order
    fc = FourierPolynomial.single_mode(ch, (1, 0))
    gc = FourierPolynomial.single_mode(ch, (3, 0))
    assert semiclassical_defect(fc, gc, 0.1) < 1e-13


# ---------------------------------------------------------------------------
# Dolbeault operator
# ---------------------------------------------------------------------------

def _dbar_by_finite_differences(fp, a, x, u, step=1e-5):
    # evaluate the defining vector field (base derivative twisted by the gauge
    # Jacobian plus i times the inverse-period fiber derivative) numerically
    ch = fp.chart
    n = ch.n

    def val(xv, yv):
        uv = np.array(yv, dtype=float) + np.array(
            [complex(p.eval(xv)).real for p in ch.g])
        return fp.eval(xv, uv)

    gx = np.array([complex(p.eval(x)).real for p in ch.g])
    y = np.array(u) - gx

    def richardson(fn):
        d1 = (fn(step) - fn(-step)) / (2 * step)
        d2 = (fn(step / 2) - fn(-step / 2)) / step
        return (4 * d2 - d1) / 3

    ex = np.zeros(ch.dim)
    ex[a] = 1.0
    dfdx = richardson(lambda s: val(x + s * ex, y))
    dfdy = []
    for cidx in range(ch.dim):
        ey = np.zeros(ch.dim)
        ey[cidx] = 1.0
        dfdy.append(richardson(lambda s, e=ey: val(x, y + s * e)))
    hinv_row = np.zeros(ch.dim)
    if a < n:
        hinv_row[n + a] = 1.0 / ch.hvec[a]
    else:
        hinv_row[a - n] = -1.0 / ch.hvec[a - n]
    tot = dfdx
    for cidx in range(ch.dim):
        dg = complex(ch.g[cidx].diff(a).eval(x))
        tot -= (dg + 1j * hinv_row[cidx]) * dfdy[cidx]
    return 0.5 * tot


def test_dolbeault_matches_vector_field_oracle():
    chg = _gauge_chart()
    rng = np.random.default_rng(8)
    fp = _rand_fourier(chg, rng, exact=False, nmodes=3)
    db = dolbeault(fp)
    worst = 0.0
    for _ in range(6):
        x = rng.uniform(-1, 1, size=2)
        u = rng.uniform(0, 1, size=2)
        for a in range(2):
            comp = db.components.get((a,))
            lib = comp.map_coeffs(complex).eval(x, u) if comp is not None else 0j
            ora = _dbar_by_finite_differences(fp, a, x, u)
            worst = max(worst, abs(lib - ora))
    assert worst < 1e-8


def test_dolbeault_squares_to_zero_exactly():
    chg = _gauge_chart()
    rng = np.random.default_rng(9)
    for _ in range(10):
        fp = _rand_fourier(chg, rng, nmodes=3)
        assert dolbeault(dolbeault(fp)).is_zero()
        one_form = DolbeaultForm(chg, 1, {
            (0,): _rand_fourier(chg, rng, nmodes=2),
            (1,): _rand_fourier(chg, rng, nmodes=2),
        })
        assert dolbeault(dolbeault(one_form)).is_zero()


def test_dolbeault_kills_holomorphic_coordinates():
    # x_j - i h_j u^{n+j} and x_{n+j} + i h_j u^j are annihilated exactly,
    # for any polynomial gauge
    for hvec in [(1,), (2,), (1, 2)]:
        ch = BraneChart(hvec)
        n = len(hvec)
        dim = 2 * n
        for j in range(n):
            uc = [0] * dim
            uc[n + j] = QQi(0, -hvec[j])
            comps = dbar_linear_coordinate(ch, BasePolynomial.variable(dim, j), uc)
            assert all(p.is_zero() for p in comps)
            uc2 = [0] * dim
            uc2[j] = QQi(0, hvec[j])
            comps2 = dbar_linear_coordinate(
                ch, BasePolynomial.variable(dim, n + j), uc2)
            assert all(p.is_zero() for p in comps2)


def test_dolbeault_leibniz_exact():
    chg = _gauge_chart()
    rng = np.random.default_rng(10)
    for _ in range(6):
        f0 = _rand_fourier(chg, rng, nmodes=2)
        g0 = _rand_fourier(chg, rng, nmodes=2)
        alpha = DolbeaultForm(chg, 1, {(0,): f0})
        beta = DolbeaultForm(chg, 0, {(): g0})
        for hb in (2, 1):
            lhs = dolbeault(graded_star(alpha, beta, hb))
            rhs = graded_star(dolbeault(alpha), beta, hb) \
                + (-graded_star(alpha, dolbeault(beta), hb))
            assert lhs == rhs
            l0 = dolbeault(graded_star(beta, f0, hb))
            r0 = graded_star(dolbeault(beta), f0, hb) \
                + graded_star(beta, dolbeault(f0), hb)
            assert l0 == r0


def test_graded_star_anticommutes_one_forms():
    chg = _gauge_chart()
    rng = np.random.default_rng(12)
    f0 = _rand_fourier(chg, rng, nmodes=2)
    g0 = _rand_fourier(chg, rng, nmodes=2)
    alpha = DolbeaultForm(chg, 1, {(0,): f0})
    beta = DolbeaultForm(chg, 1, {(1,): g0})
    # at hbar 0 the scalar factors commute, so only the Koszul sign remains
    assert graded_star(alpha, beta, 0) == -graded_star(beta, alpha, 0)


# ---------------------------------------------------------------------------
# chart transitions
# ---------------------------------------------------------------------------

def test_transition_intertwines_star_exactly():
    rng = np.random.default_rng(13)
    for hvec in [(1,), (2,), (1, 2)]:
        lcm = math.lcm(*hvec)
        ch = BraneChart(hvec)
        dim = 2 * len(hvec)
        big = standard_form(hvec)
        for _ in range(4):
            mat = random_twisted_symplectic(hvec, rng, length=5)
            b = [Fraction(int(rng.integers(-2, 3)), 4) for _ in range(dim)]
            # pick c so the induced mode phases land on quarter turns
            d = [Fraction(int(rng.integers(-2, 3)), 4) for _ in range(dim)]
            ainv = mat.inverse().rows
            hd = [sum(Fraction(big[i][j]) * d[j] for j in range(dim))
                  for i in range(dim)]
            c = [sum(Fraction(ainv[i][j]) * hd[j] for j in range(dim))
                 for i in range(dim)]
            f = _rand_fourier(ch, rng, nmodes=3)
            g = _rand_fourier(ch, rng, nmodes=3)
            for hb in (lcm, Fraction(lcm, 2)):
                pf = chart_transition_pullback(f, mat, b, c)
                pg = chart_transition_pullback(g, mat, b, c)
                pfg = chart_transition_pullback(star_product(f, g, hb), mat, b, c)
                assert star_product(pf, pg, hb) == pfg


def test_identity_transition_is_identity():
    rng = np.random.default_rng(14)
    ch = BraneChart((1, 2))
    f = _rand_fourier(ch, rng)
    ident = TwistedSymplectic.identity((1, 2))
    assert chart_transition_pullback(f, ident, [0] * 4, [0] * 4) == f
