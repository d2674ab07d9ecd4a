"""Chart reduction, connection gluing, cocycle defects, example geometries."""

import json
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from torusquant.atlas import (
    BraneAtlas,
    RawBraneData,
    Transition,
    _kt_deck,
    builtin_example,
    cocycle_check,
    complex_coordinates,
    derive_transition,
    holomorphic_symplectic_form,
    kodaira_thurston_coframe,
    raw_connection,
    reassemble_connection,
    reduce_to_skew_smith,
    validate_chart,
)
from torusquant.errors import MissingOverlap, NotClosed, UnknownExample
from torusquant.fiber import BraneChart
from torusquant.lattice import IntSkewForm, SemiCharacter, TwistedSymplectic, int_inverse
from torusquant.polynomials import BasePolynomial

X1 = BasePolynomial.variable(2, 0)
X2 = BasePolynomial.variable(2, 1)
FORM1 = IntSkewForm([[0, -1], [1, 0]])
ZERO2 = [BasePolynomial.zero(2)] * 2


def normal_form_raw(h):
    """Raw data whose connection is already gauge-equivalent to the normal form."""
    form = IntSkewForm([[0, -h], [h, 0]])
    f = [X2 * Fraction(-1, h), X1 * Fraction(1, h)]
    return RawBraneData(f, ZERO2, form, SemiCharacter(form, (0, 0)))


def random_raw(n2, rng):
    """Reducible data with random skew form, linear gauge map, and potential."""
    while True:
        m = rng.integers(-3, 4, (n2, n2))
        h = (m - m.T).tolist()
        try:
            hinv = int_inverse(h)
            break
        except Exception:
            continue
    form = IntSkewForm(h)
    gmat = [[Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 4)))
             for _ in range(n2)] for _ in range(n2)]
    for i in range(n2):
        for j in range(i):
            gmat[i][j] = gmat[j][i]
    # F := -Hinv - G H G is skew for symmetric G, so f = F x + grad(potential)
    # and gtilde = H^T (G x + g0) satisfy the construction invariants.
    ghg = [[sum(gmat[i][a] * h[a][b] * gmat[b][j]
                for a in range(n2) for b in range(n2))
            for j in range(n2)] for i in range(n2)]
    pot = BasePolynomial.zero(n2)
    for _ in range(3):
        exp = tuple(int(v) for v in rng.integers(0, 3, n2))
        pot = pot + BasePolynomial(n2, {exp: Fraction(int(rng.integers(-3, 4)), 2)})
    f = [sum((BasePolynomial.variable(n2, j, -hinv[i][j] - ghg[i][j])
              for j in range(n2)), pot.diff(i)) for i in range(n2)]
    g = [sum((BasePolynomial.variable(n2, j, gmat[i][j]) for j in range(n2)),
             BasePolynomial.constant(n2, Fraction(int(rng.integers(-2, 3)), 2)))
         for i in range(n2)]
    gt = [sum((g[j] * h[j][i] for j in range(n2) if h[j][i]),
              BasePolynomial.zero(n2)) for i in range(n2)]
    gcheck = [Fraction(int(rng.integers(0, 4)), 4) for _ in range(n2)]
    return RawBraneData(f, gt, form, SemiCharacter(form, gcheck))


# ---------------------------------------------------------------------------
# reduction pipeline
# ---------------------------------------------------------------------------

def test_reduction_of_normal_form_data_is_trivial():
    raw = normal_form_raw(1)
    chart, log = reduce_to_skew_smith(raw)
    assert chart.hvec == (1,)
    assert chart.gcheck == (0, 0)
    assert all(p.is_zero() for p in chart.g)
    assert log[0] == ("coordinate", [[1, 0], [0, 1]])
    assert reassemble_connection(chart, log) == raw_connection(raw)


def test_reduction_keeps_level_and_invariant_factor():
    raw = normal_form_raw(2)
    chart, log = reduce_to_skew_smith(raw, k=3)
    assert chart.hvec == (2,) and chart.k == 3
    assert reassemble_connection(chart, log) == raw_connection(raw)


@pytest.mark.parametrize("seed,n2", [(0, 2), (1, 2), (2, 2), (3, 4), (4, 4), (5, 4)])
def test_reduction_round_trips_random_linear_data(seed, n2):
    rng = np.random.default_rng(100 + seed)
    raw = random_raw(n2, rng)
    chart, log = reduce_to_skew_smith(raw)
    assert validate_chart(chart)["pass"]
    # symbolic oracle: walking the log backwards must reproduce the raw
    # connection as an exact polynomial identity
    assert reassemble_connection(chart, log) == raw_connection(raw)


def test_raw_data_rejects_inverse_form_violation():
    with pytest.raises(ValueError):
        RawBraneData([X2 * -2, X1], ZERO2, FORM1, SemiCharacter(FORM1, (0, 0)))


def test_raw_data_rejects_asymmetric_gauge_jacobian():
    # gtilde = H^T (x_2, 0) has Jacobian [[0,1],[0,0]] after H^{-T}
    with pytest.raises(ValueError):
        RawBraneData([X2 * -1, X1], [BasePolynomial.zero(2), X2 * -1],
                     FORM1, SemiCharacter(FORM1, (0, 0)))


def test_validate_chart_reports_asymmetric_jacobian_pair():
    bad = SimpleNamespace(hvec=(1,), k=1,
                          g=(BasePolynomial.variable(2, 1), BasePolynomial.zero(2)))
    report = validate_chart(bad)
    assert not report["pass"]
    assert report["symmetric_jacobian"]["violations"] == [(0, 1)]
    assert validate_chart(BraneChart((1, 2), k=2))["pass"]


# ---------------------------------------------------------------------------
# complex coordinates and the symplectic normal form
# ---------------------------------------------------------------------------

def test_complex_coordinates_plain_chart():
    z = complex_coordinates(BraneChart((1,)))
    assert z[0] == (BasePolynomial.variable(4, 0), BasePolynomial.variable(4, 3, -1))
    assert z[1] == (BasePolynomial.variable(4, 1), BasePolynomial.variable(4, 2))


def test_symplectic_normal_form_plain_and_h2():
    assert holomorphic_symplectic_form(BraneChart((1,)))[0][1] == 1
    assert holomorphic_symplectic_form(BraneChart((2,)))[0][1] == Fraction(1, 2)


def test_symplectic_normal_form_with_linear_gauge():
    g = [BasePolynomial.variable(2, 1), BasePolynomial.variable(2, 0)]
    assert holomorphic_symplectic_form(BraneChart((1,), g=g))[0][1] == 1
    rng = np.random.default_rng(6)
    gmat = [[Fraction(int(rng.integers(-2, 3)), 2) for _ in range(4)]
            for _ in range(4)]
    for i in range(4):
        for j in range(i):
            gmat[i][j] = gmat[j][i]
    g4 = [sum((BasePolynomial.variable(4, j, gmat[i][j]) for j in range(4)),
              BasePolynomial.zero(4)) for i in range(4)]
    coeffs = holomorphic_symplectic_form(BraneChart((1, 2), g=g4, k=2))
    assert coeffs[0][2] == 1 and coeffs[1][3] == Fraction(1, 2)
    assert coeffs[0][1] == 0 and coeffs[2][3] == 0


# ---------------------------------------------------------------------------
# transitions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", [1, 2])
def test_deck_transition_group_law(a):
    for d, e in [((1, 0), (0, 1)), ((1, -1), (-1, 1)), ((2, 1), (1, 2))]:
        td, te = _kt_deck(a, d), _kt_deck(a, e)
        comp = td.compose(te)
        tot = _kt_deck(a, (d[0] + e[0], d[1] + e[1]))
        assert comp.a == tot.a and comp.b == tot.b and comp.c == tot.c
        # gauge exponents may disagree by a whole number of turns only
        diff = comp.gauge_exponent - tot.gauge_exponent
        assert diff.degree() == 0
        assert Fraction(diff.constant_term()).denominator == 1


def test_transition_inverse_loop_is_exactly_trivial():
    t = _kt_deck(2, (1, -1))
    loop = t.inverse().compose(t)
    assert loop.a == TwistedSymplectic.identity((1,))
    assert all(v == 0 for v in loop.b + loop.c)
    assert loop.gauge_exponent.is_zero()


def test_derive_transition_constant_gauge_shift():
    src = BraneChart((1,))
    tgt = BraneChart((1,), g=[BasePolynomial.constant(2, Fraction(1, 3)),
                              BasePolynomial.constant(2, Fraction(1, 5))])
    t = derive_transition(src, tgt, TwistedSymplectic.identity((1,)))
    assert t.gauge_exponent == BasePolynomial.variable(4, 2, Fraction(1, 5))
    assert t.c == (Fraction(-1, 5), Fraction(1, 3))
    assert t.connection_defect(src, tgt).is_zero()


def test_derive_transition_incompatible_charts():
    twisted = BraneChart((1,), g=[BasePolynomial.variable(2, 1),
                                  BasePolynomial.variable(2, 0)])
    with pytest.raises(NotClosed):
        derive_transition(BraneChart((1,)), twisted,
                          TwistedSymplectic.identity((1,)))


def test_atlas_rejects_non_gluing_transition():
    bad = Transition(TwistedSymplectic.identity((1,)),
                     gauge_exponent=BasePolynomial.variable(4, 0))
    with pytest.raises(ValueError):
        BraneAtlas([BraneChart((1,))] * 2, {(0, 1): bad})


def test_atlas_rejects_inconsistent_imaginary_shift():
    shear = TwistedSymplectic((2,), [[1, 1], [0, 1]])
    psi = BasePolynomial(4, {(0, 2, 0, 0): Fraction(1, 4),
                             (0, 0, 2, 0): Fraction(-1)})
    with pytest.raises(ValueError):
        BraneAtlas([BraneChart((2,))] * 3,
                   {(2, 0): Transition(shear, c=(1, 0), gauge_exponent=psi)})


# ---------------------------------------------------------------------------
# atlases and cocycles
# ---------------------------------------------------------------------------

def test_two_chart_inverse_atlas_has_zero_defect():
    rng = np.random.default_rng(7)
    t = builtin_example("ooguri_vafa").transitions[(2, 0)]
    atlas = BraneAtlas([BraneChart((2,)), BraneChart((2,))], {(0, 1): t},
                       overlap_samples={(0, 1): rng.uniform(-1, 1, (20, 4))})
    assert cocycle_check(atlas) == 0.0
    assert (1, 0) in atlas.transitions and (1, 0) in atlas.overlap_samples


def test_missing_overlap_raises():
    pts = np.zeros((3, 4))
    atlas = BraneAtlas([BraneChart((1,))] * 3,
                       {(0, 1): Transition.identity((1,)),
                        (1, 2): Transition.identity((1,))},
                       triple_samples={(0, 1, 2): pts})
    with pytest.raises(MissingOverlap):
        cocycle_check(atlas)


def test_unknown_example_name():
    with pytest.raises(UnknownExample):
        builtin_example("klein_bottle")


def test_cylinder_example():
    atlas = builtin_example("cylinder2")
    assert atlas.invariant_factors == (1,)
    assert len(atlas.charts) == 1
    assert cocycle_check(atlas) == 0.0
    assert validate_chart(atlas.charts[0])["pass"]


@pytest.mark.parametrize("a", [0, 1, 2])
def test_kodaira_thurston_example(a):
    atlas = builtin_example("kodaira_thurston", a)
    assert atlas.invariant_factors == (1,)
    assert len(atlas.charts) == 9
    assert all(validate_chart(c)["pass"] for c in atlas.charts)
    assert cocycle_check(atlas) <= 1e-12


@pytest.mark.parametrize("a", [0, 1, 2])
def test_kodaira_thurston_coframe(a):
    a1, a2, a3, a4 = kodaira_thurston_coframe(a)
    assert a1.d().is_zero() and a2.d().is_zero() and a4.d().is_zero()
    assert a3.d() == a1.wedge(a4) * (2 * a)


def test_ooguri_vafa_example():
    atlas = builtin_example("ooguri_vafa")
    assert atlas.invariant_factors == (2,)
    assert len(atlas.charts) == 3
    assert all(validate_chart(c)["pass"] for c in atlas.charts)
    assert cocycle_check(atlas) <= 1e-12
    assert atlas.transitions[(2, 0)].a.rows == ((1, 1), (0, 1))
    assert atlas.transitions[(0, 1)].a == TwistedSymplectic.identity((2,))


def test_ooguri_vafa_transition_recovered_from_connections():
    atlas = builtin_example("ooguri_vafa")
    shear = TwistedSymplectic((2,), [[1, 1], [0, 1]])
    derived = derive_transition(atlas.charts[0], atlas.charts[2], shear)
    assert derived.gauge_exponent == atlas.transitions[(2, 0)].gauge_exponent
    assert all(v == 0 for v in derived.c)


def test_atlas_json_is_serializable():
    for name, a in [("cylinder2", 0), ("kodaira_thurston", 1), ("ooguri_vafa", 0)]:
        blob = builtin_example(name, a).to_json()
        decoded = json.loads(json.dumps(blob, sort_keys=True))
        assert decoded["name"] == name
        assert len(decoded["charts"]) == len(blob["charts"])
    kt = builtin_example("kodaira_thurston", 2)
    assert len(kt.to_json()["transitions"]) == 72
