"""Named verification suites behind the ``verify`` subcommand.

Each suite redraws seeded random data, reruns a battery of identity checks,
and returns a tree of verification records.  The suites are quick smoke
checks for an installed copy of the library; the test suite is wider and
stricter.  Identical (seed, config) inputs always produce identical trees.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .atlas import builtin_example, cocycle_check, kodaira_thurston_coframe, \
    validate_chart
from .errors import UnknownSelector
from .fiber import BraneChart, DolbeaultForm, FourierPolynomial, dolbeault, \
    graded_star, semiclassical_defect, star_product
from .lattice import SiegelPoint, frame_transport_check, random_siegel_point, \
    random_twisted_symplectic, siegel_action
from .mirror import mirror_homomorphism_check, toeplitz_quadrature_oracle, \
    twisted_toeplitz_matrix
from .polynomials import BasePolynomial, QQi
from .serialization import make_report
from .theta import FiberPoint, MirrorSectionRep, QuantumState, ThetaFrame, \
    bks_transform, pairing_lattice_sum, pairing_quadrature, \
    profile_to_series_data, weil_brezin_expand

SUITE_NAMES = ("mirror", "theta", "bks", "dga", "atlas", "siegel")

__all__ = ["SUITE_NAMES", "run_suite"]


# ---------------------------------------------------------------------------
# shared random data
# ---------------------------------------------------------------------------

def _rand_symbol(chart, rng, band=2, degree=1, terms=4, exact=False):
    n2 = chart.dim
    modes = {}
    for _ in range(terms):
        m = tuple(int(v) for v in rng.integers(-band, band + 1, n2))
        coeffs = {}
        for _ in range(3):
            exp = tuple(int(v) for v in rng.integers(0, degree + 1, n2))
            if sum(exp) > degree:
                continue
            if exact:
                coeffs[exp] = QQi(Fraction(int(rng.integers(-3, 4)), 2),
                                  Fraction(int(rng.integers(-3, 4)), 2))
            else:
                coeffs[exp] = complex(rng.normal(), rng.normal())
        p = BasePolynomial(n2, coeffs)
        if not p.is_zero():
            modes[m] = p
    return FourierPolynomial(chart, modes)


def _rand_point(chart, rng):
    n2 = chart.dim
    return FiberPoint(chart, rng.uniform(-0.5, 0.5, n2), rng.uniform(-0.5, 0.5, n2))


def _gauge_chart(h, k):
    # gradient gauge grad(x1^2 x2 / 2) keeps the Jacobian symmetric
    g = (BasePolynomial(2, {(1, 1): Fraction(1)}),
         BasePolynomial(2, {(2, 0): Fraction(1, 2)}))
    return BraneChart((h,), g=g, gcheck=(Fraction(1, 4), Fraction(1, 3)), k=k)


def _tol(default, override):
    return default if override is None else float(override)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _suite_mirror(seed, tol, grid, trunc):
    rng = np.random.default_rng(seed)
    chart = BraneChart((1,), k=2)
    checks = []

    pts = [_rand_point(chart, rng) for _ in range(3)]
    worst = 0.0
    for _ in range(10):
        f = _rand_symbol(chart, rng, band=2, degree=1)
        g = _rand_symbol(chart, rng, band=2, degree=1)
        worst = max(worst, mirror_homomorphism_check(f, g, pts, trunc))
    checks.append(make_report(
        "star-product-to-matrix-homomorphism",
        {"n": 1, "k": 2, "h": 1, "pairs": 10, "band": 2, "points": 3},
        worst, _tol(1e-10, tol)))

    frame = ThetaFrame(pts[0], SiegelPoint(1j * np.eye(1)), trunc)
    unit = twisted_toeplitz_matrix(FourierPolynomial.unit(chart), frame)
    checks.append(make_report(
        "unit-symbol-gives-identity-matrix", {"n": 1, "k": 2, "h": 1},
        float(np.max(np.abs(unit.entries - np.eye(frame.dim)))), 0.0))

    worst = 0.0
    for _ in range(2):
        f = _rand_symbol(chart, rng, band=2, degree=0)
        closed = twisted_toeplitz_matrix(f, frame).entries
        quad = toeplitz_quadrature_oracle(f, frame, grid).entries
        worst = max(worst, float(np.max(np.abs(closed - quad))))
    checks.append(make_report(
        "closed-form-matches-quadrature", {"grid": grid, "symbols": 2},
        worst, _tol(1e-6, tol)))
    return checks


def _suite_theta(seed, tol, grid, trunc):
    rng = np.random.default_rng(seed)
    checks = []
    for k, h in ((1, 2), (2, 1)):
        chart = _gauge_chart(h, k)
        pt = _rand_point(chart, rng)
        frame = ThetaFrame(pt, SiegelPoint(1j), trunc)
        framep = ThetaFrame(pt, SiegelPoint(0.4 + 0.8j), trunc)
        for label, other in (("same", frame), ("crossed", framep)):
            gram = np.array([
                [pairing_quadrature(frame.sampler(l), other.sampler(lp),
                                    frame.omega, other.omega, grid)
                 for lp in other.index_set]
                for l in frame.index_set])
            checks.append(make_report(
                f"gram-matrix-identity-{label}-parameter",
                {"k": k, "h": h, "grid": grid},
                float(np.max(np.abs(gram - np.eye(frame.dim)))),
                _tol(1e-6, tol)))
    return checks


def _suite_bks(seed, tol, grid, trunc):
    rng = np.random.default_rng(seed)
    chart = _gauge_chart(2, 2)
    pt = _rand_point(chart, rng)
    frame = ThetaFrame(pt, SiegelPoint(1j), trunc)
    state = QuantumState(frame, rng.normal(size=frame.dim)
                         + 1j * rng.normal(size=frame.dim))
    om1, om2 = SiegelPoint(0.5 + 2j), SiegelPoint(-0.3 + 0.6j)
    via = bks_transform(bks_transform(state, om1), om2)
    direct = bks_transform(state, om2)
    checks = [make_report(
        "parallel-transport-composes-exactly", {"k": 2, "h": 2},
        float(np.max(np.abs(via.coeffs - direct.coeffs))), 0.0)]
    checks.append(make_report(
        "transport-preserves-norm", {"k": 2, "h": 2},
        abs(via.norm() - state.norm()), _tol(1e-12, tol)))

    def rand_prof():
        return MirrorSectionRep.gaussian(
            1, 2,
            beta=(complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.15, 0.15)),),
            center=(rng.uniform(-0.5, 0.5),),
            bpoly=BasePolynomial(1, {(0,): complex(rng.normal(), rng.normal())}))

    framep = ThetaFrame(pt, SiegelPoint(0.1 + 1.1j), 8)
    frame8 = ThetaFrame(pt, SiegelPoint(1j), 8)
    da = profile_to_series_data(rand_prof(), frame8)
    db = profile_to_series_data(rand_prof(), framep)
    closed = pairing_lattice_sum(da, db, frame8, framep)
    quad = pairing_quadrature(weil_brezin_expand(da, frame8),
                              weil_brezin_expand(db, framep),
                              frame8.omega, framep.omega, grid)
    checks.append(make_report(
        "pairing-lattice-sum-matches-quadrature", {"grid": grid},
        abs(closed - quad), _tol(1e-6, tol)))

    f = _rand_symbol(chart, rng, band=2, degree=2)
    mats = [toeplitz_quadrature_oracle(f, fr, 256).entries
            for fr in (frame, ThetaFrame(pt, SiegelPoint(0.3 + 0.7j), trunc))]
    checks.append(make_report(
        "matrix-independent-of-siegel-parameter", {"k": 2, "h": 2, "grid": 256},
        float(np.max(np.abs(mats[0] - mats[1]))), _tol(1e-8, tol)))
    return checks


def _suite_dga(seed, tol, grid, trunc):
    rng = np.random.default_rng(seed)
    chart = BraneChart((2,))
    checks = []

    worst = 0.0
    one = FourierPolynomial.unit(chart)
    for _ in range(3):
        a = _rand_symbol(chart, rng, exact=True)
        b = _rand_symbol(chart, rng, exact=True)
        c = _rand_symbol(chart, rng, exact=True)
        for hb in (2, 1):
            lhs = star_product(star_product(a, b, hb), c, hb)
            rhs = star_product(a, star_product(b, c, hb), hb)
            if lhs != rhs:
                worst = 1.0
        if star_product(one, a, Fraction(1, 2)) != a or \
                star_product(a, one, Fraction(1, 2)) != a:
            worst = 1.0
    checks.append(make_report(
        "star-associativity-and-unit-exact", {"h": 2, "triples": 3}, worst, 0.0))

    chg = _gauge_chart(2, 1)
    worst = 0.0
    for _ in range(3):
        f0 = _rand_symbol(chg, rng, exact=True, terms=2)
        g0 = _rand_symbol(chg, rng, exact=True, terms=2)
        alpha = DolbeaultForm(chg, 1, {(0,): f0})
        beta = DolbeaultForm(chg, 0, {(): g0})
        for hb in (2, 1):
            lhs = dolbeault(graded_star(alpha, beta, hb))
            rhs = graded_star(dolbeault(alpha), beta, hb) \
                + (-graded_star(alpha, dolbeault(beta), hb))
            if lhs != rhs:
                worst = 1.0
    checks.append(make_report(
        "dolbeault-leibniz-exact", {"h": 2, "pairs": 3}, worst, 0.0))

    # single-mode pairs in the leading-order window: the halving claim
    # degrades once the skew phase pi*hbar*kappa leaves the series regime
    ch1 = BraneChart((1,))
    worst = 0.0
    done = 0
    while done < 5:
        m1 = tuple(int(v) for v in rng.integers(-2, 3, 2))
        m2 = tuple(int(v) for v in rng.integers(-2, 3, 2))
        kappa = ch1.kappa(m1, m2)
        if not 1 <= abs(kappa) <= 3:
            continue
        f = FourierPolynomial.single_mode(ch1, m1, complex(rng.normal(), rng.normal()))
        g = FourierPolynomial.single_mode(ch1, m2, complex(rng.normal(), rng.normal()))
        d = {hb: semiclassical_defect(f, g, hb) for hb in (0.2, 0.1, 0.05)}
        for a, b in ((0.1, 0.2), (0.05, 0.1)):
            worst = max(worst, abs(d[a] / d[b] - 0.5))
        done += 1
    checks.append(make_report(
        "semiclassical-defect-halves", {"pairs": 5, "hbar": [0.2, 0.1, 0.05]},
        worst, _tol(0.1, tol)))
    return checks


def _suite_atlas(seed, tol, grid, trunc):
    checks = []
    expected_factors = {"cylinder2": (1,), "kodaira_thurston": (1,),
                        "ooguri_vafa": (2,)}
    for name in ("cylinder2", "kodaira_thurston", "ooguri_vafa"):
        atlas = builtin_example(name)
        bad = sum(0 if validate_chart(c)["pass"] else 1 for c in atlas.charts)
        checks.append(make_report(
            f"charts-validate-{name}", {"charts": len(atlas.charts)},
            float(bad), 0.0))
        checks.append(make_report(
            f"invariant-factors-{name}", {"expected": list(expected_factors[name])},
            0.0 if atlas.invariant_factors == expected_factors[name] else 1.0,
            0.0))
        checks.append(make_report(
            f"cocycle-defect-{name}", {"overlaps": len(atlas.transitions)},
            cocycle_check(atlas), _tol(1e-12, tol)))

    worst = 0.0
    for a in (0, 1, 2):
        a1, _, a3, a4 = kodaira_thurston_coframe(a)
        if a3.d() != a1.wedge(a4) * (2 * a) or not a1.d().is_zero():
            worst = 1.0
    checks.append(make_report(
        "nilmanifold-coframe-structure-equation", {"a": [0, 1, 2]}, worst, 0.0))
    return checks


def _suite_siegel(seed, tol, grid, trunc, trials=100):
    rng = np.random.default_rng(seed)
    hvecs = ((1,), (2,), (1, 2))
    worst = 0.0
    for t in range(trials):
        hvec = hvecs[t % len(hvecs)]
        a = random_twisted_symplectic(hvec, rng)
        om = random_siegel_point(len(hvec), rng)
        y = rng.normal(size=2 * len(hvec))
        worst = max(worst, frame_transport_check(a, om, y))
    checks = [make_report(
        "holomorphic-frame-transport", {"trials": trials, "hvec": [list(h) for h in hvecs]},
        worst, _tol(1e-12, tol))]

    worst = 0.0
    for t in range(20):
        hvec = hvecs[t % len(hvecs)]
        a = random_twisted_symplectic(hvec, rng)
        b = random_twisted_symplectic(hvec, rng)
        om = random_siegel_point(len(hvec), rng)
        lhs = siegel_action(a @ b, om).omega
        rhs = siegel_action(a, siegel_action(b, om)).omega
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    checks.append(make_report(
        "moebius-action-group-law", {"trials": 20}, worst, _tol(1e-10, tol)))
    return checks


_SUITES = {
    "mirror": _suite_mirror,
    "theta": _suite_theta,
    "bks": _suite_bks,
    "dga": _suite_dga,
    "atlas": _suite_atlas,
    "siegel": _suite_siegel,
}


def run_suite(name, seed=42, tol=None, grid=128, trunc=10) -> dict:
    """Run one named suite (or ``all``) and return its report tree.

    ``tol`` overrides the default tolerance of the inexact checks; checks
    asserting exact identities keep tolerance zero.
    """
    names = SUITE_NAMES if name == "all" else (name,)
    for item in names:
        if item not in _SUITES:
            raise UnknownSelector(
                f"unknown suite {item!r}; choose from {', '.join(SUITE_NAMES)} or all")
    checks = []
    for item in names:
        for record in _SUITES[item](seed, tol, grid, trunc):
            record["suite"] = item
            checks.append(record)
    return {
        "suite": name,
        "config": {"seed": seed, "tol": tol, "grid": grid, "trunc": trunc},
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
