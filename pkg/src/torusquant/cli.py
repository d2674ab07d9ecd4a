"""Batch command line driver.

Every computation reads and writes the JSON wire formats from
:mod:`torusquant.serialization`; all randomness flows from one seeded
generator, so identical (seed, config) invocations produce byte-identical
output.  Data subcommands print bare payloads; check subcommands print a
one-line result per check (or the full report tree under ``--json``), embed
the library version plus the full configuration, and set the exit code.

Exit codes: 0 success, 1 failed check, 2 malformed input, 3 mismatched
charts or frames, 4 unknown suite or example name.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .atlas import builtin_example, cocycle_check
from .errors import ChartMismatch, FormatError, PointMismatch, \
    TorusQuantError, UnknownExample, UnknownSelector
from .fiber import dolbeault, poisson_bracket, star_product
from .lattice import IntSkewForm, siegel_action, skew_smith_normal_form
from .mirror import mirror_homomorphism_check, reconstruct_symbol, \
    toeplitz_quadrature_oracle, twisted_toeplitz_matrix
from .serialization import canonical_json, dolbeault_to_json, \
    endomatrix_from_json, fourier_from_json, fourier_to_json, frame_from_json, \
    make_report, matrix_from_json, matrix_to_json, siegel_from_json, \
    siegel_to_json, symplectic_from_json
from .theta import FiberPoint
from .verify import SUITE_NAMES, run_suite

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_MISMATCH, EXIT_UNKNOWN = 0, 1, 2, 3, 4


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _load(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_lines(report):
    lines = []
    for rec in report["checks"]:
        word = "PASS" if rec["pass"] else "FAIL"
        lines.append(f"{word} {rec['test']} residual={rec['residual']:.3e}"
                     f" tolerance={rec['tolerance']:.3e}")
    done = sum(1 for rec in report["checks"] if rec["pass"])
    lines.append(f"{done}/{len(report['checks'])} checks passed")
    return "\n".join(lines) + "\n"


def _emit_report(args, report):
    _emit(args, canonical_json(report) if args.json else _check_lines(report))
    return EXIT_OK if report["pass"] else EXIT_CHECK


def _report_tree(command, config, checks):
    return {
        "version": __version__,
        "command": command,
        "config": config,
        "checks": checks,
        "pass": all(rec["pass"] for rec in checks),
    }


def _parse_hbar(text, chart):
    if text is None:
        return Fraction(1, chart.k)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad hbar value {text!r}") from exc


def _sample_points(chart, rng, count):
    n2 = chart.dim
    return [FiberPoint(chart, rng.uniform(-0.5, 0.5, n2),
                       rng.uniform(-0.5, 0.5, n2)) for _ in range(count)]


# ---------------------------------------------------------------------------
# data subcommands
# ---------------------------------------------------------------------------

def _cmd_star(args):
    f = fourier_from_json(_load(args.f))
    g = fourier_from_json(_load(args.g))
    hbar = _parse_hbar(args.hbar, f.chart)
    _emit(args, canonical_json(fourier_to_json(star_product(f, g, hbar))))
    return EXIT_OK


def _cmd_bracket(args):
    f = fourier_from_json(_load(args.f))
    g = fourier_from_json(_load(args.g))
    _emit(args, canonical_json(fourier_to_json(poisson_bracket(f, g))))
    return EXIT_OK


def _cmd_dolbeault(args):
    f = fourier_from_json(_load(args.f))
    _emit(args, canonical_json(dolbeault_to_json(dolbeault(f))))
    return EXIT_OK


def _cmd_toeplitz(args):
    f = fourier_from_json(_load(args.f))
    frame = frame_from_json(_load(args.frame))
    if args.quadrature:
        grid = args.grid if args.grid else 256
        mat = toeplitz_quadrature_oracle(f, frame, grid)
    else:
        mat = twisted_toeplitz_matrix(f, frame)
    _emit(args, canonical_json(mat.to_json()))
    return EXIT_OK


def _cmd_reconstruct(args):
    data = _load(args.samples)
    if not isinstance(data, dict) or "matrices" not in data:
        raise FormatError("payload must carry a 'matrices' list")
    matrices = [endomatrix_from_json(entry) for entry in data["matrices"]]
    band = data.get("band")
    if args.band is not None:
        band = json.loads(args.band)
    if band is not None:
        band = [tuple(int(v) for v in m) for m in band]
    symbol = reconstruct_symbol(matrices, band)
    _emit(args, canonical_json(fourier_to_json(symbol)))
    return EXIT_OK


def _cmd_skew_smith(args):
    form = IntSkewForm(matrix_from_json(_load(args.form)))
    hvec, a = skew_smith_normal_form(form)
    tree = {"factors": list(hvec), "transform": matrix_to_json(a)}
    _emit(args, canonical_json(tree))
    return EXIT_OK


def _cmd_siegel_act(args):
    mat = symplectic_from_json(_load(args.matrix))
    point = siegel_from_json(_load(args.omega))
    _emit(args, canonical_json(siegel_to_json(siegel_action(mat, point))))
    return EXIT_OK


# ---------------------------------------------------------------------------
# check subcommands
# ---------------------------------------------------------------------------

def _cmd_mirror_check(args):
    f = fourier_from_json(_load(args.f))
    g = fourier_from_json(_load(args.g))
    rng = np.random.default_rng(args.seed)
    points = _sample_points(f.chart, rng, args.samples)
    tol = args.tol if args.tol is not None else 1e-10
    residual = mirror_homomorphism_check(f, g, points, args.trunc)
    record = make_report(
        "star-product-to-matrix-homomorphism",
        {"samples": args.samples, "band": max(f.band, g.band),
         "k": f.chart.k, "hvec": list(f.chart.hvec)},
        residual, tol)
    config = {"seed": args.seed, "tol": tol, "trunc": args.trunc,
              "samples": args.samples}
    return _emit_report(args, _report_tree("mirror-check", config, [record]))


def _cmd_example(args):
    name = args.name.replace("-", "_")
    atlas = builtin_example(name, args.a)
    if not args.verify_cocycle:
        _emit(args, canonical_json(atlas.to_json()))
        return EXIT_OK
    tol = args.tol if args.tol is not None else 1e-12
    record = make_report(
        f"cocycle-defect-{name}",
        {"charts": len(atlas.charts), "overlaps": len(atlas.transitions),
         "a": args.a},
        cocycle_check(atlas), tol)
    config = {"name": name, "a": args.a, "tol": tol}
    return _emit_report(args, _report_tree("example", config, [record]))


def _cmd_verify(args):
    grid = args.grid if args.grid else 128
    tree = run_suite(args.suite, seed=args.seed, tol=args.tol,
                     grid=grid, trunc=args.trunc)
    config = dict(tree["config"], suite=args.suite)
    report = _report_tree("verify", config, tree["checks"])
    return _emit_report(args, report)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="torusquant",
        description="Quantum-torus star products, theta frames, and twisted "
                    "Toeplitz transforms over torus fibrations.")
    parser.add_argument("--version", action="version",
                        version=f"torusquant {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--seed", type=int, default=42,
                       help="random generator seed (default 42)")
        p.add_argument("--tol", type=float, default=None,
                       help="override the default check tolerance")
        p.add_argument("--grid", type=int, default=None,
                       help="quadrature points per axis")
        p.add_argument("--trunc", type=int, default=10,
                       help="lattice series truncation radius (default 10)")
        p.add_argument("--out", default=None, help="write output to this file")
        p.add_argument("--json", action="store_true",
                       help="emit the full JSON report for check commands")
        return p

    p = add("star", _cmd_star, "star product of two symbol files")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--hbar", default=None,
                   help="deformation parameter as a fraction (default 1/k)")

    p = add("bracket", _cmd_bracket, "Poisson bracket of two symbol files")
    p.add_argument("f")
    p.add_argument("g")

    p = add("dolbeault", _cmd_dolbeault, "antiholomorphic differential of a symbol")
    p.add_argument("f")

    p = add("toeplitz", _cmd_toeplitz, "matrix of a symbol in a theta frame")
    p.add_argument("f")
    p.add_argument("frame")
    p.add_argument("--quadrature", action="store_true",
                   help="use the quadrature oracle instead of the closed form")

    p = add("mirror-check", _cmd_mirror_check,
            "multiplicativity of the transform at random fiber points")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--samples", type=int, default=5,
                   help="number of random fiber points (default 5)")

    p = add("reconstruct", _cmd_reconstruct,
            "recover a band-limited symbol from sampled matrices")
    p.add_argument("samples", help="JSON file with 'matrices' and 'band'")
    p.add_argument("--band", default=None,
                   help="override the mode band, e.g. '[[1,0],[-1,0]]'")

    p = add("skew-smith", _cmd_skew_smith,
            "invariant factors and congruence witness of an integer skew form")
    p.add_argument("form")

    p = add("siegel-act", _cmd_siegel_act,
            "fractional-linear action on a Siegel parameter")
    p.add_argument("matrix")
    p.add_argument("omega")

    p = add("example", _cmd_example, "emit a built-in atlas or check its gluing")
    p.add_argument("name")
    p.add_argument("--a", type=int, default=0,
                   help="shear parameter for the nilmanifold example")
    p.add_argument("--verify-cocycle", action="store_true",
                   help="run the cocycle check instead of dumping the atlas")

    p = add("verify", _cmd_verify, "run a named verification suite")
    p.add_argument("suite", help=f"one of {', '.join(SUITE_NAMES)}, or all")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        return args.handler(args)
    except (ChartMismatch, PointMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UnknownExample, UnknownSelector) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (FormatError, TorusQuantError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
