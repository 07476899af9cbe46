"""Command-line entry point: ``gtcorners <subcommand> ...``.

Exit codes: 0 success, 1 invalid input, 2 numerical or resource failure,
3 a verification suite failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from gtcorners.density import CornerDensity, gt_volume, hciz
from gtcorners.discrete import count_schemes, relative_dimension, scaling_limit_compare
from gtcorners.errors import ConditioningError, RangeError, ResourceError
from gtcorners.matrixmodel import sample_corner_spectra, sample_patterns
from gtcorners.splines import fundamental_spline, spline_tail_integrals
from gtcorners.verify import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "GTCORNERS_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt(v: float) -> str:
    # shortest repr that round-trips (never more than 17 significant digits)
    return repr(float(v))


def load_json(text: str):
    """Inline JSON, or the contents of a file if ``text`` names one."""
    path = Path(text)
    try:
        if path.is_file():
            text = path.read_text()
    except OSError:
        pass
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"cannot parse JSON {text!r}: {exc}") from None


def parse_bound(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return float("inf")
    if t in ("-inf", "-infinity"):
        return float("-inf")
    return float(t)


def parse_complex_list(data) -> np.ndarray:
    out = []
    for v in data:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, str):
            out.append(complex(v.replace(" ", "")))
        elif isinstance(v, (int, float)):
            out.append(complex(v))
        else:
            raise ValueError(f"cannot read {v!r} as a complex number")
    return np.array(out, dtype=complex)


def parse_grid(spec: str, k: int) -> list[np.ndarray]:
    """``min:max:steps`` per coordinate, comma separated; a single spec is reused for all."""
    parts = [p for p in spec.split(",") if p.strip()]
    if len(parts) == 1:
        parts = parts * k
    if len(parts) != k:
        raise ValueError(f"grid needs 1 or {k} axis specs, got {len(parts)}")
    axes = []
    for p in parts:
        fields = p.split(":")
        if len(fields) != 3:
            raise ValueError(f"axis spec {p!r} is not min:max:steps")
        lo, hi, steps = float(fields[0]), float(fields[1]), int(fields[2])
        if steps < 1 or hi < lo:
            raise ValueError(f"bad axis spec {p!r}")
        axes.append(np.linspace(lo, hi, steps))
    return axes


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _threads(args) -> int:
    if getattr(args, "deterministic", False):
        return 1
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


# --------------------------------------------------------------- handlers


def cmd_spline(args) -> int:
    knots = load_json(args.knots)
    if args.action == "eval":
        value = fundamental_spline(float(args.at), knots)
    else:
        value = spline_tail_integrals(parse_bound(args.lo), parse_bound(args.hi), knots)
    print(json.dumps({"value": value}))
    return EXIT_OK


def cmd_density(args) -> int:
    d = CornerDensity(load_json(args.x), args.k)
    if args.action == "eval":
        print(fmt(d(load_json(args.at))))
        return EXIT_OK
    axes = parse_grid(args.grid, d.k)
    pts = np.array(list(product(*axes)))
    ordered = np.all(np.diff(pts, axis=1) >= 0, axis=1)
    vals = np.zeros(len(pts))
    if ordered.any():
        vals[ordered] = d(pts[ordered])
    fh, close = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"a{j + 1}" for j in range(d.k)] + ["density"])
        for p, v in zip(pts, vals):
            w.writerow([fmt(c) for c in p] + [fmt(v)])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_volume(args) -> int:
    print(fmt(gt_volume(load_json(args.x))))
    return EXIT_OK


def cmd_hciz(args) -> int:
    value = hciz(load_json(args.x), parse_complex_list(load_json(args.z)))
    print(json.dumps({"re": value.real, "im": value.imag}))
    return EXIT_OK


def cmd_sample(args) -> int:
    x = load_json(args.x)
    threads = _threads(args)
    fh, close = _open_out(args.out)
    try:
        if args.mode == "pattern":
            rows = sample_patterns(x, args.n, args.seed, threads=threads)
            for s in range(args.n):
                pattern = [[float(v) for v in rows[k - 1][s]] for k in range(len(rows), 0, -1)]
                fh.write(json.dumps(pattern) + "\n")
        else:
            if args.k is None:
                raise ValueError("--k is required")
            pts = sample_corner_spectra(x, args.k, args.n, args.seed, threads=threads)
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"a{j + 1}" for j in range(args.k)])
            for p in pts:
                w.writerow([fmt(c) for c in p])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_discrete(args) -> int:
    if args.action == "dim":
        print(count_schemes(load_json(args.x)))
    elif args.action == "reldim":
        r = relative_dimension(load_json(args.x), load_json(args.y))
        print(f"{r.numerator}/{r.denominator}")
    else:
        report = scaling_limit_compare(load_json(args.x), args.k, args.l, load_json(args.points))
        fh, close = _open_out(args.out)
        try:
            w = csv.writer(fh, lineterminator="\n")
            k = report.k
            w.writerow(
                [f"a{j + 1}" for j in range(k)]
                + [f"lattice{j + 1}" for j in range(k)]
                + ["L", "discrete", "continuous", "abs_diff"]
            )
            for row in report.rows:
                w.writerow(
                    [fmt(v) for v in row.point]
                    + list(row.lattice_point)
                    + [report.scale, fmt(row.discrete), fmt(row.continuous), fmt(row.abs_diff)]
                )
        finally:
            if close:
                fh.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, n=args.n, seed=args.seed, samples=args.samples, threads=_threads(args))
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK if report["pass"] else EXIT_VERIFY


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="gtcorners",
        description="Densities of corners of random Hermitian matrices with fixed spectrum.",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spline", help="fundamental spline M(a; Y)")
    ssp = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = ssp.add_parser("eval", help="evaluate M(a; knots)")
    e.add_argument("--knots", required=True, help="JSON array of strictly increasing knots")
    e.add_argument("--at", required=True, type=float, help="evaluation point a")
    i = ssp.add_parser("integrate", help="integral of M over [from, to]")
    i.add_argument("--knots", required=True, help="JSON array of strictly increasing knots")
    i.add_argument("--from", dest="lo", default="-inf", help="lower limit; write negative values as --from=-inf")
    i.add_argument("--to", dest="hi", default="inf", help="upper limit (may be inf)")
    sp.set_defaults(func=cmd_spline)

    dp = sub.add_parser("density", help="corner density")
    dsp = dp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = dsp.add_parser("eval", help="density at one point")
    e.add_argument("--x", required=True, help="JSON spectrum (strictly increasing)")
    e.add_argument("--k", required=True, type=int, help="corner size K")
    e.add_argument("--at", required=True, help="JSON array of K ascending values")
    g = dsp.add_parser("grid", help="density on a grid, written as CSV")
    g.add_argument("--x", required=True, help="JSON spectrum (strictly increasing)")
    g.add_argument("--k", required=True, type=int, help="corner size K")
    g.add_argument("--grid", required=True, help="min:max:steps per axis, comma separated")
    g.add_argument("--out", default=None, help="CSV file (default stdout)")
    dp.set_defaults(func=cmd_density)

    vp = sub.add_parser("volume", help="volume of the Gelfand-Tsetlin polytope")
    vp.add_argument("--x", required=True, help="JSON spectrum (strictly increasing)")
    vp.set_defaults(func=cmd_volume)

    hp = sub.add_parser("hciz", help="HCIZ integral / Laplace transform of the orbital measure")
    hp.add_argument("--x", required=True, help="JSON spectrum (strictly increasing)")
    hp.add_argument(
        "--z", required=True, help='JSON eigenvalues of Z: numbers, [re, im] pairs or "a+bj" strings'
    )
    hp.set_defaults(func=cmd_hciz)

    smp = sub.add_parser("sample", help="Monte Carlo corner spectra (CSV) or full patterns (JSON lines)")
    smp.add_argument("mode", nargs="?", choices=["pattern"], help="dump full patterns instead")
    smp.add_argument("--x", required=True, help="JSON spectrum")
    smp.add_argument("--k", type=int, default=None, help="corner size K (CSV mode)")
    smp.add_argument("--n", type=int, required=True, help="number of samples")
    smp.add_argument("--seed", type=int, required=True, help="random seed")
    smp.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    smp.add_argument("--deterministic", action="store_true", help="force a single worker")
    smp.add_argument("--out", default=None, help="output file (default stdout)")
    smp.set_defaults(func=cmd_sample)

    dsc = sub.add_parser("discrete", help="integer Gelfand-Tsetlin schemes")
    dsub = dsc.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = dsub.add_parser("dim", help="number of schemes with top row x")
    e.add_argument("--x", required=True, help="JSON integer signature")
    e = dsub.add_parser("reldim", help="relative dimension of y under x, printed as p/q")
    e.add_argument("--x", required=True, help="JSON integer signature (top row)")
    e.add_argument("--y", required=True, help="JSON integer signature (shorter row)")
    e = dsub.add_parser("limit", help="discrete vs continuous density at scale L (CSV)")
    e.add_argument("--x", required=True, help="JSON real spectrum")
    e.add_argument("--k", required=True, type=int, help="row length K")
    e.add_argument("--l", required=True, type=int, help="scale L")
    e.add_argument("--points", required=True, help="JSON array of K-tuples")
    e.add_argument("--out", default=None, help="CSV file (default stdout)")
    dsc.set_defaults(func=cmd_discrete)

    ver = sub.add_parser("verify", help="run verification suites and print a JSON report")
    ver.add_argument("suite", choices=SUITES + ("all",))
    ver.add_argument("--n", type=int, default=4, help="matrix size N (default 4)")
    ver.add_argument("--seed", type=int, default=7, help="random seed (default 7)")
    ver.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples (default 1e5)")
    ver.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    ver.add_argument("--out", default=None, help="also write the report to this file")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConditioningError, ResourceError, RangeError) as exc:
        print(f"gtcorners: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError) as exc:
        print(f"gtcorners: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
