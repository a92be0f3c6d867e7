"""Command-line entry point: ``hoselberg <check> [flags]``.

Exit status is 0 when nothing failed, 1 when any check failed, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
import warnings

from .checks import CHECKS, CheckRequest, UsageError, expand_names, run_suite
from .report import render

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hoselberg", description="Numerical checks for type-A hypergeometric series, "
                "their transformation law, pattern integrals and Selberg-type evaluations.")
    p.add_argument("checks", nargs="*", metavar="check",
                   help=f"one or more of: {', '.join(CHECKS)}, all (comma lists accepted)")
    p.add_argument("--n", type=int, default=1, help="rank (default 1)")
    p.add_argument("--k-re", type=float, default=None, help="real part of k (per-check default if omitted)")
    p.add_argument("--k-im", type=float, default=0.0, help="imaginary part of k")
    p.add_argument("--lambda", dest="lam", type=_float_list, default=None,
                   help="comma list of n+1 coordinates; re-centered to sum 0 with a warning")
    p.add_argument("--order", type=int, default=6, help="series truncation height")
    p.add_argument("--tol", type=float, default=None, help="pass threshold (per-check default if omitted)")
    p.add_argument("--quad-tol", type=float, default=1e-9, help="relative quadrature tolerance")
    p.add_argument("--h", type=float, default=1e-2, help="finite-difference step in log z")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized parameter draws (PCG64)")
    p.add_argument("--jobs", type=int, default=1, help="parallel job cap")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    p.add_argument("--w", default="e", help="Weyl element: e, w0, all, or a permutation such as 213")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.simplefilter("always")
    warnings.showwarning = lambda msg, *a, **kw: print(f"warning: {msg}", file=sys.stderr)
    k = None
    if args.k_re is not None or args.k_im:
        k = complex(args.k_re or 0.0, args.k_im)
    try:
        names = expand_names(args.checks)
        base = CheckRequest(check=names[0], n=args.n, k=k, lam=args.lam, order=args.order, tol=args.tol,
                            quad_tol=args.quad_tol, h=args.h, seed=args.seed, jobs=args.jobs, fmt=args.fmt,
                            w=args.w)
        reports, summary = run_suite(names, base)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hoselberg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render(reports, args.fmt))
    return EXIT_FAIL if summary["failed"] else EXIT_PASS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
