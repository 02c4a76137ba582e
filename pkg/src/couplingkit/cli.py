"""Command-line front end.

Exit codes: 0 success, 2 data not admissible, 3 no solution, 4 verification
failure, 5 convergence budget exhausted, 64 usage or malformed input, 74 I/O.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import gmpy2

from . import formats
from .algebra import FLOAT, precision, scalar_to_str
from .ch_app import ch_forward, ch_sample_field
from .coupling import (
    NoSolution,
    VerifyOptions,
    is_admissible,
    reduce,
    solve,
    solve_general,
    stability_distances,
    step1_function,
    verify,
)
from .errors import BudgetExhausted, CouplingError, NotAdmissible, SchemaError
from .herglotz import cf_expand
from .instances import stability_schedule
from .string_app import string_recover, string_spectrum

EXIT_OK = 0
EXIT_NOT_ADMISSIBLE = 2
EXIT_NO_SOLUTION = 3
EXIT_VERIFY_FAILED = 4
EXIT_BUDGET = 5
EXIT_USAGE = 64
EXIT_IO = 74

log = logging.getLogger("couplingkit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _summary(args, text: str) -> None:
    # keep stdout clean when the result itself goes there
    to_stdout = getattr(args, "out", None) not in (None, "-")
    print(text, file=sys.stdout if to_stdout else sys.stderr)


def _kind(args) -> str | None:
    return None if args.kind is None else formats.KIND_NAMES[args.kind]


def _grid(spec: str):
    try:
        xs, ts = spec.split(",")
        out = []
        for part in (xs, ts):
            a, b, n = part.split(":")
            a, b, n = gmpy2.mpfr(a), gmpy2.mpfr(b), int(n)
            if n < 1:
                raise ValueError
            out.append([a + (b - a) * k / (n - 1) for k in range(n)] if n > 1 else [a])
        return out
    except ValueError as exc:
        raise UsageError(f"bad --grid {spec!r}; expected x0:x1:n,t0:t1:m") from exc


def cmd_solve(args) -> int:
    data = formats.parse_problem(_read(args.input), _kind(args))
    if args.general:
        res = solve_general(data)
        if isinstance(res, NoSolution):
            _summary(args, f"no solution: phi_plus does not vanish at {[scalar_to_str(x) for x in res.failing]}")
            return EXIT_NO_SOLUTION
        pair = res
    else:
        try:
            pair = solve(data)
        except NotAdmissible as exc:
            _summary(args, f"not admissible: {exc}")
            return EXIT_NOT_ADMISSIBLE
    _write(args.out, formats.emit_solution(pair))
    _summary(args, f"solved: deg phi_minus = {pair.phi_minus.degree}, deg phi_plus = {pair.phi_plus.degree}")
    return EXIT_OK


def cmd_verify(args) -> int:
    data = formats.parse_problem(_read(args.problem), _kind(args))
    pair = formats.parse_solution(_read(args.solution), data.kind)
    opts = VerifyOptions(sample_count=args.samples, tol=args.tol if args.tol is not None else 1e-12)
    report = verify(data, pair, opts)
    _write(args.out, formats.emit_report(report))
    failed = [k for k, v in report.checks.items() if not v]
    _summary(args, "verified: all checks pass" if report.passed else f"verification failed: {', '.join(failed)}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_cf(args) -> int:
    data = formats.parse_problem(_read(args.input), _kind(args))
    if not is_admissible(data):
        _summary(args, "not admissible")
        return EXIT_NOT_ADMISSIBLE
    reduced, _, _ = reduce(data)
    if len(reduced) == 0:
        cf_doc: list = []
    else:
        cf_doc = formats.cf_to_doc(cf_expand(step1_function(reduced)))
    _write(args.out, formats.dumps(cf_doc))
    _summary(args, f"continued fraction with {len(cf_doc)} levels")
    return EXIT_OK


def cmd_string_forward(args) -> int:
    s = formats.parse_string(_read(args.input))
    d = string_spectrum(s, args.prec_bits)
    _write(args.out, formats.emit_spectral(d))
    _summary(args, f"{len(d.eigenvalues)} eigenvalues ({'exact' if d.kind != FLOAT else f'{args.prec_bits}-bit'})")
    return EXIT_OK


def cmd_string_recover(args) -> int:
    d = formats.parse_spectral(_read(args.input), args.prec_bits)
    s = string_recover(d, kink_tol=args.tol if args.tol is not None else 1e-12, grid_budget=args.budget)
    _write(args.out, formats.emit_string(s))
    _summary(args, f"recovered {len(s)} masses")
    return EXIT_OK


def cmd_peakon_forward(args) -> int:
    mp = formats.parse_peakons(_read(args.input))
    d = ch_forward(mp, args.prec_bits)
    _write(args.out, formats.emit_ch_spectral(d))
    _summary(args, f"{len(d.eigenvalues)} eigenvalues")
    return EXIT_OK


def cmd_peakon_field(args) -> int:
    mp = formats.parse_peakons(_read(args.input))
    xs, ts = _grid(args.grid)
    d = ch_forward(mp, args.prec_bits)
    values, errors = ch_sample_field(d, xs, ts, workers=args.workers)
    emit = formats.field_json if args.format == "json" else formats.field_csv
    _write(args.out, emit(values, xs, ts))
    _summary(args, f"sampled {len(ts)}x{len(xs)} grid, {len(errors)} failed cells")
    return EXIT_OK if not errors else EXIT_VERIFY_FAILED


def cmd_stability(args) -> int:
    limit, seq = stability_schedule(args.seed, size=args.size, steps=args.steps)
    dist = stability_distances(limit, seq)
    monotone = all(b <= a for a, b in zip(dist, dist[1:]))
    tol = args.tol if args.tol is not None else 1e-6
    ok = monotone and dist[-1] < tol
    _write(args.out, formats.dumps({
        "problem": {"sigma": formats._strs(limit.sigma), "eta": formats._strs(limit.eta)},
        "distances": [f"{float(v):.6e}" for v in dist],
        "monotone": monotone,
        "converged": ok,
    }))
    _summary(args, f"final distance {float(dist[-1]):.3e}, monotone = {monotone}")
    return EXIT_OK if ok else EXIT_BUDGET


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="couplingkit", description="Coupling problems for entire functions.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, io=True):
        if io:
            p.add_argument("--in", dest="input", required=True, help="input file, '-' for stdin")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--kind", choices=sorted(formats.KIND_NAMES), default=None)
        p.add_argument("--prec-bits", type=int, default=256)
        p.add_argument("--tol", type=float, default=None)
        return p

    p = common(sub.add_parser("solve", help="solve a coupling problem"))
    p.add_argument("--general", action="store_true", help="accept non-admissible data (exit 3 when unsolvable)")
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("verify", help="check a solution against a problem"), io=False)
    p.add_argument("--problem", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_verify)

    common(sub.add_parser("cf", help="continued fraction of the auxiliary function")).set_defaults(func=cmd_cf)
    common(sub.add_parser("string-forward", help="string to spectral data")).set_defaults(func=cmd_string_forward)

    p = common(sub.add_parser("string-recover", help="spectral data to string"))
    p.add_argument("--budget", type=int, default=400, help="maximum number of coupling problems")
    p.set_defaults(func=cmd_string_recover)

    common(sub.add_parser("peakon-forward", help="multipeakon to spectral data")).set_defaults(func=cmd_peakon_forward)

    p = common(sub.add_parser("peakon-field", help="sample u(x, t)"))
    p.add_argument("--grid", required=True, help="x0:x1:n,t0:t1:m")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_peakon_field)

    p = common(sub.add_parser("stability", help="convergence under perturbed coupling constants"), io=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--steps", type=int, default=24)
    p.set_defaults(func=cmd_stability)
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.prec_bits < 64:
            raise UsageError("--prec-bits must be at least 64")
        if args.tol is not None and not args.tol > 0:
            raise UsageError("--tol must be positive")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with precision(args.prec_bits):
            return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SchemaError as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAdmissible as exc:
        print(f"not admissible: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CouplingError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED


def main() -> None:
    sys.exit(run())
