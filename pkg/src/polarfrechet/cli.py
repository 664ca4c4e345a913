"""Command line front end.

Exit status: 0 on success, 1 for usage or input errors, 2 when a
computation fails to converge or hits a numerical error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import gallery
from .exceptions import LinAlgError, MatrixFormatError, NearSingularWarning
from .iteration import residual_alpha, residual_beta, residual_gamma, trace_to_csv
from .linalg import fro, svd
from .matrixio import format_matrix, read_matrix
from .methods import ITERATIVE, METHODS, SCALING_NAMES, compute_polar
from .oracles import condition_polar, condition_polar_real_square, power_sigma_min
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

TABLE_COLUMNS = ("k", "err_X", "err_E", "alpha", "beta", "gamma", "beta~", "gamma~", "mu")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class _InputError(Exception):
    pass


# --------------------------------------------------------------------------
# parser


def _input_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("matrix", nargs="?", help="file holding A in the matrix text format")
    p.add_argument("--gallery", metavar="NAME", help=f"build A from the gallery ({', '.join(gallery.NAMES)})")
    p.add_argument("--n", type=int, help="gallery order (columns for rect_binomial and random)")
    p.add_argument("--m", type=int, help="gallery row count (rect_binomial, random)")
    p.add_argument("--field", choices=("real", "complex"), default="real", help="field of a random gallery matrix")
    p.add_argument("--gallery-seed", type=int, default=0, help="seed of a random gallery matrix")
    return p


def _method_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--E", metavar="PATH", help="file holding the direction E")
    p.add_argument("--seed", type=int, help="seed for a Gaussian direction E when --E is absent")
    p.add_argument("--method", choices=METHODS, default="newton")
    p.add_argument("--scaling", choices=tuple(SCALING_NAMES), help="default depends on the method")
    p.add_argument("--delta", type=float, default=1e-14)
    p.add_argument("--epsilon", type=float, default=1e-14)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--out", metavar="PATH", help="write results here instead of standard output")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polarfrechet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    inputs, methods = _input_options(), _method_options()

    p = sub.add_parser("compute", parents=[inputs, methods], help="polar factor and derivative")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("trace", parents=[inputs, methods], help="per-iteration residual table")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--diagnostic", action="store_true", help="add error columns against the SVD result")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("gallery", help="write a test matrix")
    p.add_argument("name", help=", ".join(gallery.NAMES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--info", action="store_true", help="report sigma_n, sigma_{n-1} and cond_2")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, help="matrix order (oracles: a single order instead of 4, 8, 16)")
    p.add_argument("--cases", type=int, help="number of seeded cases")
    p.add_argument("--cd-step", type=float, default=6e-6, help="central difference step (oracles)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("condition", parents=[inputs], help="condition numbers of the polar factor")
    p.add_argument("--power-iters", type=int, default=0, help="also estimate sigma_n by this many power steps")
    p.add_argument("--seed", type=int, default=0, help="start vector seed for the power method")
    p.set_defaults(func=cmd_condition)
    return parser


# --------------------------------------------------------------------------
# helpers


def _load_A(args) -> np.ndarray:
    if (args.matrix is None) == (args.gallery is None):
        raise _InputError("give exactly one of a matrix file or --gallery")
    if args.matrix is not None:
        return read_matrix(args.matrix)
    if args.n is None:
        raise _InputError("--gallery needs --n")
    return gallery.build(args.gallery, args.n, args.m, args.gallery_seed, args.field)


def _load_E(args, A, default_random: bool):
    if args.E is not None:
        E = read_matrix(args.E)
        if E.shape != A.shape:
            raise _InputError(f"E is {E.shape[0]}x{E.shape[1]} but A is {A.shape[0]}x{A.shape[1]}")
        return E
    if args.seed is None and not default_random:
        return None
    field = "complex" if np.iscomplexobj(A) and np.any(np.imag(A) != 0) else "real"
    return gallery.random_gaussian(A.shape[0], A.shape[1], args.seed or 0, field)


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _run(args, A, E, diagnostic=False):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        return compute_polar(
            A, E, args.method, args.scaling, args.delta, args.epsilon, args.max_iter, diagnostic
        )


def _sci1(v) -> str:
    return "-" if v is None else f"{v:.1e}"


def format_trace_table(trace) -> str:
    rows = [TABLE_COLUMNS]
    for r in trace:
        rows.append((
            str(r.k), _sci1(r.err_X), _sci1(r.err_E), _sci1(r.alpha_norm), _sci1(r.beta_norm),
            _sci1(r.gamma_norm), _sci1(r.beta_exact_norm), _sci1(r.gamma_exact_norm), _sci1(r.mu),
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n" for row in rows)


# --------------------------------------------------------------------------
# verbs


def cmd_compute(args) -> int:
    A = _load_A(args)
    E = _load_E(args, A, default_random=False)
    out = _run(args, A, E)
    Ek = out.K if out.K is not None else np.zeros_like(out.U)
    summary = [
        f"# method: {out.method}",
        f"# iterations: {out.iterations}",
        f"# converged: {str(out.converged).lower()}",
        f"# status: {out.message}",
        f"# alpha: {fro(residual_alpha(out.U)):.6e}",
        f"# beta: {fro(residual_beta(out.U, Ek)):.6e}",
        f"# gamma: {fro(residual_gamma(out.U, Ek)):.6e}",
    ]
    blocks = format_matrix(out.U) + (format_matrix(out.K) if out.K is not None else "")
    if args.out is None:
        sys.stdout.write("\n".join(summary) + "\n" + blocks)
    else:
        Path(args.out).write_text(blocks)
        sys.stdout.write("\n".join(summary) + "\n")
    return EXIT_OK if out.converged else EXIT_NUMERIC


def cmd_trace(args) -> int:
    if args.method not in ITERATIVE:
        raise _InputError(f"trace needs an iterative method ({', '.join(ITERATIVE)})")
    A = _load_A(args)
    E = _load_E(args, A, default_random=True)
    out = _run(args, A, E, diagnostic=args.diagnostic)
    text = trace_to_csv(out.trace) if args.format == "csv" else format_trace_table(out.trace)
    _emit(text, args.out)
    if not out.converged:
        print(f"not converged: {out.message}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_gallery(args) -> int:
    A = gallery.build(args.name, args.n, args.m, args.seed, args.field)
    text = format_matrix(A)
    if args.info:
        s = svd(A).sigma
        info = f"# sigma_n: {s[-1]:.6e}\n"
        if len(s) > 1:
            info += f"# sigma_n-1: {s[-2]:.6e}\n"
        info += f"# cond_2: {s[0] / s[-1]:.6e}\n"
        if args.out is None:
            text = info + text
        else:
            sys.stdout.write(info)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.suite == "oracles":
        kwargs["cd_step"] = args.cd_step
        if args.n is not None:
            kwargs["sizes"] = (args.n,)
    elif args.n is not None:
        kwargs["n"] = args.n
    if args.cases is not None:
        kwargs["seeds" if args.suite == "appendix" else "cases"] = args.cases
    checks = run_suite(args.suite, args.seed, **kwargs)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{args.suite}: {'all checks passed' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_condition(args) -> int:
    A = _load_A(args)
    s = svd(A).sigma
    print(f"sigma_n: {s[-1]:.6e}")
    print(f"cond_2: {s[0] / s[-1]:.6e}" if s[-1] > 0 else "cond_2: inf")
    print(f"kappa_polar: {condition_polar(A):.6e}")
    m, n = A.shape
    if m == n and n >= 2 and not np.any(np.imag(A) != 0):
        print(f"kappa_polar_real: {condition_polar_real_square(A):.6e}")
    if args.power_iters > 0:
        print(f"sigma_n_power: {power_sigma_min(A, args.power_iters, args.seed):.6e}")
    return EXIT_OK


# --------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MatrixFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LinAlgError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (_InputError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
