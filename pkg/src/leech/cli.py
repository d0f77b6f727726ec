"""``leech`` command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 not solvable,
3 symbol only semidefinite (or no stabilizing Riccati solution for
``factor``).
"""
import argparse
import logging
import sys

import numpy as np

from . import io
from .errors import LeechError, NoStabilizingSolution, NotSolvable, SemidefiniteUnsupported
from .realization import DEFAULT_GRID, LeechData, circle_points, evaluate_many, hinf_norm_grid
from .solver import SolveOptions, solve
from .spectral import factor_symbol, riccati_residual


EXIT_OK, EXIT_IO, EXIT_NOT_SOLVABLE, EXIT_SEMIDEFINITE = 0, 1, 2, 3
CHECK_TOL = 1e-6


def example_data():
    """The scalar-over-two-columns example with known solution ``z/(2 sqrt 2) [1; 1]``."""
    s = 1 / np.sqrt(2)
    return LeechData(A=[[0]], B1=[[0, 0]], B2=[[0.5]], C=[[1]], D1=[[s, s]], D2=[[0]])


def _err(msg):
    print(f"leech: {msg}", file=sys.stderr)


def _load_problem(path):
    return io.problem_from_dict(io.read_json(path))


def cmd_solve(input_path, output_path, tol=None, grid=None):
    try:
        data, options = _load_problem(input_path)
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO
    if tol is not None:
        options["tol"] = tol
    if grid is not None:
        options["grid"] = grid
    opts = SolveOptions(**options)
    try:
        sol = solve(data, opts)
    except NotSolvable as exc:
        _err(f"not solvable: {exc} (margin {exc.margin:.6g})")
        doc = io.failure_to_dict("not_solvable", str(exc),
                                 {**exc.diagnostics, "solvability_margin": exc.margin})
        return _write(output_path, doc, EXIT_NOT_SOLVABLE)
    except SemidefiniteUnsupported as exc:
        _err(f"unsupported: {exc}")
        doc = io.failure_to_dict("semidefinite_unsupported", str(exc), exc.diagnostics)
        return _write(output_path, doc, EXIT_SEMIDEFINITE)
    except (LeechError, ValueError, ArithmeticError) as exc:
        _err(str(exc))
        return EXIT_IO
    d = sol.diagnostics
    print(f"branch {sol.branch.value}: residual {d['leech_residual']:.3e}, "
          f"norm {d['joint_norm']:.12f}, solvability margin {d['solvability_margin']:.3e}")
    return _write(output_path, io.solution_to_dict(sol), EXIT_OK)


def _write(path, doc, code):
    try:
        io.write_json(path, doc)
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    return code


def cmd_check(problem_path, solution_path, grid=None):
    try:
        data, options = _load_problem(problem_path)
        X = io.solution_X(io.read_json(solution_path))
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO
    if X.shape != (data.p, data.q):
        _err(f"X has shape {X.shape}, expected {(data.p, data.q)}")
        return EXIT_IO
    grid = grid or options.get("grid", DEFAULT_GRID)
    zs = circle_points(grid)
    diff = evaluate_many(data.G, zs) @ evaluate_many(X, zs) - evaluate_many(data.K, zs)
    residual = float(np.linalg.norm(diff, 2, axis=(1, 2)).max())
    norm = hinf_norm_grid(X, grid)
    print(f"residual {residual:.3e}")
    print(f"norm {norm:.12f}")
    ok = residual < CHECK_TOL and norm <= 1 + CHECK_TOL
    return EXIT_OK if ok else EXIT_NOT_SOLVABLE


def cmd_example(output_path):
    return _write(output_path, io.problem_to_dict(example_data()), EXIT_OK)


def cmd_factor(symbol_path, output_path, tol=1e-12, max_iter=50000):
    try:
        sym = io.symbol_from_dict(io.read_json(symbol_path))
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO
    try:
        sf = factor_symbol(sym, tol, max_iter)
    except NoStabilizingSolution as exc:
        _err(f"no stabilizing solution: {exc}")
        return EXIT_SEMIDEFINITE
    doc = {
        "schema_version": io.SCHEMA_VERSION,
        "Q": io.encode_matrix(sf.Q),
        "Phi": io.realization_to_dict(sf.phi),
        "Phi_inv": io.realization_to_dict(sf.phi_inv),
        "diagnostics": {"riccati_residual": riccati_residual(sym, sf.Q) if sym.n else 0.0,
                        "closed_loop_spectral_radius": sf.phi_inv.spectral_radius},
    }
    return _write(output_path, doc, EXIT_OK)


def build_parser():
    parser = argparse.ArgumentParser(prog="leech", description="Contractive solutions of G X = K.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", type=int)

    p = sub.add_parser("check", help="verify a solution against a problem")
    p.add_argument("problem")
    p.add_argument("solution")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("example", help="write the built-in example problem")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("factor", help="outer spectral factor of a symbol file")
    p.add_argument("symbol")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=50000)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return cmd_solve(args.input, args.output, args.tol, args.grid)
    if args.command == "check":
        return cmd_check(args.problem, args.solution, args.grid)
    if args.command == "example":
        return cmd_example(args.output)
    return cmd_factor(args.symbol, args.output, args.tol, args.max_iter)


if __name__ == "__main__":
    sys.exit(main())
