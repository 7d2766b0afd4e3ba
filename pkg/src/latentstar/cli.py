"""Command line interface.

Subcommands: solve, certify, oracle, simulate, tree-check, sweep.  Runs are
deterministic: identical arguments and seed produce byte-identical output.
All floats are printed with 17 significant digits so values round-trip
exactly.

Exit codes: 0 success, 1 internal inconsistency, 2 invalid input,
3 certificate verification failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import treesim
from .certificate import build_certificate, verify_certificate
from .dominance import Dominance, classify
from .errors import EdgeWeightDomainError
from .model import Branch, EdgeWeightVector, build_star_covariance
from .oracle import brute_force_cmtfa, projected_descent_cmtfa
from .solver import numerical_rank, solve, solve_rank_n_minus_1, trace_advantage

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_VERIFY_FAILED = 3

RECONSTRUCTION_TOL = 1e-12


def format_float(value: float) -> str:
    return f"{float(value):.17g}"


def render_json(value) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(
            f"{json.dumps(str(k))}: {render_json(v)}" for k, v in value.items()
        )
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(render_json(v) for v in value) + "]"
    raise TypeError(f"cannot render {type(value)!r} as JSON")


def _write(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="\n") as handle:
            handle.write(text)


def _parse_alpha(args) -> EdgeWeightVector:
    if args.alpha is not None:
        try:
            values = [float(part) for part in args.alpha.split(",") if part.strip()]
        except ValueError as exc:
            raise EdgeWeightDomainError(f"cannot parse --alpha {args.alpha!r}: {exc}")
        return EdgeWeightVector(values)
    if args.input is not None:
        with open(args.input) as handle:
            data = json.load(handle)
        return EdgeWeightVector.from_dict(data)
    raise EdgeWeightDomainError("provide edge weights via --alpha or --input")


def cmd_solve(args) -> int:
    alpha = _parse_alpha(args)
    decomp = solve(alpha)
    sigma = build_star_covariance(alpha).matrix
    if np.max(np.abs(decomp.reconstruct() - sigma)) > RECONSTRUCTION_TOL:
        sys.stderr.write("internal error: decomposition does not reconstruct sigma\n")
        return EXIT_INTERNAL
    if args.format == "csv":
        n = alpha.n
        lines = [",".join(f"X{i + 1}" for i in range(n))]
        lines.extend(",".join(format_float(v) for v in row) for row in decomp.sigma_t)
        lines.append(",".join(format_float(v) for v in decomp.d))
        _write("\n".join(lines) + "\n", args.output)
    else:
        _write(render_json(decomp.to_dict()) + "\n", args.output)
    return EXIT_OK


def cmd_certify(args) -> int:
    alpha = _parse_alpha(args)
    decomp = solve(alpha)
    cert = build_certificate(alpha)
    report = verify_certificate(decomp, cert, tol=args.tol)
    payload = report.to_dict()
    if decomp.branch is Branch.BOUNDARY:
        payload["note"] = f"boundary: witness rank {numerical_rank(cert.witness)}"
    _write(render_json(payload) + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_oracle(args) -> int:
    alpha = _parse_alpha(args)
    sigma = build_star_covariance(alpha)
    payload = {"closed_form_trace": solve(alpha).trace_sigma_t}
    if args.method in ("grid", "both"):
        result = brute_force_cmtfa(
            sigma, resolution=args.resolution, refine_rounds=args.refine_rounds
        )
        payload["grid"] = result.to_dict()
    if args.method in ("descent", "both"):
        result = projected_descent_cmtfa(
            sigma, step=args.step, max_iter=args.max_iter, seed=args.seed
        )
        payload["descent"] = result.to_dict()
    _write(render_json(payload) + "\n", args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 2:
        raise EdgeWeightDomainError(f"--n must be >= 2, got {args.n}")
    payload = {"n": args.n, "trials": args.trials, "seed": args.seed}
    if args.check in ("prob", "both"):
        estimate = treesim.mc_prob_nondominant(args.n, args.trials, args.seed)
        prob = estimate.to_dict()
        prob["exact"] = treesim.prob_nondominant(args.n)
        payload["prob"] = prob
    if args.check in ("density", "both"):
        if args.n < 3:
            raise EdgeWeightDomainError("--check density needs --n >= 3")
        result = treesim.density_sum_check(args.n, args.trials, args.seed)
        density = result.to_dict()
        density["expected_mass"] = 1.0 / math.factorial(args.n - 1)
        payload["density"] = density
    if args.plot is not None:
        if "density" not in payload:
            raise EdgeWeightDomainError("--plot requires --check density or both")
        from .plotting import save_density_figure

        save_density_figure(args.n, args.trials, args.seed, args.plot)
    _write(render_json(payload) + "\n", args.output)
    return EXIT_OK


def cmd_tree_check(args) -> int:
    if args.input is not None:
        with open(args.input) as handle:
            spec = treesim.ClusterSpec.from_dict(json.load(handle))
    elif args.sizes is not None and args.delta is not None:
        try:
            sizes = tuple(int(part) for part in args.sizes.split(",") if part.strip())
        except ValueError as exc:
            raise EdgeWeightDomainError(f"cannot parse --sizes {args.sizes!r}: {exc}")
        spec = treesim.ClusterSpec(sizes=sizes, delta=args.delta)
    else:
        raise EdgeWeightDomainError("provide --sizes and --delta, or --input")
    report = treesim.check_tree_feasibility(
        spec, mc_trials=args.mc_trials, seed=args.seed
    )
    payload = {"spec": spec.to_dict()}
    payload.update(report.to_dict())
    _write(render_json(payload) + "\n", args.output)
    return EXIT_OK


def sweep_rows(tail, start: float, stop: float, step: float):
    """Rows (alpha1, trace_nd, trace_dm, advantage) over the alpha1 range.

    Only alpha1 values whose entry is the dominant (or boundary) element are
    kept: there the forced-star trace, the rank n-1 trace, and their gap are
    all well defined and the gap grows with alpha1.
    """
    if step <= 0:
        raise EdgeWeightDomainError(f"step must be positive, got {step}")
    if not (0.0 < start < 1.0 and 0.0 < stop < 1.0 and start <= stop):
        raise EdgeWeightDomainError(
            f"alpha1 range [{start}, {stop}] must lie strictly inside (0, 1)"
        )
    rows = []
    count = int(np.floor((stop - start) / step + 0.5)) + 1
    for k in range(count):
        alpha1 = start + k * step
        if alpha1 >= 1.0 or alpha1 > stop + 0.5 * step:
            break
        vec = EdgeWeightVector([alpha1, *tail])
        verdict = classify(vec)
        if verdict.branch is Dominance.NON_DOMINANT or verdict.dominant_index != 0:
            continue
        trace_nd = float(np.sum(vec.entries**2))
        trace_dm = solve_rank_n_minus_1(vec).trace_sigma_t
        rows.append((alpha1, trace_nd, trace_dm, trace_advantage(vec)))
    return rows


def cmd_sweep(args) -> int:
    try:
        tail = [float(part) for part in args.tail.split(",") if part.strip()]
    except ValueError as exc:
        raise EdgeWeightDomainError(f"cannot parse --tail {args.tail!r}: {exc}")
    if len(tail) < 1:
        raise EdgeWeightDomainError("--tail needs at least one magnitude")
    if any(not 0.0 < t < 1.0 for t in tail):
        raise EdgeWeightDomainError(f"tail magnitudes must lie in (0, 1), got {tail}")
    rows = sweep_rows(tail, args.start, args.stop, args.step)
    if not rows:
        sys.stderr.write("no dominant alpha1 value in the requested range\n")
        return EXIT_INVALID
    lines = ["alpha1,trace_nd,trace_dm,advantage"]
    lines.extend(",".join(format_float(v) for v in row) for row in rows)
    _write("\n".join(lines) + "\n", args.output)
    if args.plot is not None:
        from .plotting import save_sweep_figure

        save_sweep_figure(rows, args.plot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentstar",
        description="Closed-form minimum-trace factor analysis of latent star covariances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, alpha=True):
        if alpha:
            p.add_argument("--alpha", help="comma-separated edge weights")
            p.add_argument("--input", help='JSON file with {"alpha": [...]}')
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument(
            "--tol", type=float, default=1e-8, help="verification tolerance"
        )
        p.add_argument("--output", help="output path (default: stdout)")

    p = sub.add_parser("solve", help="closed-form decomposition")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="build and verify the optimality certificate")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", help="brute-force trace minimization")
    common(p)
    p.add_argument("--method", choices=("grid", "descent", "both"), default="both")
    p.add_argument("--resolution", type=float, default=0.05)
    p.add_argument("--refine-rounds", type=int, default=3)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--max-iter", type=int, default=600)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo checks of the probability law")
    common(p, alpha=False)
    p.add_argument("--n", type=int, required=True, help="cluster size")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--check", choices=("prob", "density", "both"), default="prob")
    p.add_argument("--plot", help="write a CDF comparison figure to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tree-check", help="cluster combination feasibility")
    common(p, alpha=False)
    p.add_argument("--sizes", help="comma-separated cluster sizes")
    p.add_argument("--delta", type=float, help="required joint probability")
    p.add_argument("--input", help="JSON file with a cluster spec")
    p.add_argument(
        "--mc-trials", type=int, default=None, help="also estimate the joint probability"
    )
    p.set_defaults(func=cmd_tree_check)

    p = sub.add_parser("sweep", help="trace advantage across an alpha1 range")
    common(p, alpha=False)
    p.add_argument("--tail", required=True, help="fixed tail magnitudes, comma-separated")
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--plot", help="write the advantage figure to this path")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EdgeWeightDomainError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    except Exception as exc:  # documented exit contract: 1 = internal error
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())
