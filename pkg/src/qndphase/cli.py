"""Command-line entry point: ``qndphase <command> [options]``.

Exit codes: 0 success, 1 invalid problem or parameters, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import config, gaussian, qnd, qpe, seeding
from .output import csv_table, dumps
from .problem import ProblemError, diagnose, load, parse_phase


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _phase(text: str) -> float:
    try:
        return parse_phase(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=None,
                        help=f"master seed (default {config.DEFAULT_SEED}, or the problem's own seed)")
    common.add_argument("--tol", type=float, default=config.DEFAULT_TOL,
                        help="Frobenius tolerance for the QND criteria (default %(default)g)")
    common.add_argument("--output", choices=("json", "csv"), default="json")

    parser = _Parser(prog="qndphase", description="Phase estimation and QND measurement simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qpe-run", parents=[common], help="run a .qpe problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--shots", type=_nonneg_int, default=None)

    p = sub.add_parser("qpe-dist", parents=[common], help="exact outcome distribution for an eigenphase")
    p.add_argument("--phase", type=_phase, required=True, help="eigenphase, e.g. 0.75pi or 2.356")
    p.add_argument("--bits", type=int, required=True)

    p = sub.add_parser("qnd-check", parents=[common], help="check the three QND criteria")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--problem")
    group.add_argument("--quadrature", action="store_true", help="truncated chi X_a Y_b coupling")
    group.add_argument("--cv-phase", action="store_true", help="truncated g x_I X_T coupling")
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--cutoff", type=int, default=qnd.DEFAULT_CUTOFF)

    for name, coupling in (("cv-qnd", "--chi"), ("cv-qpe", "--g")):
        p = sub.add_parser(name, parents=[common], help=f"Gaussian {name[3:].upper()} estimator statistics")
        p.add_argument(coupling, type=float, default=1.0)
        p.add_argument("--squeeze", type=_float_list, default=[1.0],
                       help="meter/index squeezing r; a comma list gives a sweep")
        p.add_argument("--mean-x", type=float, default=0.0)
        p.add_argument("--runs", type=int, default=1000)

    p = sub.add_parser("validate", parents=[common], help="report diagnostics for a .qpe file")
    p.add_argument("--problem", required=True)
    return parser


def _seed(args, fallback=None) -> int:
    if args.seed is not None:
        return args.seed
    return config.DEFAULT_SEED if fallback is None else fallback


def cmd_qpe_run(args) -> str:
    problem = load(args.problem)
    seed = _seed(args, problem.seed)
    shots = problem.shots if args.shots is None else args.shots
    result = qpe.run_qpe(problem, shots, seeding.generator(seed, "qpe-run"))
    if args.output == "csv":
        counts = np.bincount(result.samples, minlength=len(result.distribution))
        dim = len(result.distribution)
        rows = [(k, 2.0 * math.pi * k / dim, float(p), int(c))
                for k, (p, c) in enumerate(zip(result.distribution, counts))]
        return csv_table(["outcome", "phase_estimate", "probability", "count"], rows)
    return dumps({"command": "qpe-run", "index_bits": problem.index_bits, "shots": shots,
                  "seed": seed, **result.to_dict()})


def cmd_qpe_dist(args) -> str:
    dist = qpe.exact_distribution(args.phase, args.bits)
    dim = len(dist)
    if args.output == "csv":
        rows = [(k, 2.0 * math.pi * k / dim, float(p)) for k, p in enumerate(dist)]
        return csv_table(["outcome", "phase_estimate", "probability"], rows)
    return dumps({"command": "qpe-dist", "phase": args.phase, "bits": args.bits,
                  "distribution": dist.tolist()})


def cmd_qnd_check(args) -> str:
    if args.problem:
        problem = load(args.problem)
        triple = qnd.qpe_triple(problem.generator(), problem.index_bits, args.tol)
    elif args.quadrature:
        triple = qnd.quadrature_triple(args.chi, args.cutoff, tolerance=args.tol)
    else:
        triple = qnd.cv_phase_triple(args.g, args.cutoff, tolerance=args.tol)
    report = qnd.check(triple)
    if args.output == "csv":
        rows = [(i + 1, n, ok) for i, (n, ok) in
                enumerate(zip((report.qnd1_norm, report.qnd2_norm, report.qnd3_norm), report.passed))]
        return csv_table(["criterion", "commutator_norm", "passed"], rows)
    return dumps(report.to_dict())


def _cv_stats(args, label: str) -> str:
    if args.runs < 1:
        raise ValueError(f"--runs must be >= 1, got {args.runs}")
    seed = _seed(args)
    rows = []
    for r in args.squeeze:
        prep = gaussian.squeezed(0.0, "X", (args.mean_x, 0.0))
        rngs = seeding.run_generators(seed, f"{label}:r={r!r}", args.runs)
        if label == "cv-qnd":
            estimates = gaussian.qnd_measure_batch(prep, args.chi, r, rngs)
            predicted = gaussian.qnd_estimator_variance(prep, args.chi, r)
            first = gaussian.qnd_measure(prep, args.chi, r, rngs[0])
        else:
            estimates = gaussian.cv_phase_estimate_batch(args.g, prep, r, rngs)
            predicted = gaussian.cv_phase_estimator_variance(args.g, prep, r)
            first = gaussian.cv_phase_estimate(args.g, prep, r, rngs[0])
        var = float(np.var(estimates, ddof=1)) if args.runs > 1 else 0.0
        rows.append({
            "squeeze": r,
            "runs": args.runs,
            "sample_mean": float(np.mean(estimates)),
            "sample_variance": var,
            "standard_error": math.sqrt(predicted / args.runs),
            "predicted_variance": predicted,
            "first_run": first.to_dict(),
        })
    if args.output == "csv":
        keys = ["squeeze", "runs", "sample_mean", "sample_variance", "standard_error", "predicted_variance"]
        return csv_table(keys, [[row[k] for k in keys] for row in rows])
    coupling = {"chi": args.chi} if label == "cv-qnd" else {"g": args.g}
    head = {"command": label, **coupling, "mean_x": args.mean_x, "seed": seed}
    if len(rows) == 1:
        return dumps({**head, **rows[0]})
    return dumps({**head, "sweep": rows})


def cmd_validate(args) -> tuple[str, int]:
    with open(args.problem, encoding="utf-8") as fh:
        diags = diagnose(fh.read())
    valid = not any(d.severity == "error" for d in diags)
    return dumps({"valid": valid, "diagnostics": [d.to_dict() for d in diags]}), 0 if valid else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            text, code = cmd_validate(args)
            sys.stdout.write(text)
            return code
        handler = {
            "qpe-run": cmd_qpe_run,
            "qpe-dist": cmd_qpe_dist,
            "qnd-check": cmd_qnd_check,
            "cv-qnd": lambda a: _cv_stats(a, "cv-qnd"),
            "cv-qpe": lambda a: _cv_stats(a, "cv-qpe"),
        }[args.command]
        sys.stdout.write(handler(args))
    except ProblemError as exc:
        for d in exc.diagnostics:
            print(f"{args.problem}:{d}", file=sys.stderr)
        return 1
    except (OSError, ValueError, IndexError) as exc:
        print(f"qndphase: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
