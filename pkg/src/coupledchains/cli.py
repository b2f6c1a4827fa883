"""Command-line interface.

Subcommands: ``validate``, ``quantities``, ``verify``, ``predict``,
``simulate``.  All output is JSON with 15-significant-digit floats and a
fixed field order, printed to stdout and optionally written to ``--out``.

Exit codes: 0 success, 1 verification/validation failure, 2 usage, parse or
model-assumption error, 3 enumeration budget refusal.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import jsonio
from .bounds import run_suite
from .engine import DEFAULT_BUDGET, conditional_query, filtered_symbol_law
from .errors import (
    AssumptionError,
    BudgetError,
    ConditioningError,
    CoupledChainsError,
    ModelStructureError,
    ParameterError,
)
from .model import load_model, model_hash, stationary_law, validate_kernel
from .patterns import parse_pattern, y_past
from .quantities import (
    amplification,
    mismatch_rate,
    nonnullness,
    oscillation_sum,
    quantity_report,
)
from .simulate import mc_vs_exact

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _emit(report: dict, out_path: str | None) -> None:
    text = jsonio.dumps(report)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def _load(path: str):
    kernel = load_model(path)
    return kernel, stationary_law(kernel)


def cmd_validate(args) -> int:
    kernel = load_model(args.model)
    report = validate_kernel(kernel)
    doc = {
        "model": args.model,
        "hash": model_hash(kernel),
        "alphabet_size": kernel.size,
        "order": kernel.order,
        "max_row_sum_error": report.max_row_sum_error,
        "row_sum_violations": list(report.row_sum_violations),
        "min_entry": report.min_entry,
        "strictly_positive": report.strictly_positive,
        "positivity_floor": report.floor,
        "meets_floor": report.meets_floor,
    }
    status = EXIT_OK if report.ok else EXIT_FAIL
    if report.ok:
        try:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                law = stationary_law(kernel)
            rho = mismatch_rate(kernel, law, budget=args.budget)
            alpha = nonnullness(kernel, law, budget=args.budget)
            doc["stationary_residual"] = law.residual
            doc["rho"] = rho.value
            doc["h1_holds"] = rho.value < 1.0
            doc["alpha"] = alpha.value
            doc["h2_holds"] = alpha.value > 0.0
        except CoupledChainsError as exc:
            doc["assumption_check_error"] = str(exc)
    _emit(doc, args.out)
    return status


def cmd_quantities(args) -> int:
    kernel, law = _load(args.model)
    report = quantity_report(kernel, law, args.j, args.k, budget=args.budget)
    report["model"] = args.model
    report["hash"] = model_hash(kernel)
    _emit(report, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    kernel, law = _load(args.model)
    suite = run_suite(kernel, law, args.max_depth, budget=args.budget)
    _emit(suite.to_dict(), args.out)
    return EXIT_OK if suite.passed else EXIT_FAIL


def cmd_predict(args) -> int:
    kernel, law = _load(args.model)
    history = tuple(
        int(tok) for tok in args.history.split(",") if tok.strip() != ""
    )
    for symbol in history:
        if not 0 <= symbol < kernel.size:
            raise ParameterError(f"history symbol {symbol} outside alphabet")
    k = len(history)
    law_x = filtered_symbol_law(kernel, law, history, target="X0")
    law_y = filtered_symbol_law(kernel, law, history, target="Y0")
    rho = mismatch_rate(kernel, law, budget=args.budget).value
    alpha = nonnullness(kernel, law, budget=args.budget).value
    gamma_kk = oscillation_sum(kernel, law, k, k, budget=args.budget)
    r_value = amplification(alpha, rho, gamma_kk)
    doc = {
        "model": args.model,
        "history": list(history),
        "k": k,
        "event_mass": law_x.event_mass,
        "p_x0": [float(p) for p in law_x.probs],
        "p_y0": [float(p) for p in law_y.probs],
        "additive_bound": rho,
        "rho": rho,
        "alpha": alpha,
        "r": r_value,
    }
    if rho * r_value < alpha:
        half = rho / (alpha - rho * r_value)
        doc["ratio_band"] = [1.0 - half, 1.0 + half]
    else:
        doc["ratio_band"] = None
    _emit(doc, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    kernel, law = _load(args.model)
    queries = []
    with open(args.patterns, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "|" in line:
                pattern_text, target = (part.strip() for part in line.split("|", 1))
            else:
                pattern_text, target = line, "X0"
            queries.append((parse_pattern(pattern_text), target))
    report = mc_vs_exact(kernel, law, queries, args.n, args.seed, budget=args.budget)
    _emit(report, args.out)
    return EXIT_OK if not report["any_z_exceeds"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupledchains",
        description=(
            "Exact conditional inference and bound certification for coupled "
            "pairs of finite-alphabet chains."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--out", default=None, help="also write the report here")
        p.add_argument(
            "--budget",
            type=int,
            default=DEFAULT_BUDGET,
            help="max cylinders one query may enumerate",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="reserved; execution is single-threaded and results do not depend on it",
        )

    p = sub.add_parser("validate", help="check a model file and its assumptions")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("quantities", help="extremal quantities with witnesses")
    common(p)
    p.add_argument("--j", type=int, required=True, help="max recent depth")
    p.add_argument("--k", type=int, required=True, help="max window depth")
    p.set_defaults(func=cmd_quantities)

    p = sub.add_parser("verify", help="run the full bound suite")
    common(p)
    p.add_argument("--max-depth", type=int, required=True, help="max window depth")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("predict", help="next-symbol laws given an observed history")
    common(p)
    p.add_argument(
        "--history",
        required=True,
        help='comma-separated observed symbols, oldest first (e.g. "0,1,0"); "" for none',
    )
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", help="Monte Carlo cross-check of the engine")
    common(p)
    p.add_argument("--n", type=int, required=True, help="trajectory length")
    p.add_argument("--seed", type=int, required=True, help="sampler seed")
    p.add_argument(
        "--patterns",
        required=True,
        help="file with one pattern per line, optionally '| TARGET'",
    )
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except BudgetError as exc:
        print(
            jsonio.dumps(
                {
                    "error": "budget",
                    "message": str(exc),
                    "estimate": exc.estimate,
                    "budget": exc.budget,
                }
            ),
            file=sys.stderr,
        )
        return EXIT_BUDGET
    except AssumptionError as exc:
        print(
            jsonio.dumps(
                {
                    "error": "assumptions",
                    "message": str(exc),
                    "rho": exc.rho,
                    "alpha": exc.alpha,
                }
            ),
            file=sys.stderr,
        )
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(
            jsonio.dumps(
                {
                    "error": "parse",
                    "message": str(exc),
                    "line": exc.lineno,
                    "column": exc.colno,
                }
            ),
            file=sys.stderr,
        )
        return EXIT_USAGE
    except (ModelStructureError, ParameterError, ConditioningError, OSError) as exc:
        print(
            jsonio.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
