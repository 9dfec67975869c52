"""Command-line front end.

    regeffect analyze --data FILE --formula "y ~ group + x2" [--delimiter ;]
    regeffect simulate --n0 20 --n1 20 --k 0 --beta 0,0.5 --sigma 1

Results go to stdout; failures go to stderr as a JSON object
``{"code", "module", "message"}`` with exit status 1 (usage), 2 (data) or
3 (numerical).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .data import load_csv
from .errors import EXIT_USAGE, RegEffectError
from .formula import parse_formula
from .linalg import build_design_matrix, ols_fit
from .report import analyze_fit, simulation_json
from .simulation import SimConfig, run_simulation


class UsageError(RegEffectError):
    module = "cli"
    code = "usage"
    exit_code = EXIT_USAGE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regeffect", description="Cohen's d from linear regression, with exact bias correction and intervals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    an = sub.add_parser("analyze", help="estimate the group effect size from a CSV file")
    an.add_argument("--data", required=True, help="CSV file with a header row")
    an.add_argument("--formula", required=True, help='e.g. "G3 ~ address + traveltime"')
    an.add_argument("--delimiter", default=",", help="single-character field delimiter (default ,)")
    an.add_argument("--reference", default=None, help="group level coded 0 (default: the smaller level)")
    an.add_argument("--alpha", type=_probability, default=0.05, help="1 - confidence level (default 0.05)")
    an.add_argument("--format", choices=("json", "text"), default="json")
    an.add_argument("--drop-missing", action="store_true", help="drop rows with missing values in used columns")

    sim = sub.add_parser("simulate", help="Monte Carlo check of bias, variance and coverage")
    sim.add_argument("--n0", type=int, required=True)
    sim.add_argument("--n1", type=int, required=True)
    sim.add_argument("--k", type=int, required=True, help="number of extra standard-normal covariates")
    sim.add_argument("--beta", type=_float_list, required=True, help="2+k coefficients, comma separated")
    sim.add_argument("--sigma", type=float, required=True)
    sim.add_argument("--alpha", type=_probability, default=0.05)
    sim.add_argument("--reps", type=int, default=10000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--fixed-design", action="store_true", help="draw covariates once and reuse them")
    return parser


def run_analyze(args: argparse.Namespace) -> str:
    if len(args.delimiter) != 1:
        raise UsageError(f"--delimiter must be a single character, got {args.delimiter!r}")
    spec = parse_formula(args.formula).with_reference(args.reference)
    dataset = load_csv(args.data, delimiter=args.delimiter)
    design = build_design_matrix(dataset, spec, drop_missing=args.drop_missing)
    fit = ols_fit(design)
    report = analyze_fit(design, fit, spec, alpha=args.alpha)
    return report.to_json() if args.format == "json" else report.to_text()


def run_simulate(args: argparse.Namespace) -> str:
    cfg = SimConfig(
        n0=args.n0,
        n1=args.n1,
        k=args.k,
        beta=tuple(args.beta),
        sigma=args.sigma,
        alpha=args.alpha,
        reps=args.reps,
        seed=args.seed,
        fixed_design=args.fixed_design,
    )
    return simulation_json(run_simulation(cfg))


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = run_analyze(args) if args.command == "analyze" else run_simulate(args)
    except RegEffectError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return exc.exit_code
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
