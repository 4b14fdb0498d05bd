"""Command line front end: run, critical, compare, validate.

Exit codes are a stable contract:

    0  success
    1  usage error (bad arguments, missing or incompatible files)
    2  configuration or model validation error
    3  hypothesis violation (background fails the positivity condition)
    4  numerical failure (positivity loss, inconsistent identities)
    5  non-convergence (iteration budget or comparison threshold exceeded)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import RunConfig, parse_config, with_overrides
from .errors import (ConfigError, FlowDomainError, HypothesisViolationError,
                     InconsistencyError, JFlowError, NonConvergenceError,
                     PositivityError, SnapshotFormatError, ValidationError)
from .flow import run as run_flow
from .functionals import CSV_COLUMNS
from .hermitian import Herm2
from .model import model_from_values
from .oracle import (build_ma_problem, compare_with_flow, critical_chi,
                     entry_differences, newton_solve)
from .snapshots import read_snapshot, write_form_field, write_scalar_field

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_HYPOTHESIS = 3
EXIT_NUMERICAL = 4
EXIT_NONCONVERGENCE = 5

DEFAULT_COMPARE_THRESHOLD = 1e-5
NEWTON_TOL = 1e-11
NEWTON_MAX_ITER = 30


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_series_csv(path, records) -> None:
    """Fixed-header CSV, every float printed with 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(",".join(_fmt(v) for v in rec.row()) + "\n")


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    return parse_config(text)


def _build_model(cfg: RunConfig):
    return model_from_values(cfg.grid, cfg.g_values, cfg.h_values,
                             cfg.psi0_modes)


def _resolve_workers(args) -> int:
    value = args.workers
    if value is None:
        value = os.environ.get("JFLOW_WORKERS", "1")
    workers = int(value)
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    return workers


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    _resolve_workers(args)
    overrides = {}
    if args.output is not None:
        overrides["output_dir"] = args.output
    if args.snapshot_every is not None:
        overrides["snapshot_interval"] = args.snapshot_every
    if overrides:
        cfg = with_overrides(cfg, **overrides)
    model = _build_model(cfg)

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def snapshot_sink(step, state):
        write_scalar_field(out / f"phi_{step:06d}.jfld", state.phi)

    try:
        result = run_flow(model, cfg, snapshot_sink=snapshot_sink,
                          quiet=args.quiet)
    except FlowDomainError as err:
        if err.state is not None:
            write_scalar_field(out / "phi_postmortem.jfld", err.state.phi)
            write_form_field(out / "chi_postmortem.jfld", err.state.chi)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    write_series_csv(out / "series.csv", result.records)
    write_summary(out / "summary.json", result.summary)
    write_scalar_field(out / "phi_final.jfld", result.state.phi)
    write_form_field(out / "chi_final.jfld", result.state.chi)

    violations = sum(v for k, v in result.summary.items()
                     if k.startswith("violations_"))
    if not args.quiet:
        status = "converged" if result.converged else "timed out"
        print(f"run {status} at t={result.summary['final_t']:.6g} "
              f"({result.summary['steps']} steps, "
              f"{violations} violations); wrote {out}/series.csv")
    if not result.converged:
        return EXIT_NONCONVERGENCE
    if violations > 0:
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_critical(args) -> int:
    cfg = _load_config(args.config)
    _resolve_workers(args)
    if args.output is not None:
        cfg = with_overrides(cfg, output_dir=args.output)
    model = _build_model(cfg)
    problem = build_ma_problem(model)

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def write_residuals(residuals):
        with open(out / "newton_residuals.csv", "w") as fh:
            fh.write("iteration,sup_residual\n")
            for i, r in enumerate(residuals):
                fh.write(f"{i},{_fmt(r)}\n")

    try:
        result = newton_solve(problem, tol=NEWTON_TOL,
                              max_iter=NEWTON_MAX_ITER, quiet=args.quiet)
    except NonConvergenceError as err:
        write_residuals(err.residuals)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    chi = critical_chi(model, result.phi)
    write_scalar_field(out / "phi_ma.jfld", result.phi)
    write_form_field(out / "chi_ma.jfld", chi)
    write_residuals(result.residuals)
    if not args.quiet:
        print(f"critical metric solved in {result.iterations} iterations "
              f"(residual {result.residuals[-1]:.3e}); wrote {out}/chi_ma.jfld")
    return EXIT_OK


def _find_chi_snapshot(directory) -> Path:
    d = Path(directory)
    for name in ("chi_final.jfld", "chi_ma.jfld"):
        candidate = d / name
        if candidate.is_file():
            return candidate
    raise ConfigError(
        f"{directory}: no chi snapshot found (expected chi_final.jfld "
        "or chi_ma.jfld)")


def cmd_compare(args) -> int:
    # Missing inputs, non-form snapshots and grid mismatches are usage
    # errors for this subcommand, not validation failures.
    try:
        path_a = _find_chi_snapshot(args.dir_a)
        path_b = _find_chi_snapshot(args.dir_b)
        chi_a = read_snapshot(path_a)
        chi_b = read_snapshot(path_b)
        for path, chi in ((path_a, chi_a), (path_b, chi_b)):
            if not isinstance(chi, Herm2):
                raise ConfigError(f"{path}: not a matrix field snapshot")
        diff = compare_with_flow(chi_a, chi_b)
    except (ConfigError, ValidationError, SnapshotFormatError,
            FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    breakdown = entry_differences(chi_a, chi_b)
    print(f"sup entry difference: {diff:.6e}")
    for name, value in breakdown.items():
        print(f"  {name}: {value:.6e}")
    if diff <= args.threshold:
        print(f"within threshold {args.threshold:g}")
        return EXIT_OK
    print(f"exceeds threshold {args.threshold:g}", file=sys.stderr)
    return EXIT_NONCONVERGENCE


def cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    model = _build_model(cfg)
    if not args.quiet:
        print(f"config ok: grid {model.shape}, class ratio c = {model.c!r} "
              "(normalized)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jflow",
        description="Flow integration, critical-metric solves and "
                    "cross-checks on flat complex 2-tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--output", help="override output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="data-parallel width hint (JFLOW_WORKERS)")
        p.add_argument("--quiet", action="store_true")

    p_run = sub.add_parser("run", help="integrate the flow")
    add_common(p_run)
    p_run.add_argument("--snapshot-every", type=int, default=None,
                       help="write a potential snapshot every K steps")
    p_run.set_defaults(func=cmd_run)

    p_crit = sub.add_parser("critical",
                            help="solve the reduced Monge-Ampere equation")
    add_common(p_crit)
    p_crit.set_defaults(func=cmd_critical)

    p_cmp = sub.add_parser("compare", help="compare two chi snapshots")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.add_argument("--threshold", type=float,
                       default=DEFAULT_COMPARE_THRESHOLD)
    p_cmp.add_argument("--quiet", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="parse and validate a config")
    add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except HypothesisViolationError as err:
        print(f"error (hypothesis violation): {err}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConfigError, ValidationError) as err:
        print(f"error (validation): {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FlowDomainError, PositivityError, InconsistencyError,
            SnapshotFormatError) as err:
        print(f"error (numerical): {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NonConvergenceError as err:
        print(f"error (non-convergence): {err}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except JFlowError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
