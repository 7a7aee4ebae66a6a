"""Command-line surface: run, verify, convergence, sweep.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 solver abort.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .driver import run, verification_table
from .mms import manufactured_case
from .verify import representation_residual
from .scenario import (
    ConfigError,
    ConvergenceLevel,
    ConvergenceReport,
    Scenario,
    emit_snapshot,
    emit_timeseries,
    load_config,
)

__all__ = ["main", "cmd_run", "cmd_verify", "cmd_convergence", "cmd_sweep"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_ABORT = 3

MIN_SPATIAL_ORDER = 1.7
ROUNDING_FLOOR = 1e-12


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _load(config_path: str) -> Scenario:
    return load_config(config_path)


def cmd_run(config_path: str, out_dir: str) -> int:
    """Run one scenario; write timeseries.csv and snapshot.csv to out_dir."""
    try:
        scenario = _load(config_path)
    except (ConfigError, OSError) as exc:
        return _fail_usage(str(exc))
    result = run(scenario)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_timeseries(result.report, out / "timeseries.csv")
    emit_snapshot(result.state, result.grid, out / "snapshot.csv")
    if result.report.status == "aborted":
        print(
            f"aborted: {result.report.abort_reason} at t = {result.state.t:.6g}; "
            f"partial diagnostics in {out}",
            file=sys.stderr,
        )
        return EXIT_ABORT
    print(
        f"completed t = {result.state.t:.6g}: {len(result.report.rows)} output rows, "
        f"{result.report.halvings} halvings, wrote {out / 'timeseries.csv'}"
    )
    return EXIT_OK


def cmd_verify(config_path: str) -> int:
    """Run the scenario and print the PASS/FAIL table of invariant checks."""
    try:
        scenario = _load(config_path)
    except (ConfigError, OSError) as exc:
        return _fail_usage(str(exc))
    if scenario.mms is not None:
        return _fail_usage(
            "verify needs a physical scenario; manufactured sources break the "
            "conservation identities by design"
        )
    result = run(scenario)
    if result.report.status == "aborted":
        print(
            f"aborted: {result.report.abort_reason} at t = {result.state.t:.6g}",
            file=sys.stderr,
        )
        return EXIT_ABORT
    checks = verification_table(result)
    width = max(len(check.name) for check in checks)
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{check.name:<{width}}  {status}  {check.detail}")
    failed = [check for check in checks if not check.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY_FAIL if failed else EXIT_OK


def _observed_orders(errors: list[float]) -> tuple[float, ...]:
    return tuple(
        math.log2(coarse / fine) for coarse, fine in zip(errors, errors[1:])
    )


def cmd_convergence(config_path: str, levels: int) -> int:
    """Nested-refinement study against the manufactured solution."""
    try:
        scenario = _load(config_path)
    except (ConfigError, OSError) as exc:
        return _fail_usage(str(exc))
    if scenario.mms is None:
        return _fail_usage("convergence needs a config with an mms case")
    if levels < 3:
        return _fail_usage(f"need at least 3 refinement levels, got {levels}")

    case = manufactured_case(scenario.mms, scenario.params)
    level_results: list[ConvergenceLevel] = []
    for k in range(levels):
        n = scenario.n_cells * 2**k
        dx = 1.0 / n
        refined = replace(scenario, n_cells=n, dt_max=dx * dx)
        result = run(refined)
        if result.report.status == "aborted":
            print(
                f"aborted at level n_cells = {n}: {result.report.abort_reason}",
                file=sys.stderr,
            )
            return EXIT_ABORT
        grid, state = result.grid, result.state
        level_results.append(
            ConvergenceLevel(
                n_cells=n,
                dt=dx * dx,
                max_error_v=float(
                    np.max(np.abs(state.v - case.v(grid.centers, state.t)))
                ),
                max_error_u=float(
                    np.max(np.abs(state.u - case.u(grid.nodes, state.t)))
                ),
                max_error_theta=float(
                    np.max(np.abs(state.theta - case.theta(grid.centers, state.t)))
                ),
            )
        )

    floors = all(
        max(lv.max_error_v, lv.max_error_u, lv.max_error_theta) < ROUNDING_FLOOR
        for lv in level_results
    )
    orders = {
        field: _observed_orders([getattr(lv, f"max_error_{field}") for lv in level_results])
        if not floors
        else ()
        for field in ("v", "u", "theta")
    }
    report = ConvergenceReport(
        levels=tuple(level_results), orders=orders, at_rounding_floor=floors
    )

    print(f"{'n_cells':>8} {'dt':>12} {'err_v':>12} {'err_u':>12} {'err_theta':>12}")
    for lv in report.levels:
        print(
            f"{lv.n_cells:>8} {lv.dt:>12.4e} {lv.max_error_v:>12.4e} "
            f"{lv.max_error_u:>12.4e} {lv.max_error_theta:>12.4e}"
        )
    if report.at_rounding_floor:
        print("errors at rounding floor (exact manufactured solution); "
              "order check skipped")
        return EXIT_OK
    for field, seq in report.orders.items():
        formatted = ", ".join(f"{order:.2f}" for order in seq)
        print(f"observed order {field}: {formatted}")
    min_order = report.min_order()
    print(f"min observed order {min_order:.2f} (required >= {MIN_SPATIAL_ORDER})")
    return EXIT_OK if min_order >= MIN_SPATIAL_ORDER else EXIT_VERIFY_FAIL


def _parse_float_list(text: str, label: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad {label} list {text!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"{label} list is empty")
    return values


def cmd_sweep(config_path: str, alphas: str, betas: str, out_dir: str) -> int:
    """Run the alpha x beta grid concurrently; one timeseries per pair."""
    try:
        scenario = _load(config_path)
        alpha_list = _parse_float_list(alphas, "alpha")
        beta_list = _parse_float_list(betas, "beta")
    except (ConfigError, OSError) as exc:
        return _fail_usage(str(exc))
    if any(a < 0.0 for a in alpha_list) or any(b <= 0.0 for b in beta_list):
        return _fail_usage(
            "sweep lists violate the admissible regime (alpha >= 0 and beta > 0)"
        )

    pairs = [(a, b) for a in alpha_list for b in beta_list]
    scenarios = [
        replace(scenario, params=replace(scenario.params, alpha=a, beta=b))
        for a, b in pairs
    ]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=min(len(pairs), 8)) as pool:
        results = list(pool.map(run, scenarios))

    summary = ["alpha,beta,status,min_v,min_theta,repr_residual"]
    aborted = 0
    for (a, b), result in zip(pairs, results):
        emit_timeseries(result.report, out / f"run_alpha{a:g}_beta{b:g}.csv")
        if result.report.status == "aborted":
            aborted += 1
        residual = representation_residual(
            result.state, result.accumulator, result.grid, result.scenario.params.alpha
        )
        summary.append(
            f"{a:.17g},{b:.17g},{result.report.status},"
            f"{result.tracker.min_v:.17g},{result.tracker.min_theta:.17g},"
            f"{residual:.17g}"
        )
    (out / "summary.csv").write_text("\n".join(summary) + "\n")
    print(f"{len(pairs)} runs, {aborted} aborted; summary in {out / 'summary.csv'}")
    return EXIT_ABORT if aborted else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lagns",
        description="1-D Lagrangian viscous-gas solver with built-in verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write outputs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="out")

    p_verify = sub.add_parser("verify", help="run and print the invariant table")
    p_verify.add_argument("--config", required=True)

    p_conv = sub.add_parser("convergence", help="manufactured-solution order study")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", type=int, default=3)

    p_sweep = sub.add_parser("sweep", help="run an alpha x beta parameter grid")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--alpha", required=True, help="comma-separated values")
    p_sweep.add_argument("--beta", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", default="sweep")

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out)
    if args.command == "verify":
        return cmd_verify(args.config)
    if args.command == "convergence":
        return cmd_convergence(args.config, args.levels)
    return cmd_sweep(args.config, args.alpha, args.beta, args.out)


if __name__ == "__main__":
    sys.exit(main())
