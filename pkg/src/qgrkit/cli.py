"""Command-line surface: verify scenarios, run sweeps, and self-test.

Exit codes are a stable contract: 0 when every asserted identity passes,
1 when any identity fails, 2 for usage, configuration, or I/O problems.
All randomness flows from ``--seed`` (default 42) and reports embed the
seed, so identical invocations produce byte-identical report files.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .errors import ConfigError, ToolkitError
from .geomertainty import IP_MODES, LIFT_MODES
from .report import (
    REPORT_VERSION,
    ReportDocument,
    canonical_json,
    format_number,
    sweep_csv_text,
)
from .scenarios import (
    ScenarioConfig,
    SuiteResult,
    build_scenario,
    load_config_file,
    run_suite,
    sweep_rows,
)

__all__ = ["main", "build_parser", "selftest_configs"]

_CHECK_COLUMNS = (
    "name",
    "kind",
    "lhs_norm",
    "rhs_norm",
    "abs_residual",
    "rel_residual",
    "tolerance",
    "pass",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgrkit",
        description=(
            "Verify the deformed-bracket operator identities and the "
            "generalized uncertainty accounting on discretized 1-D systems."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser(
        "verify", help="run the full identity suite for one scenario config"
    )
    verify.add_argument("--config", required=True, help="path to a JSON scenario file")
    verify.add_argument("--out", help="write the report here (default: stdout)")
    verify.add_argument(
        "--format", choices=("json", "csv"), default="json",
        help="report format: full JSON document or a CSV checks table",
    )
    verify.add_argument("--seed", type=int, help="override the config seed")
    verify.add_argument(
        "--mode", choices=IP_MODES, help="override the inner-product mode"
    )
    verify.add_argument(
        "--lift", choices=LIFT_MODES, help="override the lift mode"
    )
    verify.add_argument(
        "--plot", action="store_true",
        help="also render the residual chart to a PNG next to the report",
    )

    sweep = sub.add_parser(
        "sweep", help="tabulate the uncertainty budget along one config parameter"
    )
    sweep.add_argument("--config", required=True, help="path to a JSON scenario file")
    sweep.add_argument(
        "--param", required=True, help="dotted config path, e.g. structure.amplitude"
    )
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument(
        "--no-plot", action="store_true",
        help="skip the PNG figure normally written next to the CSV",
    )

    selftest = sub.add_parser(
        "selftest", help="run the built-in scenario matrix end to end"
    )
    selftest.add_argument(
        "--quick", action="store_true", help="restrict the matrix to 128-point grids"
    )
    selftest.add_argument("--seed", type=int, default=42)
    selftest.add_argument("--out", help="write the aggregate JSON report here")
    selftest.add_argument(
        "--inject-tolerance", type=float, default=None,
        help="negative control: override the algebraic tolerance (for instance "
        "1e-30) so the run must fail and exit 1",
    )
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _human_lines(suite: SuiteResult) -> str:
    lines = []
    for res in suite.checks:
        status = "PASS" if res.passed else "FAIL"
        lines.append(
            f"  [{status}] {res.name}: rel={res.rel_residual:.3e} "
            f"tol={res.tolerance:.1e} ({res.kind})"
        )
    lines.append(
        f"checks: {suite.pass_count} passed, {suite.fail_count} failed"
    )
    return "\n".join(lines) + "\n"


def _checks_csv(suite: SuiteResult) -> str:
    lines = [",".join(_CHECK_COLUMNS)]
    for res in suite.checks:
        lines.append(
            ",".join(
                (
                    res.name,
                    res.kind,
                    format_number(res.lhs_norm),
                    format_number(res.rhs_norm),
                    format_number(res.abs_residual),
                    format_number(res.rel_residual),
                    format_number(res.tolerance),
                    "true" if res.passed else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"


def _cmd_verify(args: argparse.Namespace) -> int:
    config = load_config_file(args.config)
    if args.mode is not None:
        config = replace(config, inner_product=args.mode)
    if args.lift is not None:
        config = replace(config, lift=args.lift)
    suite = run_suite(build_scenario(config), seed=args.seed)

    if args.format == "json":
        text = ReportDocument.from_suite(suite).to_json()
    else:
        text = _checks_csv(suite)
    _emit(text, args.out)

    human = sys.stdout if args.out is not None else sys.stderr
    human.write(_human_lines(suite))

    if args.plot:
        from .plotting import plot_residuals

        base = Path(args.out) if args.out else Path("qgr_report.json")
        png = base.with_name(base.stem + "_residuals.png")
        plot_residuals(suite.checks, str(png))
        human.write(f"residual chart written to {png}\n")
    return 0 if suite.fail_count == 0 else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config_file(args.config)
    rows = sweep_rows(config, args.param, args.start, args.stop, args.steps)
    Path(args.out).write_text(sweep_csv_text(rows), encoding="utf-8")
    sys.stdout.write(f"{len(rows)} rows written to {args.out}\n")
    if not args.no_plot:
        from .plotting import plot_sweep

        png = Path(args.out).with_suffix(".png")
        plot_sweep(rows, args.param, str(png))
        sys.stdout.write(f"figure written to {png}\n")
    return 0


def selftest_configs(quick: bool = False, seed: int = 42) -> list[ScenarioConfig]:
    """The built-in matrix: 3 structure families x 2 schemes x 2 modes."""
    from .scenarios import StructureSpec

    n = 128 if quick else 256
    families = (
        StructureSpec(family="zero"),
        StructureSpec(family="sine", amplitude=0.1, wavenumber=1.0),
        StructureSpec(family="linear", amplitude=0.2),
    )
    configs = []
    for structure in families:
        for scheme in ("fd4", "spectral"):
            for mode in IP_MODES:
                configs.append(
                    ScenarioConfig(
                        n=n,
                        boundary="periodic",
                        scheme=scheme,
                        structure=structure,
                        inner_product=mode,
                        seed=seed,
                    )
                )
    return configs


def _cmd_selftest(args: argparse.Namespace) -> int:
    configs = selftest_configs(quick=args.quick, seed=args.seed)
    if args.inject_tolerance is not None:
        configs = [
            replace(cfg, algebraic_tol=float(args.inject_tolerance))
            for cfg in configs
        ]
    suites = []
    total_checks = 0
    total_fails = 0
    distinct: set[str] = set()
    for cfg in configs:
        suite = run_suite(build_scenario(cfg), seed=args.seed)
        suites.append(suite)
        total_checks += len(suite.checks)
        total_fails += suite.fail_count
        distinct.update(res.name for res in suite.checks)
        status = "PASS" if suite.fail_count == 0 else "FAIL"
        worst = max(suite.checks, key=lambda r: r.rel_residual)
        sys.stdout.write(
            f"[{status}] {cfg.structure.family}/{cfg.scheme}/{cfg.inner_product}: "
            f"{suite.pass_count}/{len(suite.checks)} checks, "
            f"worst {worst.name} rel={worst.rel_residual:.2e}\n"
        )
    sys.stdout.write(
        f"selftest: {len(suites)} scenarios, {total_checks} checks "
        f"({len(distinct)} distinct), {total_fails} failures\n"
    )
    if args.out:
        document = {
            "version": REPORT_VERSION,
            "seed": args.seed,
            "quick": args.quick,
            "distinct_checks": sorted(distinct),
            "scenarios": [suite.to_dict() for suite in suites],
            "summary": {
                "scenario_count": len(suites),
                "check_count": total_checks,
                "fail_count": total_fails,
            },
        }
        Path(args.out).write_text(canonical_json(document), encoding="utf-8")
        sys.stdout.write(f"report written to {args.out}\n")
    return 0 if total_fails == 0 else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_selftest(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ToolkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover - exercised via console script
    sys.exit(main())
