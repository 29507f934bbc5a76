"""Acceptance gate: one test and one printed pass/fail line per criterion.

Each criterion is evaluated at its stated tolerance and prints a single
summary line (visible regardless of capture settings) before asserting, so
a full run always shows the per-criterion verdict table.
"""

from __future__ import annotations

import dataclasses
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from qgrkit import (
    PhysicalConstants,
    ReportDocument,
    anti_geomutator,
    build_hamiltonian,
    build_position,
    build_scenario,
    build_structure,
    gac_1d_closed_forms,
    gaussian_packet,
    geometric_ccr_residual,
    geomutator,
    lift_product_checks,
    load_config_file,
    make_grid,
    ms_d_product_rule_residual,
    qgr_report,
    run_suite,
    schrodinger_terms,
    second_moment_bound,
    variance,
    zero_structure,
)
from qgrkit.dynamics import HamiltonianSpec
from qgrkit.operators import DerivativeScheme
from qgrkit.scenarios import _random_hermitian
from qgrkit.structure import STRUCTURE_FAMILIES

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

BATTERY_GRID_POINTS = 64
BATTERY_PAIRS_PER_STRUCTURE = 34
BATTERY_SEED = 42


def _announce(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] criterion {number}: {detail}")


def _battery_ensemble():
    """The criterion-2 ensemble: seeded Hermitian pairs on a 64-point grid
    under the three reference structure fields."""
    grid = make_grid(-20.0, 20.0, BATTERY_GRID_POINTS, "periodic")
    structures = [
        zero_structure(grid),
        build_structure(grid, "sine", amplitude=0.1, wavenumber=1.0),
        build_structure(grid, "linear", amplitude=0.2),
    ]
    psi = gaussian_packet(grid)
    rng = np.random.default_rng(BATTERY_SEED)
    pairs = []
    for sf in structures:
        for index in range(BATTERY_PAIRS_PER_STRUCTURE):
            a = _random_hermitian(rng, grid, f"A{index}")
            b = _random_hermitian(rng, grid, f"B{index}")
            pairs.append((sf, a, b))
    return grid, psi, pairs


@pytest.fixture(scope="module")
def battery_ensemble():
    return _battery_ensemble()


def test_criterion_1_reduction_suite(capsys):
    """Zero structure field: the canonical pair saturates the uncertainty
    floor and every geometric quantity vanishes."""
    started = time.perf_counter()
    cfg = load_config_file(str(CONFIG_DIR / "reduction.json"))
    scenario = build_scenario(cfg)
    suite = run_suite(scenario)
    elapsed = time.perf_counter() - started

    report = suite.report
    product = float(
        np.sqrt(report.sigma2_A.real) * np.sqrt(report.sigma2_B.real)
    )
    geometric = {
        "G": float(np.max(np.abs(geomutator(scenario.structure, scenario.A, scenario.B).matrix))),
        "Z": float(np.max(np.abs(anti_geomutator(scenario.structure, scenario.A, scenario.B).matrix))),
        "rho_A": abs(report.rho_A),
        "rho_B": abs(report.rho_B),
        "Theta": abs(report.Theta),
        "theta": abs(report.theta),
        "vartheta": abs(report.vartheta),
        "epsilon_mode_difference": abs(report.epsilon_mode_difference),
    }
    worst_geometric = max(geometric.values())
    ok = (
        suite.fail_count == 0
        and abs(product - 0.5) <= 1e-6
        and worst_geometric <= 1e-12
        and elapsed < 5.0
    )
    _announce(
        capsys,
        1,
        ok,
        f"sigma_x*sigma_p={product:.9f}, worst geometric quantity "
        f"{worst_geometric:.2e}, {suite.pass_count}/{len(suite.checks)} checks, "
        f"{elapsed:.2f}s",
    )
    assert suite.fail_count == 0
    assert abs(product - 0.5) <= 1e-6
    assert worst_geometric <= 1e-12, geometric
    assert elapsed < 5.0


def test_criterion_2_algebraic_battery(capsys, battery_ensemble):
    """Every exact-algebraic identity holds at 1e-10 across more than one
    hundred seeded Hermitian pairs and three structure fields."""
    from qgrkit import algebra_battery

    started = time.perf_counter()
    grid, psi, pairs = battery_ensemble
    structures = []
    for sf, _, _ in pairs:
        if not any(existing is sf for existing in structures):
            structures.append(sf)
    hamiltonian = build_hamiltonian(
        grid, DerivativeScheme("fd4"), HamiltonianSpec("classical", None)
    )
    battery = algebra_battery(
        grid,
        structures,
        psi,
        hamiltonian,
        pairs_per_structure=BATTERY_PAIRS_PER_STRUCTURE,
        seed=BATTERY_SEED,
        tolerance=1e-10,
    )
    elapsed = time.perf_counter() - started
    ok = (
        battery.pair_count >= 100
        and battery.fail_count == 0
        and elapsed < 60.0
    )
    _announce(
        capsys,
        2,
        ok,
        f"{battery.pair_count} pairs, {battery.check_count} checks, "
        f"{battery.fail_count} failures, worst {battery.worst_name} "
        f"rel={battery.worst_rel:.2e}, {elapsed:.1f}s",
    )
    assert battery.pair_count >= 100
    assert battery.fail_count == 0, battery.failures
    assert elapsed < 60.0


@pytest.mark.xfail(
    reason=(
        "The shorter printed forms of the lifted product identities drop a "
        "term quadratic in the shift operators (the commutator/product of "
        "u = A M_s and v = B M_s). The full identities, with that term "
        "restored, hold at machine precision and are asserted by the "
        "battery; the difference between the short and full forms is "
        "itself pinned to exactly that dropped term. The short forms are "
        "therefore reported as diagnostics, never gated."
    ),
    strict=True,
)
def test_criterion_2_lift_product_short_forms_as_printed(periodic_grid, random_hermitian):
    sf = build_structure(periodic_grid, "sine", amplitude=0.1)
    a = random_hermitian(periodic_grid, "A")
    b = random_hermitian(periodic_grid, "B")
    checks = lift_product_checks(a, b, sf, tolerance=1e-10)
    assert all(r.passed for r in checks["printed"])


def test_criterion_3_positivity(capsys, battery_ensemble):
    """Adjoint-consistent excess is nonnegative, and the two classical
    lower bounds hold, across the full criterion-2 ensemble."""
    grid, psi, pairs = battery_ensemble
    worst_eps = np.inf
    worst_delta = np.inf
    worst_robertson = np.inf
    for sf, a, b in pairs:
        report = qgr_report(a, b, sf, psi, inner_product_mode="adjoint-consistent")
        worst_eps = min(worst_eps, report.epsilon_adjoint.real)
        terms = schrodinger_terms(a, b, psi)
        worst_delta = min(worst_delta, terms.delta)
        sigma_a = np.sqrt(variance(a, psi)[0].real)
        sigma_b = np.sqrt(variance(b, psi)[0].real)
        worst_robertson = min(
            worst_robertson, sigma_a * sigma_b - terms.robertson_C
        )
    ok = worst_eps >= -1e-10 and worst_delta >= -1e-10 and worst_robertson >= -1e-10
    _announce(
        capsys,
        3,
        ok,
        f"min adjoint epsilon {worst_eps:.2e}, min delta {worst_delta:.2e}, "
        f"min Robertson slack {worst_robertson:.2e} over {len(pairs)} pairs",
    )
    assert worst_eps >= -1e-10
    assert worst_delta >= -1e-10
    assert worst_robertson >= -1e-10


def test_criterion_4_continuum_convergence(capsys):
    """Grid-refinement orders for the commutation relation of the
    geometric momentum, both closed anticommutator forms, and the
    derivative product rule; spectral accuracy floor at 256 points."""
    constants = PhysicalConstants()
    sizes = (128, 256, 512, 1024)
    bands = {"fd2": (2.0, 0.5), "fd4": (4.0, 0.7)}

    def residuals_for(scheme_kind: str, n: int) -> dict[str, float]:
        grid = make_grid(-20.0, 20.0, n, "periodic")
        scheme = DerivativeScheme(scheme_kind)
        sf = build_structure(grid, "sine", amplitude=0.1, wavenumber=1.0)
        psi = gaussian_packet(grid)
        return {
            "geometric_ccr": geometric_ccr_residual(
                sf, scheme, constants, psi, 0.5
            ).rel_residual,
            "ms_d_product_rule": ms_d_product_rule_residual(
                sf, scheme, psi, 0.5
            ).rel_residual,
            "gac_closed_form_geomentum": gac_1d_closed_forms(
                sf, scheme, constants, psi, momentum_kind="geomentum", tolerance=0.5
            ).rel_residual,
            "gac_closed_form_classical": gac_1d_closed_forms(
                sf, scheme, constants, psi, momentum_kind="classical", tolerance=0.5
            ).rel_residual,
        }

    failures = []
    summary_bits = []
    for scheme_kind, (target, width) in bands.items():
        table = [residuals_for(scheme_kind, n) for n in sizes]
        for check in table[0]:
            values = np.array([row[check] for row in table])
            orders = np.log2(values[:-1] / values[1:])
            mean_order = float(np.mean(orders))
            if abs(mean_order - target) > width:
                failures.append(f"{scheme_kind}/{check}: order {mean_order:.2f}")
            summary_bits.append(f"{scheme_kind}:{check.split('_')[0]}={mean_order:.2f}")

    spectral_rows = residuals_for("spectral", 256)
    spectral_worst = max(spectral_rows.values())
    if spectral_worst > 1e-8:
        failures.append(f"spectral worst {spectral_worst:.2e}")

    ok = not failures
    _announce(
        capsys,
        4,
        ok,
        f"orders within bands (fd2 2.0±0.5, fd4 4.0±0.7), spectral worst "
        f"{spectral_worst:.2e} at n=256",
    )
    assert not failures, failures


def test_criterion_5_equal_operator_excess_vanishes(capsys):
    """With both observables equal to position, the adjoint-consistent
    excess collapses for every structure family."""
    grid = make_grid(-20.0, 20.0, 256, "periodic")
    psi = gaussian_packet(grid)
    x = build_position(grid)
    worst = 0.0
    for family in STRUCTURE_FAMILIES:
        sf = (
            zero_structure(grid)
            if family == "zero"
            else build_structure(grid, family, amplitude=0.1)
        )
        report = qgr_report(x, x, sf, psi, inner_product_mode="adjoint-consistent")
        worst = max(worst, abs(report.epsilon))
    ok = worst <= 1e-10
    _announce(
        capsys,
        5,
        ok,
        f"max |epsilon| {worst:.2e} over {len(STRUCTURE_FAMILIES)} families",
    )
    assert worst <= 1e-10


def test_criterion_6_second_moment_bound(capsys, battery_ensemble):
    """Product of second moments dominates the commutator and
    anticommutator means across the criterion-2 ensemble."""
    grid, psi, pairs = battery_ensemble
    worst = np.inf
    for _, a, b in pairs:
        check = second_moment_bound(a, b, psi)
        worst = min(worst, check.slack)
    ok = worst >= -1e-10
    _announce(capsys, 6, ok, f"min slack {worst:.2e} over {len(pairs)} pairs")
    assert worst >= -1e-10


def test_criterion_7_momentum_gap_term(capsys):
    """The momentum gap term matches the variance split at 1e-10; the
    five-term expansion is carried in the report as a diagnostic only."""
    cfg = load_config_file(str(CONFIG_DIR / "sine.json"))
    suite = run_suite(build_scenario(cfg))
    master = next(
        c for c in suite.checks if c.name == "rho_momentum_function_master"
    )
    document = json.loads(ReportDocument.from_suite(suite).to_json())
    diag_names = {d["name"] for d in document["results"]["diagnostics"]}
    expansion_reported = "curvature_expansion_printed" in diag_names
    expansion = next(
        d for d in suite.diagnostics if d.name == "curvature_expansion_printed"
    )
    ok = master.passed and master.rel_residual <= 1e-10 and expansion_reported
    _announce(
        capsys,
        7,
        ok,
        f"master identity rel={master.rel_residual:.2e}, five-term expansion "
        f"rel={expansion.rel_residual:.2e} reported as diagnostic",
    )
    assert master.passed
    assert master.rel_residual <= 1e-10
    assert expansion_reported


def test_criterion_8_selftest_determinism(capsys, tmp_path):
    """Two full selftest runs with one seed emit byte-identical JSON."""
    outputs = []
    for index in range(2):
        target = tmp_path / f"selftest_{index}.json"
        completed = subprocess.run(
            [
                sys.executable,
                "-m",
                "qgrkit.cli",
                "selftest",
                "--seed",
                "42",
                "--out",
                str(target),
            ],
            capture_output=True,
            text=True,
            timeout=600,
        )
        assert completed.returncode == 0, completed.stdout + completed.stderr
        outputs.append(target.read_bytes())
    ok = outputs[0] == outputs[1]
    _announce(
        capsys,
        8,
        ok,
        f"two selftest reports byte-identical ({len(outputs[0])} bytes)",
    )
    assert outputs[0] == outputs[1]


def test_criterion_9_selftest_runtime(capsys):
    """Quick selftest under a minute; the full matrix under ten."""
    from qgrkit.cli import main

    started = time.perf_counter()
    quick_code = main(["selftest", "--quick"])
    quick_elapsed = time.perf_counter() - started

    started = time.perf_counter()
    full_code = main(["selftest"])
    full_elapsed = time.perf_counter() - started

    ok = (
        quick_code == 0
        and full_code == 0
        and quick_elapsed < 60.0
        and full_elapsed < 600.0
    )
    _announce(
        capsys,
        9,
        ok,
        f"quick {quick_elapsed:.1f}s (< 60s), full {full_elapsed:.1f}s (< 600s)",
    )
    assert quick_code == 0
    assert full_code == 0
    assert quick_elapsed < 60.0
    assert full_elapsed < 600.0
