"""Scenario configuration, materialization, suite execution, and sweeps.

A scenario bundles everything one verification run needs: the grid, the
derivative scheme, physical constants, a prepared state, a structure
field, the observable pair, the Hamiltonian, the mode switches, and the
tolerances.  :func:`load_config` turns a JSON document into a validated
:class:`ScenarioConfig` with defaults filled in and unknown keys rejected;
:func:`build_scenario` materializes it; :func:`run_suite` executes the
full identity battery and returns a deterministic :class:`SuiteResult`.

Tolerance policy: algebraic identities use the configured ``algebraic``
tolerance unchanged.  Continuum identities use ``continuum_base`` scaled
by ``(h / h_ref)^p`` where ``h_ref`` is the spacing of a 512-point grid on
the same domain and ``p`` is the scheme order, so one base budget is
honest across refinement levels; the spectral scheme uses a flat 1e-8
floor instead.
"""

from __future__ import annotations

import copy
import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .brackets import (
    algebra_checks,
    anti_geomutator,
    bracket_bound_report,
    equilibrium_residual,
    gac_bracket,
    geomutator,
    ggc_bracket,
    structure_operator,
)
from .dynamics import (
    HamiltonianSpec,
    build_hamiltonian,
    dynamics_decomposition_residual,
    dynamics_ordering_diagnostic,
)
from .errors import (
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    UnknownParameterError,
)
from .geomertainty import (
    IP_MODES,
    LIFT_MODES,
    MODE_ADJOINT,
    MODE_LITERAL,
    QgrReport,
    dk_ccr_residual,
    entanglement_rho,
    generalized_variance,
    geometric_ccr_residual,
    geometric_lift,
    gac_1d_closed_forms,
    lift_product_checks,
    ms_d_product_rule_residual,
    qgr_report,
    rho_curvature_expansion,
    rho_position_closed_form,
    shifted_to_zero_mean,
    vartheta_geomentum_residual,
)
from .grid import (
    Grid,
    PhysicalConstants,
    WaveFunction,
    gaussian_packet,
    interior_mask,
    make_grid,
)
from .operators import (
    DerivativeScheme,
    Operator,
    SCHEME_KINDS,
    build_multiplication,
    build_geomentum,
    build_momentum_classical,
    build_position,
    compose,
    linear_combine,
    second_moment_bound,
)
from .residuals import (
    IdentityResidual,
    residual_from_operators,
    residual_from_slack,
    residual_from_values,
    residual_from_zero,
)
from .structure import (
    STRUCTURE_FAMILIES,
    StructureFunction,
    build_structure,
    verify_gradient_consistency,
)

__all__ = [
    "PAIR_TOKENS",
    "POTENTIAL_KINDS",
    "StructureSpec",
    "ScenarioConfig",
    "load_config",
    "load_config_file",
    "config_from_dict",
    "Scenario",
    "build_scenario",
    "effective_continuum_tolerance",
    "SuiteResult",
    "run_suite",
    "BatteryResult",
    "algebra_battery",
    "sweep_rows",
    "SWEEP_COLUMNS",
]

PAIR_TOKENS = ("x", "p_classical", "p_geomentum")
POTENTIAL_KINDS = ("zero", "harmonic")

#: Reference refinement level the continuum base tolerance is stated at.
_REFERENCE_POINTS = 512

#: Flat tolerance for spectrally accurate continuum checks.
_SPECTRAL_TOL = 1e-8

#: Fraction of the domain excluded at each edge for interior checks.
_INTERIOR_MARGIN = 0.05

SWEEP_COLUMNS = (
    "param",
    "sigma_x",
    "sigma_p",
    "product",
    "qgr_value",
    "Theta",
    "Xi",
    "epsilon",
    "robertson_C",
    "herm_defect",
)


# ---------------------------------------------------------------------------
# Configuration schema


def _require_mapping(path: str, value: Any) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigValidationError(path, "must be a JSON object")
    return value


def _reject_unknown(path: str, data: dict, allowed: tuple[str, ...]) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigValidationError(
                f"{path}.{key}" if path else str(key), "unknown key"
            )


def _number(path: str, data: dict, key: str, default: float) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"{path}.{key}", "must be a number")
    if not math.isfinite(float(value)):
        raise ConfigValidationError(f"{path}.{key}", "must be finite")
    return float(value)


def _integer(path: str, data: dict, key: str, default: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and float(value).is_integer():
            value = int(value)
        else:
            raise ConfigValidationError(f"{path}.{key}", "must be an integer")
    return int(value)


def _choice(path: str, data: dict, key: str, default: str, allowed: tuple[str, ...]) -> str:
    value = data.get(key, default)
    if value not in allowed:
        raise ConfigValidationError(f"{path}.{key}" if path else key, f"must be one of {allowed}")
    return str(value)


@dataclass(frozen=True)
class StructureSpec:
    """Parameters of a named structure-function family."""

    family: str = "zero"
    amplitude: float = 0.1
    wavenumber: float = 1.0
    width: float = 1.0

    @staticmethod
    def from_mapping(path: str, data: Any, default_family: str = "zero") -> "StructureSpec":
        data = _require_mapping(path, data)
        _reject_unknown(path, data, ("family", "amplitude", "wavenumber", "width"))
        family = _choice(path, data, "family", default_family, STRUCTURE_FAMILIES)
        spec = StructureSpec(
            family=family,
            amplitude=_number(path, data, "amplitude", 0.1),
            wavenumber=_number(path, data, "wavenumber", 1.0),
            width=_number(path, data, "width", 1.0),
        )
        if spec.family == "gauss_bump" and spec.width <= 0:
            raise ConfigValidationError(f"{path}.width", "must be positive")
        return spec

    def build(self, grid: Grid) -> StructureFunction:
        return build_structure(
            grid, self.family, self.amplitude, self.wavenumber, self.width
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "amplitude": self.amplitude,
            "wavenumber": self.wavenumber,
            "width": self.width,
        }


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description with every default made explicit."""

    x_min: float = -20.0
    x_max: float = 20.0
    n: int = 512
    boundary: str = "periodic"
    scheme: str = "fd4"
    hbar: float = 1.0
    mass: float = 1.0
    state_family: str = "gaussian"
    x0: float = 0.0
    p0: float = 0.0
    width: float = 1.0
    structure: StructureSpec = field(default_factory=StructureSpec)
    pair_a: str = "x"
    pair_b: str = "p_geomentum"
    pair_a_custom: StructureSpec | None = None
    pair_b_custom: StructureSpec | None = None
    lift: str = "composition"
    inner_product: str = MODE_LITERAL
    algebraic_tol: float = 1e-10
    continuum_base: float = 1e-3
    kinetic: str = "classical"
    potential: str = "harmonic"
    strength: float = 0.5
    independent_means: bool = False
    seed: int = 42

    def to_dict(self) -> dict[str, Any]:
        pair: dict[str, Any] = {}
        for key, token, custom in (
            ("A", self.pair_a, self.pair_a_custom),
            ("B", self.pair_b, self.pair_b_custom),
        ):
            pair[key] = {"custom_mult": custom.to_dict()} if custom is not None else token
        return {
            "grid": {
                "x_min": self.x_min,
                "x_max": self.x_max,
                "n": self.n,
                "boundary": self.boundary,
            },
            "scheme": self.scheme,
            "constants": {"hbar": self.hbar, "mass": self.mass},
            "state": {
                "family": self.state_family,
                "x0": self.x0,
                "p0": self.p0,
                "width": self.width,
            },
            "structure": self.structure.to_dict(),
            "pair": pair,
            "modes": {"lift": self.lift, "inner_product": self.inner_product},
            "tolerances": {
                "algebraic": self.algebraic_tol,
                "continuum_base": self.continuum_base,
            },
            "hamiltonian": {
                "kinetic": self.kinetic,
                "potential": self.potential,
                "strength": self.strength,
            },
            "independent_means": self.independent_means,
            "seed": self.seed,
        }


_TOP_KEYS = (
    "grid",
    "scheme",
    "constants",
    "state",
    "structure",
    "pair",
    "modes",
    "tolerances",
    "hamiltonian",
    "independent_means",
    "seed",
)


def _parse_pair_member(path: str, value: Any) -> tuple[str, StructureSpec | None]:
    if isinstance(value, str):
        if value not in PAIR_TOKENS:
            raise ConfigValidationError(
                path, f"must be one of {PAIR_TOKENS} or a custom_mult object"
            )
        return value, None
    data = _require_mapping(path, value)
    _reject_unknown(path, data, ("custom_mult",))
    if "custom_mult" not in data:
        raise ConfigValidationError(
            path, f"must be one of {PAIR_TOKENS} or a custom_mult object"
        )
    return "custom_mult", StructureSpec.from_mapping(
        f"{path}.custom_mult", data["custom_mult"], default_family="sine"
    )


def config_from_dict(raw: Any) -> ScenarioConfig:
    """Validate a plain dict against the scenario schema.

    Unknown keys, type mismatches, and out-of-range values raise
    :class:`ConfigValidationError` with the offending field path.
    """
    data = _require_mapping("", raw)
    _reject_unknown("", data, _TOP_KEYS)

    grid = _require_mapping("grid", data.get("grid"))
    _reject_unknown("grid", grid, ("x_min", "x_max", "n", "boundary"))
    n = _integer("grid", grid, "n", 512)
    if n < 8:
        raise ConfigValidationError("grid.n", "must be ≥ 8")
    x_min = _number("grid", grid, "x_min", -20.0)
    x_max = _number("grid", grid, "x_max", 20.0)
    if x_max <= x_min:
        raise ConfigValidationError("grid.x_max", "must exceed grid.x_min")
    boundary = _choice("grid", grid, "boundary", "periodic", ("dirichlet", "periodic"))

    scheme = _choice("", data, "scheme", "fd4", SCHEME_KINDS)
    if scheme == "spectral" and boundary != "periodic":
        raise ConfigValidationError("scheme", "spectral requires a periodic boundary")

    constants = _require_mapping("constants", data.get("constants"))
    _reject_unknown("constants", constants, ("hbar", "mass"))
    hbar = _number("constants", constants, "hbar", 1.0)
    mass = _number("constants", constants, "mass", 1.0)
    if hbar <= 0:
        raise ConfigValidationError("constants.hbar", "must be positive")
    if mass <= 0:
        raise ConfigValidationError("constants.mass", "must be positive")

    state = _require_mapping("state", data.get("state"))
    _reject_unknown("state", state, ("family", "x0", "p0", "width"))
    state_family = _choice("state", state, "family", "gaussian", ("gaussian",))
    width = _number("state", state, "width", 1.0)
    if width <= 0:
        raise ConfigValidationError("state.width", "must be positive")

    structure = StructureSpec.from_mapping("structure", data.get("structure"))

    pair = _require_mapping("pair", data.get("pair"))
    _reject_unknown("pair", pair, ("A", "B"))
    pair_a, pair_a_custom = _parse_pair_member("pair.A", pair.get("A", "x"))
    pair_b, pair_b_custom = _parse_pair_member("pair.B", pair.get("B", "p_geomentum"))

    modes = _require_mapping("modes", data.get("modes"))
    _reject_unknown("modes", modes, ("lift", "inner_product"))
    lift = _choice("modes", modes, "lift", "composition", LIFT_MODES)
    inner = _choice("modes", modes, "inner_product", MODE_LITERAL, IP_MODES)

    tolerances = _require_mapping("tolerances", data.get("tolerances"))
    _reject_unknown("tolerances", tolerances, ("algebraic", "continuum_base"))
    algebraic_tol = _number("tolerances", tolerances, "algebraic", 1e-10)
    continuum_base = _number("tolerances", tolerances, "continuum_base", 1e-3)
    if algebraic_tol <= 0:
        raise ConfigValidationError("tolerances.algebraic", "must be positive")
    if continuum_base <= 0:
        raise ConfigValidationError("tolerances.continuum_base", "must be positive")

    ham = _require_mapping("hamiltonian", data.get("hamiltonian"))
    _reject_unknown("hamiltonian", ham, ("kinetic", "potential", "strength"))
    kinetic = _choice("hamiltonian", ham, "kinetic", "classical", ("classical", "geomentum"))
    potential = _choice("hamiltonian", ham, "potential", "harmonic", POTENTIAL_KINDS)
    strength = _number("hamiltonian", ham, "strength", 0.5)

    independent = data.get("independent_means", False)
    if not isinstance(independent, bool):
        raise ConfigValidationError("independent_means", "must be a boolean")
    seed = _integer("", data, "seed", 42)
    if seed < 0:
        raise ConfigValidationError("seed", "must be nonnegative")

    return ScenarioConfig(
        x_min=x_min,
        x_max=x_max,
        n=n,
        boundary=boundary,
        scheme=scheme,
        hbar=hbar,
        mass=mass,
        state_family=state_family,
        x0=_number("state", state, "x0", 0.0),
        p0=_number("state", state, "p0", 0.0),
        width=width,
        structure=structure,
        pair_a=pair_a,
        pair_b=pair_b,
        pair_a_custom=pair_a_custom,
        pair_b_custom=pair_b_custom,
        lift=lift,
        inner_product=inner,
        algebraic_tol=algebraic_tol,
        continuum_base=continuum_base,
        kinetic=kinetic,
        potential=potential,
        strength=strength,
        independent_means=independent,
        seed=seed,
    )


def load_config(text: str) -> ScenarioConfig:
    """Parse and validate a JSON configuration document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(raw)


def load_config_file(path: str) -> ScenarioConfig:
    """Read a JSON configuration file and validate it."""
    with open(path, "r", encoding="utf-8") as handle:
        return load_config(handle.read())


# ---------------------------------------------------------------------------
# Materialization


@dataclass(frozen=True, eq=False)
class Scenario:
    """Materialized, mutually consistent scenario objects."""

    config: ScenarioConfig
    grid: Grid
    scheme: DerivativeScheme
    constants: PhysicalConstants
    psi: WaveFunction
    structure: StructureFunction
    A: Operator
    B: Operator
    hamiltonian: Operator


def _build_pair_member(
    token: str,
    custom: StructureSpec | None,
    grid: Grid,
    scheme: DerivativeScheme,
    sf: StructureFunction,
    constants: PhysicalConstants,
) -> Operator:
    if token == "x":
        return build_position(grid)
    if token == "p_classical":
        return build_momentum_classical(grid, scheme, constants)
    if token == "p_geomentum":
        return build_geomentum(grid, scheme, sf.s1, constants)
    assert custom is not None
    samples = custom.build(grid).s
    return build_multiplication(grid, samples, label=f"{custom.family}(x)")


def build_scenario(config: ScenarioConfig) -> Scenario:
    """Materialize every object a suite run needs, on one shared grid."""
    grid = make_grid(config.x_min, config.x_max, config.n, config.boundary)
    scheme = DerivativeScheme(config.scheme)
    constants = PhysicalConstants(hbar=config.hbar, mass=config.mass)
    psi = gaussian_packet(grid, config.x0, config.p0, config.width, constants)
    sf = config.structure.build(grid)
    A = _build_pair_member(
        config.pair_a, config.pair_a_custom, grid, scheme, sf, constants
    )
    B = _build_pair_member(
        config.pair_b, config.pair_b_custom, grid, scheme, sf, constants
    )
    spec = HamiltonianSpec(
        kinetic=config.kinetic, potential=_potential_samples(config, grid)
    )
    hamiltonian = build_hamiltonian(grid, scheme, spec, constants, structure=sf)
    return Scenario(
        config=config,
        grid=grid,
        scheme=scheme,
        constants=constants,
        psi=psi,
        structure=sf,
        A=A,
        B=B,
        hamiltonian=hamiltonian,
    )


def _potential_samples(config: ScenarioConfig, grid: Grid) -> np.ndarray | None:
    if config.potential == "zero":
        return None
    return config.strength * grid.points**2


def effective_continuum_tolerance(
    base: float, grid: Grid, scheme: DerivativeScheme
) -> float:
    """Scale the continuum budget to the scenario's refinement level.

    The base budget is stated at a 512-point grid on the same domain; the
    budget grows as ``(h / h_ref)^p`` on coarser grids and shrinks on finer
    ones.  Spectral discretizations use a flat 1e-8 floor instead, and the
    scaled budget is capped at 0.5 so a check can never be passed by an
    order-one discrepancy.
    """
    if scheme.kind == "spectral":
        return _SPECTRAL_TOL
    length = grid.x_max - grid.x_min
    if grid.boundary == "dirichlet":
        h_ref = length / (_REFERENCE_POINTS - 1)
    else:
        h_ref = length / _REFERENCE_POINTS
    return min(0.5, base * (grid.h / h_ref) ** scheme.p)


# ---------------------------------------------------------------------------
# The fuzz battery


@dataclass(frozen=True)
class BatteryResult:
    """Aggregate outcome of the randomized Hermitian-pair battery."""

    pair_count: int
    check_count: int
    fail_count: int
    worst_name: str
    worst_rel: float
    failures: tuple[str, ...]
    elapsed: float

    def to_dict(self) -> dict[str, Any]:
        # elapsed is wall-clock and deliberately left out: serialized
        # battery results must be bit-identical across runs.
        return {
            "pair_count": self.pair_count,
            "check_count": self.check_count,
            "fail_count": self.fail_count,
            "worst_name": self.worst_name,
            "worst_rel": self.worst_rel,
            "failures": list(self.failures),
        }


def _random_hermitian(rng: np.random.Generator, grid: Grid, label: str) -> Operator:
    raw = rng.uniform(-1.0, 1.0, (grid.n, grid.n)) + 1j * rng.uniform(
        -1.0, 1.0, (grid.n, grid.n)
    )
    return Operator(0.5 * (raw + raw.conj().T), label, grid, hermitian_hint=True)


def algebra_battery(
    grid: Grid,
    structures: list[StructureFunction],
    psi: WaveFunction,
    hamiltonian: Operator,
    pairs_per_structure: int = 34,
    seed: int = 42,
    tolerance: float = 1e-10,
) -> BatteryResult:
    """Run the exact-identity battery over random Hermitian pairs.

    For each structure field, ``pairs_per_structure`` independent Hermitian
    pairs are drawn with seeded entries in ``[-1, 1]`` (real and imaginary
    parts) and symmetrized.  Per pair the battery checks the structural
    bracket identities, bilinearity with random complex weights, the exact
    lift-product identities with their defect pinning, the full report
    residual set, the positivity statements, the second-moment bound, and
    the dynamics decomposition.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst_name = ""
    worst_rel = 0.0
    fail_names: list[str] = []
    check_count = 0
    pair_count = 0

    def _absorb(results: list[IdentityResidual]) -> None:
        nonlocal worst_name, worst_rel, check_count
        for res in results:
            check_count += 1
            if res.rel_residual > worst_rel:
                worst_rel = res.rel_residual
                worst_name = res.name
            if not res.passed:
                fail_names.append(res.name)

    for sf in structures:
        for _ in range(pairs_per_structure):
            pair_count += 1
            a = _random_hermitian(rng, grid, "F")
            b = _random_hermitian(rng, grid, "G")
            extra = _random_hermitian(rng, grid, "E")
            alpha = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            beta = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))

            _absorb(algebra_checks(sf, a, b, tolerance))
            combo = linear_combine([(alpha, a), (beta, extra)])
            _absorb([
                residual_from_operators(
                    "ggc_bilinearity_left",
                    ggc_bracket(sf, combo, b).matrix,
                    alpha * ggc_bracket(sf, a, b).matrix
                    + beta * ggc_bracket(sf, extra, b).matrix,
                    tolerance,
                ),
                residual_from_operators(
                    "gac_bilinearity_left",
                    gac_bracket(sf, combo, b).matrix,
                    alpha * gac_bracket(sf, a, b).matrix
                    + beta * gac_bracket(sf, extra, b).matrix,
                    tolerance,
                ),
            ])
            lift_checks = lift_product_checks(a, b, sf, tolerance)
            _absorb(lift_checks["exact"])
            _absorb(lift_checks["defect"])

            report = qgr_report(
                a, b, sf, psi, lift_mode="composition",
                inner_product_mode=MODE_LITERAL, algebraic_tol=tolerance,
            )
            _absorb(report.residuals)
            sigma_a = math.sqrt(max(report.sigma2_A.real, 0.0))
            sigma_b = math.sqrt(max(report.sigma2_B.real, 0.0))
            bound = second_moment_bound(a, b, psi)
            _absorb([
                residual_from_slack(
                    "epsilon_adjoint_nonneg",
                    report.epsilon_adjoint.real,
                    1.0,
                    tolerance,
                ),
                residual_from_slack(
                    "delta_fg_nonneg", report.delta_fg.real, 1.0, tolerance
                ),
                residual_from_slack(
                    "robertson_bound",
                    sigma_a * sigma_b - report.robertson_C,
                    1.0,
                    tolerance,
                ),
                residual_from_slack(
                    "t2_second_moment_bound", bound.slack, 1.0, tolerance
                ),
                dynamics_decomposition_residual(
                    sf, a, hamiltonian, tolerance=tolerance
                ),
            ])

    return BatteryResult(
        pair_count=pair_count,
        check_count=check_count,
        fail_count=len(fail_names),
        worst_name=worst_name,
        worst_rel=worst_rel,
        failures=tuple(sorted(set(fail_names))),
        elapsed=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Suite execution


@dataclass(frozen=True, eq=False)
class SuiteResult:
    """Deterministic outcome of one full scenario verification.

    ``checks`` are asserted identities; ``diagnostics`` are reported-only
    residuals (short-form lift products, the mixed-symbol curvature
    expansion, the swapped advection ordering) that never count toward
    ``fail_count``.  ``wall_time`` is carried as an attribute but excluded
    from serialization so identical runs serialize identically.
    """

    config: ScenarioConfig
    seed: int
    checks: list[IdentityResidual]
    diagnostics: list[IdentityResidual]
    report: QgrReport
    battery: BatteryResult | None
    pass_count: int
    fail_count: int
    wall_time: float

    def to_dict(self) -> dict[str, Any]:
        worst = None
        for res in self.checks:
            if worst is None or res.rel_residual > worst.rel_residual:
                worst = res
        return {
            "config": self.config.to_dict(),
            "seed": self.seed,
            "summary": {
                "pass_count": self.pass_count,
                "fail_count": self.fail_count,
                "check_count": len(self.checks),
                "worst_residual_name": worst.name if worst else "",
                "worst_rel_residual": worst.rel_residual if worst else 0.0,
            },
            "checks": [r.to_dict() for r in self.checks],
            "diagnostics": [r.to_dict() for r in self.diagnostics],
            "report": self.report.to_dict(),
            "battery": self.battery.to_dict() if self.battery else None,
        }


def run_suite(
    scenario: Scenario,
    seed: int | None = None,
    battery_pairs: int = 6,
) -> SuiteResult:
    """Execute the full identity battery for one scenario.

    The check list covers the exact bracket algebra, the corrected
    lift-product identities, the complete report residual set, positivity,
    the magnitude bounds, the mean-shift scenario, the continuum
    identities at scaled tolerance, and a seeded random-pair battery on a
    64-point companion grid.  Checks that require Hermitian observables
    (classical positivity, the Robertson floor) are included exactly when
    the configured pair is Hermitian.
    """
    start = time.perf_counter()
    config = scenario.config
    if seed is None:
        seed = config.seed
    sf = scenario.structure
    psi = scenario.psi
    grid = scenario.grid
    scheme = scenario.scheme
    constants = scenario.constants
    A, B = scenario.A, scenario.B
    tol = config.algebraic_tol
    cont_tol = effective_continuum_tolerance(config.continuum_base, grid, scheme)
    mask = interior_mask(grid, _INTERIOR_MARGIN)

    checks: list[IdentityResidual] = []
    diagnostics: list[IdentityResidual] = []

    # Exact bracket algebra and lift products for the configured pair.
    checks.extend(algebra_checks(sf, A, B, tol))
    lift_checks = lift_product_checks(A, B, sf, tol)
    checks.extend(lift_checks["exact"])
    checks.extend(lift_checks["defect"])
    diagnostics.extend(lift_checks["printed"])

    # The full accounting report with its internal residual set.
    report = qgr_report(
        A,
        B,
        sf,
        psi,
        lift_mode=config.lift,
        inner_product_mode=config.inner_product,
        algebraic_tol=tol,
    )
    checks.extend(report.residuals)

    # Positivity.
    checks.append(
        residual_from_slack(
            "epsilon_adjoint_nonneg", report.epsilon_adjoint.real, 1.0, tol
        )
    )
    both_hermitian = (
        report.hermiticity_defects["A"] <= 1e-12
        and report.hermiticity_defects["B"] <= 1e-12
    )
    if both_hermitian:
        sigma_a = math.sqrt(max(report.sigma2_A.real, 0.0))
        sigma_b = math.sqrt(max(report.sigma2_B.real, 0.0))
        checks.append(
            residual_from_slack(
                "delta_fg_nonneg", report.delta_fg.real, 1.0, tol
            )
        )
        checks.append(
            residual_from_slack(
                "robertson_bound",
                sigma_a * sigma_b - report.robertson_C,
                1.0,
                tol,
            )
        )
        bound = second_moment_bound(A, B, psi)
        checks.append(
            residual_from_slack("t2_second_moment_bound", bound.slack, 1.0, tol)
        )

    # Magnitude bounds between the deformed and plain brackets.
    checks.extend(bracket_bound_report(sf, A, B, psi).checks(tol))

    # Deformed-sense commutation: an exact check for multiplication pairs,
    # a reported measure otherwise.
    equilibrium = equilibrium_residual(sf, A, B, psi, tol)
    if A.is_diagonal and B.is_diagonal:
        checks.append(equilibrium)
    else:
        diagnostics.append(equilibrium)

    # Mean-shift scenario: shift both observables to zero mean and re-run
    # the accounting; theta must collapse onto J.
    a_shift = shifted_to_zero_mean(A, psi)
    b_shift = shifted_to_zero_mean(B, psi)
    shifted = qgr_report(
        a_shift,
        b_shift,
        sf,
        psi,
        lift_mode=config.lift,
        inner_product_mode=config.inner_product,
        algebraic_tol=tol,
    )
    checks.append(
        residual_from_values(
            "shifted_theta_equals_J", shifted.theta, shifted.J, 1e-12
        )
    )
    for res in shifted.residuals:
        if res.name == "master_literal":
            checks.append(replace(res, name="shifted_master_literal"))

    # Closed-form position gap term.
    pos = build_position(grid)
    u_pos = compose(pos, structure_operator(sf))
    checks.append(
        residual_from_values(
            "rho_position_moment_form",
            entanglement_rho(pos, u_pos, psi),
            rho_position_closed_form(sf, psi),
            1e-12,
        )
    )

    # Momentum gap term under the function lift: the master identity is
    # asserted; the five-term expansion is reported only.
    expansion = rho_curvature_expansion(sf, scheme, constants, psi)
    momentum = build_geomentum(grid, scheme, sf.s1, constants)
    gv_momentum = generalized_variance(
        momentum, sf, psi, "function", function_action=expansion.coupling
    )
    checks.append(
        residual_from_values(
            "rho_momentum_function_master",
            expansion.direct,
            gv_momentum.Sigma2_literal - gv_momentum.sigma2,
            tol,
        )
    )
    diagnostics.append(
        residual_from_values(
            "curvature_expansion_printed",
            expansion.direct,
            expansion.expanded,
            cont_tol,
            kind="continuum",
        )
    )

    # Continuum identities, all state-weighted on the interior.
    checks.append(
        verify_gradient_consistency(
            sf,
            DerivativeScheme("fd4"),
            effective_continuum_tolerance(
                config.continuum_base, grid, DerivativeScheme("fd4")
            ),
            mask=mask,
        )
    )
    checks.append(
        geometric_ccr_residual(sf, scheme, constants, psi, cont_tol, _INTERIOR_MARGIN)
    )
    checks.append(
        ms_d_product_rule_residual(sf, scheme, psi, cont_tol, _INTERIOR_MARGIN)
    )
    checks.append(dk_ccr_residual(sf, scheme, psi, cont_tol, _INTERIOR_MARGIN))
    checks.append(
        vartheta_geomentum_residual(sf, scheme, constants, psi, cont_tol)
    )
    checks.append(
        gac_1d_closed_forms(
            sf, scheme, constants, psi, "geomentum", cont_tol, _INTERIOR_MARGIN
        )
    )
    checks.append(
        gac_1d_closed_forms(
            sf, scheme, constants, psi, "classical", cont_tol, _INTERIOR_MARGIN
        )
    )

    # Dynamics: the covariant evolution splits exactly; the swapped
    # ordering is reported.
    checks.append(
        dynamics_decomposition_residual(
            sf, A, scenario.hamiltonian, constants, tol
        )
    )
    diagnostics.append(
        dynamics_ordering_diagnostic(sf, A, scenario.hamiltonian, constants, tol)
    )

    # Reduction: with a vanishing field every geometric quantity must be
    # numerically zero and the two cross-product evaluations must agree.
    if sf.is_zero:
        zero_tol = 1e-12
        checks.append(
            residual_from_zero(
                "reduction_geomutator", geomutator(sf, A, B).matrix, zero_tol
            )
        )
        checks.append(
            residual_from_zero(
                "reduction_anti_geomutator",
                anti_geomutator(sf, A, B).matrix,
                zero_tol,
            )
        )
        for name, value in (
            ("reduction_rho_A", report.rho_A),
            ("reduction_rho_B", report.rho_B),
            ("reduction_theta", report.theta),
            ("reduction_vartheta", report.vartheta),
            ("reduction_Theta", report.Theta_literal),
            ("reduction_epsilon_mode_difference", report.epsilon_mode_difference),
        ):
            checks.append(residual_from_zero(name, value, zero_tol))
        if (
            config.state_family == "gaussian"
            and config.pair_a == "x"
            and config.pair_b in ("p_classical", "p_geomentum")
        ):
            sigma_a = math.sqrt(max(report.sigma2_A.real, 0.0))
            sigma_b = math.sqrt(max(report.sigma2_B.real, 0.0))
            checks.append(
                residual_from_values(
                    "gaussian_product_floor",
                    sigma_a * sigma_b,
                    0.5 * constants.hbar,
                    max(2e-6, cont_tol),
                    kind="continuum",
                )
            )

    # Seeded random-pair battery on a small companion grid.
    battery_grid = make_grid(config.x_min, config.x_max, 64, config.boundary)
    battery_sf = config.structure.build(battery_grid)
    battery_psi = gaussian_packet(
        battery_grid, config.x0, config.p0, config.width, constants
    )
    battery_spec = HamiltonianSpec(
        kinetic=config.kinetic,
        potential=(
            None
            if config.potential == "zero"
            else config.strength * battery_grid.points**2
        ),
    )
    battery_h = build_hamiltonian(
        battery_grid, scheme, battery_spec, constants, structure=battery_sf
    )
    battery = algebra_battery(
        battery_grid,
        [battery_sf],
        battery_psi,
        battery_h,
        pairs_per_structure=battery_pairs,
        seed=seed,
        tolerance=tol,
    )
    checks.append(
        residual_from_zero("fuzz_battery_all_pass", float(battery.fail_count), 0.5)
    )

    fail_count = sum(1 for res in checks if not res.passed)
    return SuiteResult(
        config=config,
        seed=seed,
        checks=checks,
        diagnostics=diagnostics,
        report=report,
        battery=battery,
        pass_count=len(checks) - fail_count,
        fail_count=fail_count,
        wall_time=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Parameter sweeps


def _set_config_value(raw: dict, path: str, value: float) -> dict:
    parts = path.split(".")
    node: Any = raw
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise UnknownParameterError(path)
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise UnknownParameterError(path)
    old = node[leaf]
    if isinstance(old, bool) or not isinstance(old, (int, float)):
        raise UnknownParameterError(path)
    node[leaf] = int(round(value)) if isinstance(old, int) else float(value)
    return raw


def sweep_rows(
    config: ScenarioConfig,
    param_path: str,
    start: float,
    stop: float,
    steps: int,
) -> list[dict[str, float]]:
    """Evaluate the report summary along a numeric config parameter.

    One row per value of ``numpy.linspace(start, stop, steps)``, each row a
    mapping with the :data:`SWEEP_COLUMNS` keys.  Complex summary values
    enter the table by their real parts (the JSON report keeps the full
    values); ``herm_defect`` is the worst Hermiticity defect among the base
    and lifted pair.
    """
    if steps < 2:
        raise ConfigError("steps must be ≥ 2")
    base = config.to_dict()
    rows: list[dict[str, float]] = []
    for value in np.linspace(float(start), float(stop), int(steps)):
        raw = _set_config_value(copy.deepcopy(base), param_path, float(value))
        scenario = build_scenario(config_from_dict(raw))
        report = qgr_report(
            scenario.A,
            scenario.B,
            scenario.structure,
            scenario.psi,
            lift_mode=scenario.config.lift,
            inner_product_mode=scenario.config.inner_product,
            algebraic_tol=scenario.config.algebraic_tol,
        )
        sigma_x = complex(np.sqrt(report.sigma2_A)).real
        sigma_p = complex(np.sqrt(report.sigma2_B)).real
        defect = max(report.hermiticity_defects[k] for k in ("A", "B", "lifted_A", "lifted_B"))
        rows.append(
            {
                "param": float(value),
                "sigma_x": sigma_x,
                "sigma_p": sigma_p,
                "product": sigma_x * sigma_p,
                "qgr_value": report.qgr_value.real,
                "Theta": report.Theta.real,
                "Xi": report.Xi,
                "epsilon": report.epsilon.real,
                "robertson_C": report.robertson_C,
                "herm_defect": defect,
            }
        )
    return rows
