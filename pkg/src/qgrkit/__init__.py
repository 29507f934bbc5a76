"""Numerical toolkit for structure-deformed operator algebra.

The package discretizes one-dimensional quantum systems on uniform grids
and verifies, at machine precision or under grid refinement as
appropriate, the identities of a bracket algebra deformed by a scalar
structure field: the deformed commutator and anticommutator, the
geometric momentum they induce, the generalized uncertainty accounting
built on lifted observables, and the covariant Heisenberg dynamics.
"""

from .brackets import (
    algebra_checks,
    anti_geomutator,
    bracket_bound_report,
    equilibrium_residual,
    gac_bracket,
    geomutator,
    ggc_bracket,
    sandwich_asym,
    sandwich_sym,
    structure_operator,
)
from .dynamics import (
    HamiltonianSpec,
    build_hamiltonian,
    covariant_rhs,
    dynamics_decomposition_residual,
    dynamics_ordering_diagnostic,
    ghe_rhs,
    structure_velocity,
)
from .errors import (
    BoundaryAmplitudeWarning,
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    DimensionMismatchError,
    GridMismatchError,
    GridRangeError,
    GridSizeError,
    HermitianInputError,
    NonpositiveWidthError,
    NormalizationWarning,
    NotNormalizedError,
    SchemeBoundaryError,
    ToolkitError,
    UnknownParameterError,
)
from .geomertainty import (
    CurvatureExpansion,
    GammaTerms,
    GeneralizedVariance,
    LiftedOperator,
    QgrReport,
    SchrodingerTerms,
    big_theta,
    cross_terms,
    curvature_field,
    dk_ccr_residual,
    entanglement_rho,
    gac_1d_closed_forms,
    gamma_from_brackets,
    generalized_variance,
    geometric_ccr_residual,
    geometric_lift,
    lift_product_checks,
    ms_d_product_rule_residual,
    qgr_report,
    rho_curvature_expansion,
    rho_position_closed_form,
    schrodinger_terms,
    shifted_to_zero_mean,
    vartheta_geomentum_residual,
    xi_and_epsilon,
)
from .grid import (
    Grid,
    PhysicalConstants,
    WaveFunction,
    as_wavefunction,
    expectation,
    gaussian_packet,
    inner_product,
    interior_mask,
    make_grid,
    norm,
    variance,
)
from .operators import (
    DerivativeScheme,
    Operator,
    adjoint,
    anticommutator_ir,
    build_derivative,
    build_geomentum,
    build_identity,
    build_momentum_classical,
    build_multiplication,
    build_position,
    commutator_cr,
    compose,
    linear_combine,
    operator,
    scale,
    second_moment_bound,
)
from .report import ReportDocument, canonical_json, parse_report, write_sweep_csv
from .residuals import (
    IdentityResidual,
    residual_from_arrays,
    residual_from_operators,
    residual_from_slack,
    residual_from_values,
    residual_from_zero,
)
from .scenarios import (
    BatteryResult,
    Scenario,
    ScenarioConfig,
    StructureSpec,
    SuiteResult,
    algebra_battery,
    build_scenario,
    config_from_dict,
    effective_continuum_tolerance,
    load_config,
    load_config_file,
    run_suite,
    sweep_rows,
)
from .structure import (
    StructureFunction,
    build_structure,
    structure_from_callables,
    structure_from_samples,
    verify_gradient_consistency,
    zero_structure,
)

__version__ = "0.1.0"
