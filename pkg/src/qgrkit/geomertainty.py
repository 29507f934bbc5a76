"""Geometric operator lifts and the generalized uncertainty accounting.

An observable ``X`` is coupled to the structure field by a lift
``X^(s) = X + u``.  Two readings of the interaction term ``u`` are
supported as first-class modes:

- ``composition``: ``u = X ∘ M_s`` (the reading under which the product
  expansions of the deformed brackets are well-formed), and
- ``function``: ``u = M_{X[s]}`` where ``X[s]`` is the operator applied to
  the sample vector of ``s`` (the reading used by the momentum curvature
  expansion).

Two evaluations of the cross product ``<f^(s)|g^(s)>`` are likewise
first-class:

- ``paper-literal``: the raw operator-product expectation
  ``<psi| ΔA^(s) ΔB^(s) |psi>``, exactly as the defining expansion is
  written, which for non-Hermitian lifts is not a true inner product, and
- ``adjoint-consistent``: the true vector inner product of
  ``f = ΔA^(s) psi`` and ``g = ΔB^(s) psi``.

Every report carries the complete accounting for both evaluations; the
primary fields follow the configured modes.

A note on the lift-product expansions: the deformed commutator and
anticommutator reproduce the products of lifted operators only after the
second-order term in ``u`` is kept,

    [A^(s), B^(s)] = GGC + 2 [A,B] ∘ M_s + [u, v]
    {A^(s), B^(s)} = GAC + (u v + v u)

with ``u = A ∘ M_s`` and ``v = B ∘ M_s``.  The widely quoted short forms
drop ``[u, v]`` (equivalently, write ``u v + v u`` as ``2 u v``);
:func:`lift_product_checks` verifies the exact forms at machine precision,
pins the short forms' defect to exactly that commutator, and reports the
short forms' residuals as diagnostics rather than pass/fail checks.  The
dropped terms cancel inside the Γ machinery (they flow through the
``<u v>`` part of θ), so every downstream accounting identity remains
exact; this is verified, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .brackets import (
    gac_bracket,
    ggc_bracket,
    structure_operator,
)
from .errors import (
    ConfigValidationError,
    GridMismatchError,
    HermitianInputError,
    NotNormalizedError,
)
from .grid import Grid, PhysicalConstants, WaveFunction, interior_mask
from .operators import (
    Operator,
    anticommutator_ir,
    build_derivative,
    build_geomentum,
    build_multiplication,
    build_position,
    commutator_cr,
    compose,
    DerivativeScheme,
)
from .residuals import (
    IdentityResidual,
    residual_from_arrays,
    residual_from_operators,
    residual_from_values,
)
from .structure import StructureFunction

__all__ = [
    "LIFT_MODES",
    "IP_MODES",
    "LIFT_COMPOSITION",
    "LIFT_FUNCTION",
    "MODE_LITERAL",
    "MODE_ADJOINT",
    "LiftedOperator",
    "geometric_lift",
    "entanglement_rho",
    "rho_position_closed_form",
    "GeneralizedVariance",
    "generalized_variance",
    "CrossTerms",
    "cross_terms",
    "big_theta",
    "GammaTerms",
    "gamma_from_brackets",
    "xi_and_epsilon",
    "SchrodingerTerms",
    "schrodinger_terms",
    "shifted_to_zero_mean",
    "lift_product_checks",
    "QgrReport",
    "qgr_report",
    "geometric_ccr_residual",
    "ms_d_product_rule_residual",
    "curvature_field",
    "dk_ccr_residual",
    "vartheta_geomentum_residual",
    "CurvatureExpansion",
    "rho_curvature_expansion",
    "gac_1d_closed_forms",
]

LIFT_COMPOSITION = "composition"
LIFT_FUNCTION = "function"
LIFT_MODES = (LIFT_COMPOSITION, LIFT_FUNCTION)

MODE_LITERAL = "paper-literal"
MODE_ADJOINT = "adjoint-consistent"
IP_MODES = (MODE_LITERAL, MODE_ADJOINT)


def _mean(psi: WaveFunction, vec: np.ndarray) -> complex:
    """Sesquilinear form ``<psi|vec>`` in the Riemann-sum metric."""
    return complex(psi.grid.h * np.vdot(psi.amplitudes, vec))


def _density(psi: WaveFunction) -> np.ndarray:
    return psi.grid.h * np.abs(psi.amplitudes) ** 2


# ---------------------------------------------------------------------------
# Lifts and the entanglement term


@dataclass(frozen=True, eq=False)
class LiftedOperator:
    """An observable together with its structure coupling.

    Attributes
    ----------
    base : Operator
        The original observable ``X``.
    shift : Operator
        The interaction term ``u``.
    lifted : Operator
        ``X + u``.
    mode : str
        The lift mode that produced ``u``.
    """

    base: Operator
    shift: Operator
    lifted: Operator
    mode: str


def geometric_lift(
    X: Operator,
    sf: StructureFunction,
    mode: str = LIFT_COMPOSITION,
    function_action: np.ndarray | None = None,
) -> LiftedOperator:
    """Couple an observable to the structure field.

    Parameters
    ----------
    X : Operator
    sf : StructureFunction
    mode : str
        ``"composition"`` gives ``u = X ∘ M_s``; ``"function"`` gives
        ``u = M_{X[s]}`` with ``X[s] = X.matrix @ sf.s`` unless
        ``function_action`` overrides the sample vector (used when an
        analytic action of ``X`` on ``s`` is known).
    function_action : array_like, optional
        Explicit samples of ``X[s]`` for the function mode.

    Returns
    -------
    LiftedOperator
    """
    if mode not in LIFT_MODES:
        raise ConfigValidationError("modes.lift", f"must be one of {LIFT_MODES}")
    X.grid.require_same(sf.grid, "operator and structure")
    if mode == LIFT_COMPOSITION:
        u = compose(X, structure_operator(sf))
    else:
        action = (
            np.asarray(function_action, dtype=complex)
            if function_action is not None
            else X.matrix @ sf.s.astype(complex)
        )
        u = build_multiplication(X.grid, action, label=f"{X.label}[s]")
    lifted = Operator(X.matrix + u.matrix, f"{X.label}^(s)", X.grid)
    return LiftedOperator(base=X, shift=u, lifted=lifted, mode=mode)


def entanglement_rho(X: Operator, u: Operator, psi: WaveFunction) -> complex:
    """Gap term ``sigma_u^2 - 2 <u><X> + <{X,u}>``.

    This closed form equals ``Sigma^2 - sigma^2`` exactly (as operator
    algebra, for any interaction term ``u``), where ``Sigma^2`` is the
    raw-product variance of ``X + u``.
    """
    X.grid.require_same(u.grid, "operators")
    amp = psi.amplitudes
    u_psi = u.matrix @ amp
    x_psi = X.matrix @ amp
    u_mean = _mean(psi, u_psi)
    x_mean = _mean(psi, x_psi)
    u2_mean = _mean(psi, u.matrix @ u_psi)
    cross_mean = _mean(psi, X.matrix @ u_psi) + _mean(psi, u.matrix @ x_psi)
    return (u2_mean - u_mean**2) - 2.0 * u_mean * x_mean + cross_mean


def rho_position_closed_form(sf: StructureFunction, psi: WaveFunction) -> complex:
    """Moment form of the position gap term.

    For ``X = x`` in composition mode the gap term reduces to
    ``<x^2 s^2> - <x s>^2 - 2 <x s><x> + 2 <x^2 s>``; note the second term
    is the square of the first moment of ``x s``.
    """
    sf.grid.require_same(psi.grid, "structure and state")
    dens = _density(psi)
    x = sf.grid.points
    m_x = float(np.sum(dens * x))
    m_xs = float(np.sum(dens * x * sf.s))
    m_x2s = float(np.sum(dens * x**2 * sf.s))
    m_x2s2 = float(np.sum(dens * (x * sf.s) ** 2))
    return complex(m_x2s2 - m_xs**2 - 2.0 * m_xs * m_x + 2.0 * m_x2s)


# ---------------------------------------------------------------------------
# Generalized variance


@dataclass(frozen=True, eq=False)
class GeneralizedVariance:
    """Variance bookkeeping for one lifted observable.

    ``Sigma2_literal`` is the raw-product variance
    ``<(X^(s))^2> - <X^(s)>^2``; ``Sigma2_adjoint`` is the true squared
    norm ``||ΔX^(s) psi||^2``.  The two coincide when the lift is
    Hermitian.  ``rho`` is the closed-form gap term for the same ``u``.
    """

    sigma2: complex
    rho: complex
    Sigma2_literal: complex
    Sigma2_adjoint: complex
    lift: LiftedOperator
    lifted_mean: complex
    shifted_action: np.ndarray = field(repr=False)


def generalized_variance(
    X: Operator,
    sf: StructureFunction,
    psi: WaveFunction,
    lift_mode: str = LIFT_COMPOSITION,
    function_action: np.ndarray | None = None,
) -> GeneralizedVariance:
    """Compute ordinary and generalized variances of one observable.

    Both evaluations of the generalized variance are recorded; callers
    select by inner-product mode downstream.
    """
    lift = geometric_lift(X, sf, lift_mode, function_action)
    amp = psi.amplitudes
    x_psi = X.matrix @ amp
    x_mean = _mean(psi, x_psi)
    sigma2 = _mean(psi, X.matrix @ x_psi) - x_mean**2
    lifted_psi = lift.lifted.matrix @ amp
    lifted_mean = _mean(psi, lifted_psi)
    sig2_lit = _mean(psi, lift.lifted.matrix @ lifted_psi) - lifted_mean**2
    shifted = lifted_psi - lifted_mean * amp
    sig2_adj = complex(psi.grid.h * np.vdot(shifted, shifted))
    rho = entanglement_rho(X, lift.shift, psi)
    return GeneralizedVariance(
        sigma2=sigma2,
        rho=rho,
        Sigma2_literal=sig2_lit,
        Sigma2_adjoint=sig2_adj,
        lift=lift,
        lifted_mean=lifted_mean,
        shifted_action=shifted,
    )


# ---------------------------------------------------------------------------
# Cross terms


@dataclass(frozen=True)
class CrossTerms:
    """Structure-coupling cross terms for a pair of observables.

    ``J`` and ``theta`` are built from composition-mode interaction terms
    regardless of the report's lift mode; ``consistency`` records the
    exact agreement between the definition ``theta = J - <A><B>`` and the
    expanded form ``<u v> - (<A>+<u>)(<B>+<v>)``.
    """

    J: complex
    theta: complex
    vartheta: complex
    consistency: IdentityResidual


def cross_terms(
    A: Operator,
    B: Operator,
    sf: StructureFunction,
    psi: WaveFunction,
    independent_means: bool = False,
) -> CrossTerms:
    """Compute ``J``, ``theta``, and ``vartheta`` for a pair.

    Parameters
    ----------
    independent_means : bool
        When True, replace ``<u v>`` by ``<u><v>`` (a simplification valid
        only for statistically independent couplings; off by default).
    """
    A.grid.require_same(B.grid, "operators")
    A.grid.require_same(sf.grid, "operators and structure")
    amp = psi.amplitudes
    s = sf.s
    a_psi = A.matrix @ amp
    b_psi = B.matrix @ amp
    a_mean = _mean(psi, a_psi)
    b_mean = _mean(psi, b_psi)
    # u = A ∘ M_s, v = B ∘ M_s applied through matrix-vector chains.
    u_psi = A.matrix @ (s * amp)
    v_psi = B.matrix @ (s * amp)
    u_mean = _mean(psi, u_psi)
    v_mean = _mean(psi, v_psi)
    uv_mean = _mean(psi, A.matrix @ (s * v_psi))
    if independent_means:
        uv_mean = u_mean * v_mean
    J = uv_mean - u_mean * v_mean - u_mean * b_mean - v_mean * a_mean
    theta = J - a_mean * b_mean
    theta_expanded = uv_mean - (a_mean + u_mean) * (b_mean + v_mean)
    consistency = residual_from_values(
        "theta_consistency", theta, theta_expanded, 1e-12
    )
    s_psi = s * amp
    comm_s_psi = A.matrix @ (B.matrix @ s_psi) - B.matrix @ (A.matrix @ s_psi)
    vartheta = -1j * _mean(psi, comm_s_psi)
    return CrossTerms(J=J, theta=theta, vartheta=vartheta, consistency=consistency)


def big_theta(
    sigma2_a: complex, rho_a: complex, sigma2_b: complex, rho_b: complex
) -> complex:
    """Product-gap term ``rho_A sigma_B^2 + sigma_A^2 rho_B + rho_A rho_B``.

    With ``rho = Sigma^2 - sigma^2`` this equals
    ``Sigma^2_A Sigma^2_B - sigma^2_A sigma^2_B`` identically.
    """
    return rho_a * sigma2_b + sigma2_a * rho_b + rho_a * rho_b


# ---------------------------------------------------------------------------
# Gamma terms


@dataclass(frozen=True)
class GammaTerms:
    """Symmetric/antisymmetric halves of the cross product.

    ``gamma_po + i gamma_ne`` reconstructs the cross product
    ``<f^(s)|g^(s)>`` in the evaluation that produced these values.
    """

    gamma_po: complex
    gamma_ne: complex
    cross_mean: complex
    mode: str


def gamma_from_brackets(
    A: Operator,
    B: Operator,
    sf: StructureFunction,
    psi: WaveFunction,
    cross: CrossTerms | None = None,
) -> GammaTerms:
    """Γ halves from the deformed brackets (composition-mode objects).

    ``gamma_po = <GAC>/2 + theta`` and ``gamma_ne = <GGC>/(2i) + vartheta``.
    These are exactly equal to the symmetric/antisymmetric halves of the
    literal cross product under the composition lift; that equality is a
    nontrivial exact identity checked by the report machinery.
    """
    if cross is None:
        cross = cross_terms(A, B, sf, psi)
    amp = psi.amplitudes
    s = sf.s
    a_psi = A.matrix @ amp
    b_psi = B.matrix @ amp
    s_psi = s * amp
    ab_psi = A.matrix @ b_psi
    ba_psi = B.matrix @ a_psi
    # Deformation applied through matrix-vector chains:
    # Z psi = A{s,B}psi + B{s,A}psi, G psi = A[s,B]psi - B[s,A]psi.
    sb_psi = s * b_psi
    sa_psi = s * a_psi
    bs_psi = B.matrix @ s_psi
    as_psi = A.matrix @ s_psi
    z_psi = A.matrix @ (sb_psi + bs_psi) + B.matrix @ (sa_psi + as_psi)
    g_psi = A.matrix @ (sb_psi - bs_psi) - B.matrix @ (sa_psi - as_psi)
    gac_mean = _mean(psi, ab_psi + ba_psi + z_psi)
    ggc_mean = _mean(psi, ab_psi - ba_psi + g_psi)
    gamma_po = 0.5 * gac_mean + cross.theta
    gamma_ne = ggc_mean / 2j + cross.vartheta
    return GammaTerms(
        gamma_po=gamma_po,
        gamma_ne=gamma_ne,
        cross_mean=gamma_po + 1j * gamma_ne,
        mode="brackets",
    )


def xi_and_epsilon(
    gamma_po: complex,
    gamma_ne: complex,
    Sigma2_A: complex,
    Sigma2_B: complex,
) -> tuple[float, complex]:
    """``Xi = |Γ_po|^2 + |Γ_ne|^2`` and ``epsilon = Σ²_A Σ²_B - Xi``.

    Squared moduli (not complex squares) keep ``Xi`` real; ``epsilon`` is
    the defined accounting residual and is never assumed nonnegative.
    """
    xi = abs(gamma_po) ** 2 + abs(gamma_ne) ** 2
    return float(xi), Sigma2_A * Sigma2_B - xi


# ---------------------------------------------------------------------------
# Classical decomposition layer


@dataclass(frozen=True)
class SchrodingerTerms:
    """Classical half of the decomposition for a Hermitian pair."""

    N1: float
    N2: float
    delta: float
    robertson_C: float


def schrodinger_terms(A: Operator, B: Operator, psi: WaveFunction) -> SchrodingerTerms:
    """Covariance/commutator terms and the classical positivity gap.

    ``N1 = <{A,B}>/2 - <A><B>``, ``N2 = <[A,B]>/(2i)``,
    ``delta = sigma^2_A sigma^2_B - N1^2 - N2^2 >= 0``, and the Robertson
    floor ``C = |<[A,B]>|/2``.

    Raises
    ------
    HermitianInputError
        When either operator fails the Hermiticity test; the positivity
        statements are only guaranteed for Hermitian pairs.
    """
    for op in (A, B):
        if not op.is_hermitian():
            raise HermitianInputError(
                f"schrodinger_terms needs Hermitian input, {op.label!r} has "
                f"defect {op.hermitian_defect():.3e}"
            )
    amp = psi.amplitudes
    a_psi = A.matrix @ amp
    b_psi = B.matrix @ amp
    a_mean = _mean(psi, a_psi)
    b_mean = _mean(psi, b_psi)
    ab_mean = _mean(psi, A.matrix @ b_psi)
    ba_mean = _mean(psi, B.matrix @ a_psi)
    sigma2_a = _mean(psi, A.matrix @ a_psi) - a_mean**2
    sigma2_b = _mean(psi, B.matrix @ b_psi) - b_mean**2
    n1 = (0.5 * (ab_mean + ba_mean) - a_mean * b_mean).real
    n2 = ((ab_mean - ba_mean) / 2j).real
    delta = (sigma2_a * sigma2_b).real - n1**2 - n2**2
    robertson = 0.5 * abs(ab_mean - ba_mean)
    return SchrodingerTerms(N1=n1, N2=n2, delta=delta, robertson_C=robertson)


def shifted_to_zero_mean(X: Operator, psi: WaveFunction) -> Operator:
    """Shift an observable by its mean: ``X - <X> I``.

    The mean-vanishing simplification is this derived scenario, not a
    separate code path: run any analysis on the shifted operators.
    """
    mean = _mean(psi, X.matrix @ psi.amplitudes)
    return Operator(
        X.matrix - mean * np.eye(X.grid.n), f"({X.label}-mean)", X.grid
    )


# ---------------------------------------------------------------------------
# Lift-product identities


def lift_product_checks(
    A: Operator,
    B: Operator,
    sf: StructureFunction,
    tolerance: float = 1e-10,
) -> dict[str, list[IdentityResidual]]:
    """Products of lifted operators versus the deformed brackets.

    Returns a dict with three entry lists:

    - ``"exact"``: the corrected identities including the second-order
      interaction terms; exact matrix algebra, asserted by the suites.
    - ``"defect"``: machine-precision checks pinning the short forms'
      discrepancy to exactly ``±[u, v]``.
    - ``"printed"``: the widely quoted short forms as written; their
      residuals are reported as diagnostics and vanish only when the
      interaction terms commute (for instance when ``s ≡ 0`` or both
      observables are multiplications).
    """
    m_s = structure_operator(sf)
    lift_a = geometric_lift(A, sf, LIFT_COMPOSITION)
    lift_b = geometric_lift(B, sf, LIFT_COMPOSITION)
    u = lift_a.shift
    v = lift_b.shift
    lifted_comm = commutator_cr(lift_a.lifted, lift_b.lifted)
    lifted_anti = anticommutator_ir(lift_a.lifted, lift_b.lifted)
    ggc = ggc_bracket(sf, A, B)
    gac = gac_bracket(sf, A, B)
    comm_s = compose(commutator_cr(A, B), m_s)
    uv = compose(u, v)
    vu = compose(v, u)
    second_comm = uv.matrix - vu.matrix
    second_anti = uv.matrix + vu.matrix

    exact = [
        residual_from_operators(
            "lift_commutator_exact",
            lifted_comm,
            ggc.matrix + 2.0 * comm_s.matrix + second_comm,
            tolerance,
        ),
        residual_from_operators(
            "lift_anticommutator_exact",
            lifted_anti,
            gac.matrix + second_anti,
            tolerance,
        ),
    ]
    defect = [
        residual_from_operators(
            "lift_commutator_defect_is_second_order",
            lifted_comm.matrix - ggc.matrix - 2.0 * comm_s.matrix,
            second_comm,
            tolerance,
        ),
        residual_from_operators(
            "lift_anticommutator_defect_is_second_order",
            lifted_anti.matrix - gac.matrix - 2.0 * uv.matrix,
            -second_comm,
            tolerance,
        ),
    ]
    printed = [
        residual_from_operators(
            "lift_commutator_printed",
            lifted_comm,
            ggc.matrix + 2.0 * comm_s.matrix,
            tolerance,
        ),
        residual_from_operators(
            "lift_anticommutator_printed",
            lifted_anti,
            gac.matrix + 2.0 * uv.matrix,
            tolerance,
        ),
    ]
    return {"exact": exact, "defect": defect, "printed": printed}


# ---------------------------------------------------------------------------
# The full report


@dataclass(frozen=True, eq=False)
class QgrReport:
    """Complete uncertainty accounting for one pair of observables.

    Primary fields follow the configured modes; the ``*_literal`` and
    ``*_adjoint`` extras always record both cross-product evaluations so a
    report never hides the one it was not asked for.  ``residuals`` holds
    the exact identity checks evaluated alongside the numbers;
    ``diagnostics`` holds reported-only quantities.
    """

    sigma2_A: complex
    sigma2_B: complex
    Sigma2_A: complex
    Sigma2_B: complex
    rho_A: complex
    rho_B: complex
    J: complex
    theta: complex
    vartheta: complex
    alpha1: complex
    alpha2: complex
    N1: complex
    N2: complex
    delta_fg: complex
    Theta: complex
    Gamma_po: complex
    Gamma_ne: complex
    Xi: float
    epsilon: complex
    robertson_C: float
    qgr_value: complex
    residuals: list[IdentityResidual]
    modes: dict[str, str]
    hermiticity_defects: dict[str, float]
    Sigma2_A_literal: complex
    Sigma2_B_literal: complex
    Sigma2_A_adjoint: complex
    Sigma2_B_adjoint: complex
    Theta_literal: complex
    Theta_adjoint: complex
    Gamma_po_literal: complex
    Gamma_ne_literal: complex
    Gamma_po_adjoint: complex
    Gamma_ne_adjoint: complex
    Xi_literal: float
    Xi_adjoint: float
    epsilon_literal: complex
    epsilon_adjoint: complex
    epsilon_mode_difference: complex
    diagnostics: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in (
            "sigma2_A",
            "sigma2_B",
            "Sigma2_A",
            "Sigma2_B",
            "rho_A",
            "rho_B",
            "J",
            "theta",
            "vartheta",
            "alpha1",
            "alpha2",
            "N1",
            "N2",
            "delta_fg",
            "Theta",
            "Gamma_po",
            "Gamma_ne",
            "Xi",
            "epsilon",
            "robertson_C",
            "qgr_value",
            "Sigma2_A_literal",
            "Sigma2_B_literal",
            "Sigma2_A_adjoint",
            "Sigma2_B_adjoint",
            "Theta_literal",
            "Theta_adjoint",
            "Gamma_po_literal",
            "Gamma_ne_literal",
            "Gamma_po_adjoint",
            "Gamma_ne_adjoint",
            "Xi_literal",
            "Xi_adjoint",
            "epsilon_literal",
            "epsilon_adjoint",
            "epsilon_mode_difference",
        ):
            out[name] = getattr(self, name)
        out["modes"] = dict(self.modes)
        out["hermiticity_defects"] = dict(self.hermiticity_defects)
        out["diagnostics"] = dict(self.diagnostics)
        out["residuals"] = [r.to_dict() for r in self.residuals]
        return out


def qgr_report(
    A: Operator,
    B: Operator,
    sf: StructureFunction,
    psi: WaveFunction,
    lift_mode: str = LIFT_COMPOSITION,
    inner_product_mode: str = MODE_LITERAL,
    algebraic_tol: float = 1e-10,
    function_action_a: np.ndarray | None = None,
    function_action_b: np.ndarray | None = None,
) -> QgrReport:
    """Assemble the full accounting report for one pair of observables.

    Raises
    ------
    GridMismatchError
        When the operators, structure field, and state disagree on grids.
    NotNormalizedError
        When the state is not normalized; every mean in the accounting
        assumes unit norm, so a report on an unnormalized state would be
        silently wrong.
    """
    if inner_product_mode not in IP_MODES:
        raise ConfigValidationError(
            "modes.inner_product", f"must be one of {IP_MODES}"
        )
    if lift_mode not in LIFT_MODES:
        raise ConfigValidationError("modes.lift", f"must be one of {LIFT_MODES}")
    for op in (A, B):
        if not op.grid.same_as(psi.grid):
            raise GridMismatchError(
                f"operator {op.label!r} and state live on different grids"
            )
    sf.grid.require_same(psi.grid, "structure and state")
    if not psi.normalized:
        raise NotNormalizedError(
            "qgr_report requires a normalized state; normalize first"
        )

    var_a = generalized_variance(A, sf, psi, lift_mode, function_action_a)
    var_b = generalized_variance(B, sf, psi, lift_mode, function_action_b)
    cross = cross_terms(A, B, sf, psi)
    gamma_br = gamma_from_brackets(A, B, sf, psi, cross)

    amp = psi.amplitudes
    h = psi.grid.h
    s = sf.s

    # Literal cross product under the active lift: <psi| ΔA^(s) ΔB^(s) |psi>
    # and its transpose, via matrix-vector chains.
    da, db = var_a.lift.lifted.matrix, var_b.lift.lifted.matrix
    mean_a_lift, mean_b_lift = var_a.lifted_mean, var_b.lifted_mean

    def _delta_apply(matrix, mean, vec):
        return matrix @ vec - mean * vec

    g_vec = _delta_apply(db, mean_b_lift, amp)
    f_vec = _delta_apply(da, mean_a_lift, amp)
    fg_literal = _mean(psi, _delta_apply(da, mean_a_lift, g_vec))
    gf_literal = _mean(psi, _delta_apply(db, mean_b_lift, f_vec))
    gamma_po_lit = 0.5 * (fg_literal + gf_literal)
    gamma_ne_lit = (fg_literal - gf_literal) / 2j
    if lift_mode == LIFT_COMPOSITION:
        # The bracket split is the defining computation in this mode; the
        # product halves agree with it exactly (checked below).
        gamma_po_lit_primary, gamma_ne_lit_primary = (
            gamma_br.gamma_po,
            gamma_br.gamma_ne,
        )
        fg_composition = fg_literal
    else:
        gamma_po_lit_primary, gamma_ne_lit_primary = gamma_po_lit, gamma_ne_lit
        comp_a = geometric_lift(A, sf, LIFT_COMPOSITION)
        comp_b = geometric_lift(B, sf, LIFT_COMPOSITION)
        ca, cb = comp_a.lifted.matrix, comp_b.lifted.matrix
        ca_mean = _mean(psi, ca @ amp)
        cb_mean = _mean(psi, cb @ amp)
        fg_composition = _mean(
            psi, _delta_apply(ca, ca_mean, _delta_apply(cb, cb_mean, amp))
        )

    # Adjoint-consistent cross product: true inner product of the shifted
    # actions f = ΔA^(s) psi and g = ΔB^(s) psi.
    fg_adjoint = complex(h * np.vdot(var_a.shifted_action, var_b.shifted_action))
    gamma_po_adj = complex(fg_adjoint.real)
    gamma_ne_adj = complex(fg_adjoint.imag)

    sigma2_a, sigma2_b = var_a.sigma2, var_b.sigma2
    theta_lit = big_theta(sigma2_a, var_a.rho, sigma2_b, var_b.rho)
    rho_a_adj = var_a.Sigma2_adjoint - sigma2_a
    rho_b_adj = var_b.Sigma2_adjoint - sigma2_b
    theta_adj = big_theta(sigma2_a, rho_a_adj, sigma2_b, rho_b_adj)

    xi_lit, eps_lit = xi_and_epsilon(
        gamma_po_lit_primary,
        gamma_ne_lit_primary,
        var_a.Sigma2_literal,
        var_b.Sigma2_literal,
    )
    xi_adj, eps_adj = xi_and_epsilon(
        gamma_po_adj, gamma_ne_adj, var_a.Sigma2_adjoint, var_b.Sigma2_adjoint
    )

    # Classical layer and the alpha splits (composition-mode objects).
    a_psi = A.matrix @ amp
    b_psi = B.matrix @ amp
    a_mean = _mean(psi, a_psi)
    b_mean = _mean(psi, b_psi)
    ab_mean = _mean(psi, A.matrix @ b_psi)
    ba_mean = _mean(psi, B.matrix @ a_psi)
    n1 = 0.5 * (ab_mean + ba_mean) - a_mean * b_mean
    n2 = (ab_mean - ba_mean) / 2j
    delta_fg = sigma2_a * sigma2_b - n1**2 - n2**2
    robertson = 0.5 * abs(ab_mean - ba_mean)

    s_psi = s * amp
    sym_sandwich = _mean(psi, A.matrix @ (s * b_psi) + B.matrix @ (s * a_psi))
    asym_sandwich = _mean(psi, A.matrix @ (s * b_psi) - B.matrix @ (s * a_psi))
    anti_s = _mean(psi, A.matrix @ (B.matrix @ s_psi) + B.matrix @ (A.matrix @ s_psi))
    comm_s = _mean(psi, A.matrix @ (B.matrix @ s_psi) - B.matrix @ (A.matrix @ s_psi))
    alpha1 = cross.J + 0.5 * sym_sandwich + 0.5 * anti_s
    alpha2 = (asym_sandwich + comm_s) / 2j

    # Both sides of the Γ split identities are sums of terms that can
    # cancel almost completely (e.g. for an odd structure field on a
    # symmetric state), so their rounding noise scales with the terms.
    # Judge the residuals against the largest contributing term.
    gamma_scale_po = max(
        abs(gamma_br.gamma_po - cross.theta),
        abs(cross.theta),
        abs(n1),
        abs(cross.J),
        0.5 * abs(sym_sandwich),
        0.5 * abs(anti_s),
    )
    gamma_scale_ne = max(
        abs(gamma_br.gamma_ne - cross.vartheta),
        abs(cross.vartheta),
        abs(n2),
        0.5 * abs(asym_sandwich),
        0.5 * abs(comm_s),
    )

    if inner_product_mode == MODE_LITERAL:
        Sigma2_A, Sigma2_B = var_a.Sigma2_literal, var_b.Sigma2_literal
        Theta = theta_lit
        gamma_po, gamma_ne = gamma_po_lit_primary, gamma_ne_lit_primary
        xi, eps = xi_lit, eps_lit
    else:
        Sigma2_A, Sigma2_B = var_a.Sigma2_adjoint, var_b.Sigma2_adjoint
        Theta = theta_adj
        gamma_po, gamma_ne = gamma_po_adj, gamma_ne_adj
        xi, eps = xi_adj, eps_adj

    qgr_value = complex(np.sqrt(complex(xi - Theta + eps)))

    residuals = [
        residual_from_values(
            "variance_decomposition_A",
            var_a.Sigma2_literal,
            sigma2_a + var_a.rho,
            algebraic_tol,
        ),
        residual_from_values(
            "variance_decomposition_B",
            var_b.Sigma2_literal,
            sigma2_b + var_b.rho,
            algebraic_tol,
        ),
        residual_from_values(
            "variance_product_literal",
            var_a.Sigma2_literal * var_b.Sigma2_literal,
            sigma2_a * sigma2_b + theta_lit,
            algebraic_tol,
        ),
        residual_from_values(
            "variance_product_adjoint",
            var_a.Sigma2_adjoint * var_b.Sigma2_adjoint,
            sigma2_a * sigma2_b + theta_adj,
            algebraic_tol,
        ),
        cross.consistency,
        residual_from_values(
            "gamma_complex_identity",
            fg_composition,
            gamma_br.gamma_po + 1j * gamma_br.gamma_ne,
            1e-12,
            scale_floor=max(gamma_scale_po, gamma_scale_ne),
        ),
        residual_from_values(
            "gamma_split_po",
            gamma_br.gamma_po,
            n1 + alpha1,
            1e-12,
            scale_floor=gamma_scale_po,
        ),
        residual_from_values(
            "gamma_split_ne",
            gamma_br.gamma_ne,
            n2 + alpha2,
            1e-12,
            scale_floor=gamma_scale_ne,
        ),
        residual_from_values(
            "master_literal",
            sigma2_a * sigma2_b + theta_lit,
            xi_lit + eps_lit,
            algebraic_tol,
        ),
        residual_from_values(
            "master_adjoint",
            sigma2_a * sigma2_b + theta_adj,
            xi_adj + eps_adj,
            algebraic_tol,
        ),
        residual_from_values(
            "qgr_squared_is_variance_product",
            qgr_value**2,
            sigma2_a * sigma2_b,
            algebraic_tol,
        ),
    ]
    lift_defect_a = var_a.lift.lifted.hermitian_defect()
    lift_defect_b = var_b.lift.lifted.hermitian_defect()
    if max(lift_defect_a, lift_defect_b) <= 1e-12:
        residuals.append(
            residual_from_values(
                "epsilon_mode_agreement", eps_lit, eps_adj, algebraic_tol
            )
        )

    diagnostics = {
        "xi_literal_cross_term": float(abs(fg_literal) ** 2 - xi_lit),
        "epsilon_literal_imag": float(eps_lit.imag),
        "epsilon_adjoint_imag": float(eps_adj.imag),
        "rho_A_mode_gap": float(abs(var_a.rho - rho_a_adj)),
        "rho_B_mode_gap": float(abs(var_b.rho - rho_b_adj)),
    }
    defects = {
        "A": A.hermitian_defect(),
        "B": B.hermitian_defect(),
        "lifted_A": lift_defect_a,
        "lifted_B": lift_defect_b,
        "Gamma_po_imag": abs(gamma_po_lit_primary.imag),
        "Gamma_ne_imag": abs(gamma_ne_lit_primary.imag),
    }

    return QgrReport(
        sigma2_A=sigma2_a,
        sigma2_B=sigma2_b,
        Sigma2_A=Sigma2_A,
        Sigma2_B=Sigma2_B,
        rho_A=var_a.rho,
        rho_B=var_b.rho,
        J=cross.J,
        theta=cross.theta,
        vartheta=cross.vartheta,
        alpha1=alpha1,
        alpha2=alpha2,
        N1=n1,
        N2=n2,
        delta_fg=delta_fg,
        Theta=Theta,
        Gamma_po=gamma_po,
        Gamma_ne=gamma_ne,
        Xi=xi,
        epsilon=eps,
        robertson_C=robertson,
        qgr_value=qgr_value,
        residuals=residuals,
        modes={"lift": lift_mode, "inner_product": inner_product_mode},
        hermiticity_defects=defects,
        Sigma2_A_literal=var_a.Sigma2_literal,
        Sigma2_B_literal=var_b.Sigma2_literal,
        Sigma2_A_adjoint=var_a.Sigma2_adjoint,
        Sigma2_B_adjoint=var_b.Sigma2_adjoint,
        Theta_literal=theta_lit,
        Theta_adjoint=theta_adj,
        Gamma_po_literal=gamma_po_lit_primary,
        Gamma_ne_literal=gamma_ne_lit_primary,
        Gamma_po_adjoint=gamma_po_adj,
        Gamma_ne_adjoint=gamma_ne_adj,
        Xi_literal=xi_lit,
        Xi_adjoint=xi_adj,
        epsilon_literal=eps_lit,
        epsilon_adjoint=eps_adj,
        epsilon_mode_difference=eps_lit - eps_adj,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Continuum identities


def geometric_ccr_residual(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    constants: PhysicalConstants,
    psi: WaveFunction,
    tolerance: float,
    margin: float = 0.05,
) -> IdentityResidual:
    """Deformed canonical pair residual on a state.

    Checks ``[x, p]_deformed psi = i hbar (1 + x s') psi`` on the grid
    interior, where ``p`` is the geometric momentum.  The agreement is
    O(h^p): the only approximation is the derivative matrix.
    """
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    x = grid.points
    s = sf.s
    hbar = constants.hbar
    deriv = build_derivative(grid, scheme).matrix
    amp = psi.amplitudes

    def p_apply(vec):
        return -1j * hbar * (deriv @ vec + sf.s1 * vec)

    p_psi = p_apply(amp)
    # [x,p] psi + (x [s,p] - p [s,x]) psi; [s,x] = 0 for multiplications.
    lhs = x * p_psi - p_apply(x * amp) + x * (s * p_psi - p_apply(s * amp))
    rhs = 1j * hbar * (1.0 + x * sf.s1) * amp
    return residual_from_arrays(
        "geometric_ccr",
        lhs,
        rhs,
        tolerance,
        kind="continuum",
        mask=interior_mask(grid, margin),
    )


def ms_d_product_rule_residual(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    psi: WaveFunction,
    tolerance: float,
    margin: float = 0.05,
) -> IdentityResidual:
    """Product-rule commutator residual ``[M_s, D] psi = -s' psi``."""
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    deriv = build_derivative(grid, scheme).matrix
    amp = psi.amplitudes
    lhs = sf.s * (deriv @ amp) - deriv @ (sf.s * amp)
    rhs = -sf.s1 * amp
    return residual_from_arrays(
        "ms_d_product_rule",
        lhs,
        rhs,
        tolerance,
        kind="continuum",
        mask=interior_mask(grid, margin),
    )


def curvature_field(sf: StructureFunction) -> np.ndarray:
    """Scalar curvature combination ``Q = s'' + (s')^2``."""
    return sf.s2 + sf.s1**2


def dk_ccr_residual(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    psi: WaveFunction,
    tolerance: float,
    margin: float = 0.05,
) -> IdentityResidual:
    """Covariant derivative of the deformation factor ``b = 1 + x s'``.

    Checks ``(d/dx + s') b = x Q + 2 s'`` with ``Q = s'' + (s')^2``,
    evaluated against the state so that the derivative matrix only ever
    acts on interior-supported vectors:
    ``D(b psi) - b D(psi) + s' b psi = (x Q + 2 s') psi``.
    """
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    x = grid.points
    b = 1.0 + x * sf.s1
    deriv = build_derivative(grid, scheme).matrix
    amp = psi.amplitudes
    lhs = deriv @ (b * amp) - b * (deriv @ amp) + sf.s1 * b * amp
    rhs = (x * curvature_field(sf) + 2.0 * sf.s1) * amp
    return residual_from_arrays(
        "dk_ccr",
        lhs,
        rhs,
        tolerance,
        kind="continuum",
        mask=interior_mask(grid, margin),
    )


def vartheta_geomentum_residual(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    constants: PhysicalConstants,
    psi: WaveFunction,
    tolerance: float,
) -> IdentityResidual:
    """For the canonical pair, ``vartheta`` reduces to ``hbar <s>``.

    ``vartheta = -i <[x, p] ∘ M_s>`` with the geometric momentum; in the
    continuum the commutator is ``i hbar``, so the value converges to
    ``hbar <s>`` at scheme order.
    """
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    x = grid.points
    hbar = constants.hbar
    deriv = build_derivative(grid, scheme).matrix
    amp = psi.amplitudes

    def p_apply(vec):
        return -1j * hbar * (deriv @ vec + sf.s1 * vec)

    s_psi = sf.s * amp
    vartheta = -1j * _mean(psi, x * p_apply(s_psi) - p_apply(x * s_psi))
    target = hbar * float(np.sum(_density(psi) * sf.s))
    return residual_from_values(
        "vartheta_geomentum", vartheta, target, tolerance, kind="continuum"
    )


# ---------------------------------------------------------------------------
# Curvature expansion of the momentum gap term


@dataclass(frozen=True)
class CurvatureExpansion:
    """Direct versus term-by-term evaluation of the momentum gap term.

    ``direct`` is the closed-form gap term for the function-mode momentum
    coupling; ``expanded`` sums the five printed terms.  The two are NOT
    asserted equal: the printed expansion mixes samples and operators
    without disambiguation, so the residual is recorded as a diagnostic.
    The asserted statement is the master identity
    ``direct == Sigma2 - sigma2``, which callers check via
    :func:`generalized_variance` with the same coupling samples.
    """

    direct: complex
    expanded: complex
    residual: float
    terms: dict[str, complex]
    coupling: np.ndarray = field(repr=False)


def rho_curvature_expansion(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    constants: PhysicalConstants,
    psi: WaveFunction,
) -> CurvatureExpansion:
    """Evaluate the momentum gap term and its five-term expansion.

    The function-mode coupling uses the analytic action of the geometric
    momentum on the structure field: ``w = s'(1 + s)``, so
    ``u = -i hbar M_w``.
    """
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    hbar = constants.hbar
    w = sf.s1 * (1.0 + sf.s)
    u = build_multiplication(grid, -1j * hbar * w, label="p[s]")
    momentum = build_geomentum(grid, scheme, sf.s1, constants)
    direct = entanglement_rho(momentum, u, psi)

    deriv = build_derivative(grid, scheme).matrix
    dens = _density(psi)
    amp = psi.amplitudes
    m_w = complex(np.sum(dens * w))
    m_w2 = complex(np.sum(dens * w**2))
    m_deriv = _mean(psi, deriv @ amp)
    dds = deriv @ (deriv @ sf.s)
    m_dds = complex(np.sum(dens * dds))
    m_w_deriv = _mean(psi, w * (deriv @ amp))
    terms = {
        "mean_coupling_squared": hbar**2 * m_w**2,
        "mean_coupling_square": -(hbar**2) * m_w2,
        "cross_mean_derivative": hbar**2 * 2.0 * m_w * m_deriv,
        "second_derivative_term": -(hbar**2) * m_dds,
        "coupling_derivative_term": -(hbar**2) * m_w_deriv,
    }
    expanded = sum(terms.values(), start=complex(0.0))
    return CurvatureExpansion(
        direct=direct,
        expanded=expanded,
        residual=float(abs(direct - expanded)),
        terms=terms,
        coupling=-1j * hbar * w,
    )


# ---------------------------------------------------------------------------
# One-dimensional closed forms for the deformed anticommutator


def gac_1d_closed_forms(
    sf: StructureFunction,
    scheme: DerivativeScheme,
    constants: PhysicalConstants,
    psi: WaveFunction,
    momentum_kind: str = "geomentum",
    tolerance: float = 1e-3,
    margin: float = 0.05,
) -> IdentityResidual:
    """Deformed anticommutator of the canonical pair versus its closed form.

    For ``momentum_kind="geomentum"`` the closed form is
    ``-i hbar (2 x d/dx + 1 + K)`` with
    ``K = x (2 d(s^2)/dx + 4 s d/dx + 5 s') + 2 s`` and
    ``d(s^2)/dx = 2 s s'``; for ``"classical"`` it is
    ``-2 i hbar (1/2 + x d/dx + K)`` with
    ``K = s + 2 s x d/dx + 3 x s' / 2``.  Both checks are continuum-kind:
    the two sides differ by product-rule discretization error O(h^p) on
    the interior.
    """
    if momentum_kind not in ("geomentum", "classical"):
        raise ConfigValidationError(
            "momentum_kind", "must be 'geomentum' or 'classical'"
        )
    grid = sf.grid
    grid.require_same(psi.grid, "structure and state")
    x = grid.points
    s = sf.s
    q = sf.s1
    hbar = constants.hbar
    deriv = build_derivative(grid, scheme).matrix
    amp = psi.amplitudes

    if momentum_kind == "geomentum":
        def p_apply(vec):
            return -1j * hbar * (deriv @ vec + q * vec)
    else:
        def p_apply(vec):
            return -1j * hbar * (deriv @ vec)

    p_psi = p_apply(amp)
    # {x,p} psi + Z psi with Z = x{s,p} + p{s,x} applied through chains.
    anti_psi = x * p_psi + p_apply(x * amp)
    z_psi = x * (s * p_psi + p_apply(s * amp)) + p_apply(2.0 * s * x * amp)
    lhs = anti_psi + z_psi

    d_psi = deriv @ amp
    if momentum_kind == "geomentum":
        k_psi = x * (2.0 * (2.0 * s * q) * amp + 4.0 * s * d_psi + 5.0 * q * amp) + 2.0 * s * amp
        rhs = -1j * hbar * (2.0 * x * d_psi + amp + k_psi)
    else:
        k_psi = s * amp + 2.0 * s * x * d_psi + 1.5 * x * q * amp
        rhs = -2j * hbar * (0.5 * amp + x * d_psi + k_psi)

    return residual_from_arrays(
        f"gac_closed_form_{momentum_kind}",
        lhs,
        rhs,
        tolerance,
        kind="continuum",
        mask=interior_mask(grid, margin),
    )
