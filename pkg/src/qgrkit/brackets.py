"""Structure-deformed bracket algebra.

The plain product brackets ``[a,b] = ab - ba`` and ``{a,b} = ab + ba`` are
deformed by a structure function ``s``: a correction built from brackets
against the multiplication operator ``M_s`` is added to each.  Everything
in this module is exact matrix algebra; the only approximation anywhere is
the derivative matrix hiding inside the operators passed in.

Composition-order convention: ``a [M_s, b]`` always means the commutator
applied first and ``a`` composed on the left, i.e. ``a @ (M_s b - b M_s)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import WaveFunction, expectation
from .operators import (
    Operator,
    anticommutator_ir,
    build_multiplication,
    commutator_cr,
    compose,
    linear_combine,
)
from .residuals import (
    ZERO_SCALE,
    IdentityResidual,
    residual_from_operators,
    residual_from_slack,
)
from .structure import StructureFunction

__all__ = [
    "structure_operator",
    "geomutator",
    "ggc_bracket",
    "anti_geomutator",
    "gac_bracket",
    "sandwich_asym",
    "sandwich_sym",
    "equilibrium_residual",
    "BracketBoundReport",
    "bracket_bound_report",
    "algebra_checks",
]


def structure_operator(sf: StructureFunction) -> Operator:
    """Multiplication operator ``M_s`` for the structure field."""
    return build_multiplication(sf.grid, sf.s, label="s")


def geomutator(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Antisymmetric deformation term ``a [M_s, b] - b [M_s, a]``."""
    m_s = structure_operator(sf)
    term_ab = compose(a, commutator_cr(m_s, b))
    term_ba = compose(b, commutator_cr(m_s, a))
    return Operator(
        term_ab.matrix - term_ba.matrix,
        f"G(s,{a.label},{b.label})",
        a.grid,
    )


def ggc_bracket(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Deformed commutator: plain commutator plus the geomutator."""
    plain = commutator_cr(a, b)
    deform = geomutator(sf, a, b)
    return Operator(
        plain.matrix + deform.matrix,
        f"[{a.label},{b.label}]_s",
        a.grid,
    )


def anti_geomutator(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Symmetric deformation term ``a {M_s, b} + b {M_s, a}``."""
    m_s = structure_operator(sf)
    term_ab = compose(a, anticommutator_ir(m_s, b))
    term_ba = compose(b, anticommutator_ir(m_s, a))
    return Operator(
        term_ab.matrix + term_ba.matrix,
        f"Z(s,{a.label},{b.label})",
        a.grid,
    )


def gac_bracket(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Deformed anticommutator: plain anticommutator plus the anti-geomutator."""
    plain = anticommutator_ir(a, b)
    deform = anti_geomutator(sf, a, b)
    return Operator(
        plain.matrix + deform.matrix,
        f"{{{a.label},{b.label}}}_s",
        a.grid,
    )


def sandwich_asym(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Odd sandwich ``a M_s b - b M_s a``."""
    m_s = structure_operator(sf)
    return Operator(
        compose(a, compose(m_s, b)).matrix - compose(b, compose(m_s, a)).matrix,
        f"<{a.label}:s:{b.label}>",
        a.grid,
    )


def sandwich_sym(sf: StructureFunction, a: Operator, b: Operator) -> Operator:
    """Even sandwich ``a M_s b + b M_s a``."""
    m_s = structure_operator(sf)
    return Operator(
        compose(a, compose(m_s, b)).matrix + compose(b, compose(m_s, a)).matrix,
        f"({a.label}:s:{b.label})",
        a.grid,
    )


def equilibrium_residual(
    sf: StructureFunction,
    a: Operator,
    b: Operator,
    psi: WaveFunction,
    tolerance: float = 1e-12,
) -> IdentityResidual:
    """How far a pair is from commuting in the deformed sense on a state.

    Applies the deformed commutator to ``psi`` and compares its max-norm
    against the larger of the two composed actions ``a(b psi)`` and
    ``b(a psi)``, so the verdict is scale-free: multiplication pairs pass
    at machine precision, canonically conjugate pairs fail at order one.
    """
    a.grid.require_same(psi.grid, "operator and state")
    vec = ggc_bracket(sf, a, b).matrix @ psi.amplitudes
    ref = max(
        float(np.max(np.abs(compose(a, b).matrix @ psi.amplitudes))),
        float(np.max(np.abs(compose(b, a).matrix @ psi.amplitudes))),
    )
    abs_residual = float(np.max(np.abs(vec)))
    rel = abs_residual if ref < ZERO_SCALE else abs_residual / ref
    return IdentityResidual(
        name="covariant_equilibrium",
        lhs_norm=abs_residual,
        rhs_norm=ref,
        abs_residual=abs_residual,
        rel_residual=float(rel),
        tolerance=float(tolerance),
        kind="algebraic",
        passed=bool(rel <= tolerance),
    )


@dataclass(frozen=True)
class BracketBoundReport:
    """Triangle-style bounds between the deformed and plain brackets.

    All means are expectation values in one state; every ``slack_*`` field
    is nonnegative up to roundoff when the bounds hold.
    """

    mean_ggc_abs: float
    mean_qpb_abs: float
    mean_geomutator_abs: float
    mean_fg_abs: float
    mean_gf_abs: float
    slack_triangle: float
    slack_geomutator: float
    slack_combined: float
    slack_lower: float

    def checks(self, tolerance: float = 1e-12) -> list[IdentityResidual]:
        """The four bounds as absolute-slack residual records."""
        return [
            residual_from_slack(
                "bound_triangle", self.slack_triangle, 1.0, tolerance
            ),
            residual_from_slack(
                "bound_geomutator_parts", self.slack_geomutator, 1.0, tolerance
            ),
            residual_from_slack(
                "bound_combined", self.slack_combined, 1.0, tolerance
            ),
            residual_from_slack(
                "bound_reverse_triangle", self.slack_lower, 1.0, tolerance
            ),
        ]


def bracket_bound_report(
    sf: StructureFunction,
    a: Operator,
    b: Operator,
    psi: WaveFunction,
) -> BracketBoundReport:
    """Evaluate the bracket magnitude bounds in a state.

    The deformed commutator mean is bounded by the plain commutator mean
    plus the deformation mean; the deformation mean is bounded by its two
    one-sided pieces; and the reverse triangle bound gives the matching
    lower estimate.
    """
    m_s = structure_operator(sf)
    mean_qpb = abs(expectation(commutator_cr(a, b), psi))
    part_fg = compose(a, commutator_cr(m_s, b))
    part_gf = compose(b, commutator_cr(m_s, a))
    mean_fg = abs(expectation(part_fg, psi))
    mean_gf = abs(expectation(part_gf, psi))
    deform = Operator(part_fg.matrix - part_gf.matrix, "G", a.grid)
    mean_deform = abs(expectation(deform, psi))
    mean_ggc = abs(
        expectation(Operator(commutator_cr(a, b).matrix + deform.matrix, "ggc", a.grid), psi)
    )
    return BracketBoundReport(
        mean_ggc_abs=mean_ggc,
        mean_qpb_abs=mean_qpb,
        mean_geomutator_abs=mean_deform,
        mean_fg_abs=mean_fg,
        mean_gf_abs=mean_gf,
        slack_triangle=(mean_qpb + mean_deform) - mean_ggc,
        slack_geomutator=(mean_fg + mean_gf) - mean_deform,
        slack_combined=(mean_qpb + mean_fg + mean_gf) - mean_ggc,
        slack_lower=0.5 * mean_ggc - 0.5 * (mean_qpb - mean_deform),
    )


def algebra_checks(
    sf: StructureFunction,
    a: Operator,
    b: Operator,
    tolerance: float = 1e-10,
) -> list[IdentityResidual]:
    """Exact structural identities of the deformed brackets for one pair.

    Every check here is a pure rearrangement of matrix products and must
    hold at machine precision for any operators and any structure field.
    """
    m_s = structure_operator(sf)
    plain_comm = commutator_cr(a, b)
    plain_anti = anticommutator_ir(a, b)
    deform_odd = geomutator(sf, a, b)
    deform_even = anti_geomutator(sf, a, b)
    ggc = ggc_bracket(sf, a, b)
    gac = gac_bracket(sf, a, b)
    asb = compose(a, compose(m_s, b))
    bsa = compose(b, compose(m_s, a))
    ab = compose(a, b)
    ba = compose(b, a)

    checks = [
        residual_from_operators(
            "product_decomposition",
            ab,
            linear_combine([(0.5, plain_comm), (0.5, plain_anti)]),
            tolerance,
        ),
        residual_from_operators(
            "geomutator_antisymmetry",
            deform_odd,
            -geomutator(sf, b, a).matrix,
            tolerance,
        ),
        residual_from_operators(
            "anti_geomutator_symmetry",
            deform_even,
            anti_geomutator(sf, b, a),
            tolerance,
        ),
        residual_from_operators(
            "ggc_antisymmetry", ggc, -ggc_bracket(sf, b, a).matrix, tolerance
        ),
        residual_from_operators(
            "gac_symmetry", gac, gac_bracket(sf, b, a), tolerance
        ),
        residual_from_operators(
            "geomutator_self_vanishes",
            geomutator(sf, a, a),
            np.zeros_like(a.matrix),
            tolerance,
        ),
        residual_from_operators(
            "geomutator_left_structure",
            geomutator(sf, m_s, a),
            compose(m_s, commutator_cr(m_s, a)),
            tolerance,
        ),
        residual_from_operators(
            "geomutator_right_structure",
            geomutator(sf, a, m_s),
            compose(m_s, commutator_cr(a, m_s)),
            tolerance,
        ),
        residual_from_operators(
            "geomutator_sandwich_split",
            deform_odd,
            sandwich_asym(sf, a, b).matrix - compose(plain_comm, m_s).matrix,
            tolerance,
        ),
        residual_from_operators(
            "anti_geomutator_sandwich_split",
            deform_even,
            sandwich_sym(sf, a, b).matrix + compose(plain_anti, m_s).matrix,
            tolerance,
        ),
        residual_from_operators(
            "gac_plus_ggc",
            gac.matrix + ggc.matrix,
            2.0 * (ab.matrix + asb.matrix + compose(ba, m_s).matrix),
            tolerance,
        ),
        residual_from_operators(
            "gac_minus_ggc",
            gac.matrix - ggc.matrix,
            2.0 * (ba.matrix + compose(ab, m_s).matrix + bsa.matrix),
            tolerance,
        ),
    ]
    return checks
