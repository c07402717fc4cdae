"""Exact elliptic nets, closed-form sign prediction, and denominator nets.

The exact layer (curves, nets, denoms) works in rational arithmetic; the
analytic layer (analytic, signs) computes the real parameters q, u, beta
that drive the parity formulas; stats holds the distribution diagnostics.
"""

from .analytic import (
    AnalyticContext,
    ThetaValue,
    analytic_context,
    beta,
    normalize_u,
    omega_parity_components,
    point_parameter,
    real_parameters,
    tate_coefficients,
    theta_eval,
)
from .curves import (
    Curve,
    DivisionPolys,
    Point,
    add_points,
    curve,
    curve_from_eds,
    decompose_point,
    division_poly_eval,
    linear_combo,
    multiple,
    nonsingular_reduction_check,
    torsion_order,
)
from .denoms import (
    DenomConfig,
    GammaMatrix,
    F_eval,
    denom_config,
    denom_value,
    gamma_matrix,
    pair_denominator_form,
    scaled_net,
    shipsey_signs,
    signed_denominator_net,
    verify_psihat_equals_denoms,
)
from .nets import (
    ANALYTIC,
    SCALED,
    NetConfig,
    NetTable,
    box_indices,
    coordinate_identity_check,
    net_config,
    net_seed,
    net_table,
    net_value,
    verify_recurrence,
)
from .signs import (
    QuadraticFormSigns,
    SignPredictor,
    calibrate_twist,
    calibrated_predictor,
    combined_parity,
    parity_H,
    parity_reduced,
    predictor_with_twist,
    quadratic_form_parity,
    rank2_parity,
    twist_exponent,
)
from .stats import CountReport, floor_array_distribution, sign_counts, weyl_sum

__version__ = "0.1.0"
