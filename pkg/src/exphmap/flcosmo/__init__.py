"""Friedmann-Lemaitre dynamics of exponentially harmonic fields."""

from .matter import (
    FIG3_INITIAL,
    FIG3_PARAMS,
    FIG3_SPAN,
    MatterRates,
    MatterState,
    acceleration,
    detect_acceleration_transition,
    first_crossing_below,
    integrate_matter,
    matter_constraint_residual,
    matter_initial_state,
    matter_rhs,
    matter_second_order_rhs,
    matter_state_derivative,
    phi_energy_density,
    radiation_density,
)
from .uncoupled import (
    integrate_uncoupled,
    matter_background,
    uncoupled_field_rhs,
    uncoupled_first_integral,
    uncoupled_solve_euclidean,
)
from .vacuum import (
    VacuumFlatState,
    curved_u_residual,
    curved_y_residual,
    friedmann_constraint_residual,
    hubble_from_constraint,
    hubble_from_uz,
    implied_curvature,
    integrate_vacuum_curved,
    integrate_vacuum_flat,
    integrate_vacuum_flat_uz,
    scale_factor_from_phidot,
    small_lambda_curved,
    small_lambda_flat_closed_form,
    small_u_approximation,
    uz_from_hy,
    vacuum_curved_uz_rhs,
    vacuum_flat_rhs,
    vacuum_flat_uz_rhs,
)
