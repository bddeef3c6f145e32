#pragma once

namespace teamvar {

/// Shared numeric tolerances. Tests, the optimizer, and the CLI all read
/// from one instance so a tolerance override applies everywhere at once.
struct NumericSettings {
    /// Row-stochasticity check when a TransitionMatrix is constructed.
    double row_sum_tol = 1e-12;
    /// Rank threshold for the dense linear solves (stationary distribution,
    /// Poisson equation). Rank deficiency beyond this raises SingularError.
    double solve_tol = 1e-10;
    /// Poisson residual bound, g = c - J*1 + P*g.
    double residual_tol = 1e-9;
    /// Tie band in the policy-improvement argmin and in the necessary-condition
    /// inequality check.
    double tie_tol = 1e-9;
    /// Threshold separating a strictly positive directional derivative from a
    /// first-order stationary direction in convergence certificates.
    double certificate_tol = 1e-9;
    /// A policy-iteration step that fails to decrease the team variance by
    /// more than this is treated as a numerical fault.
    double strict_decrease_tol = 1e-12;
    /// Band around the enumeration minimum treated as attaining it.
    double enumeration_tie_tol = 1e-12;
    /// Row-sum slack accepted when loading scenario files; rows inside this
    /// band (but outside row_sum_tol) are renormalized on load.
    double scenario_row_sum_tol = 1e-9;
};

} // namespace teamvar
