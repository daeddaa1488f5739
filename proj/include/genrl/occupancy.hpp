#pragma once

#include <Eigen/Dense>

namespace genrl {

/// Discounted state-action visitation measure of a policy, plus its
/// state marginal d(s) = sum_a mu(s,a).
///
/// For exact solves the total mass is 1/(1-gamma) and tiny negative
/// round-off is clamped to zero before the struct is returned. Sampled
/// estimators (count_estimate) reuse the struct and document their own
/// bias.
struct OccupancyMeasure {
    Eigen::MatrixXd state_action;   // [n_states, n_actions]
    Eigen::VectorXd state_marginal; // [n_states]
    double gamma = 0.0;

    double total_mass() const { return state_action.sum(); }
};

} // namespace genrl
