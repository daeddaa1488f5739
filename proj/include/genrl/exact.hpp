#pragma once

#include <Eigen/Dense>

#include "genrl/mdp.hpp"
#include "genrl/occupancy.hpp"
#include "genrl/utility.hpp"

namespace genrl {

/// Dense-solve guard: operators above this many state-action pairs are
/// refused (SizeExceeded) rather than inverted.
inline constexpr int kMaxDensePairs = 4096;

/// Resolvent of the state-action chain: beta = (I - gamma*M)^{-1} with
/// M[(s,a),(s',a')] = P(s'|s,a) pi(a'|s'). Entry (i,j) is the discounted
/// sum over k of the k-step transition probability from pair i to pair j,
/// so indexing is (from-pair, to-pair) with pair index s*n_actions + a.
/// Every row sums to 1/(1-gamma).
struct DiscountedOperator {
    Eigen::MatrixXd beta; // [S*A, S*A]
};

/// Paired analytic/numeric gradients with error statistics.
/// max_rel_err is relative to max(1, |numeric|) per coordinate.
struct GradReport {
    Eigen::MatrixXd analytic;
    Eigen::MatrixXd numeric;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    double fd_step = 0.0;
};

/// Solves (I - gamma * K^T) d = q for the state marginal by dense LU
/// with partial pivoting, then expands mu(s,a) = d(s) pi(a|s).
/// Throws SolverFailure if the solve comes back non-finite or with a
/// large residual (cannot happen for a valid MDP with gamma < 1).
OccupancyMeasure occupancy_exact(const TabularMdp& mdp, const PolicyParams& params);

/// Dense resolvent over state-action pairs. Throws SizeExceeded when
/// n_states*n_actions > kMaxDensePairs.
DiscountedOperator discounted_operator(const TabularMdp& mdp, const PolicyParams& params);

/// Q(s,a) = sum_{s',a'} beta[(s,a),(s',a')] R(s',a'), i.e. beta * reward.
Eigen::VectorXd q_value(const DiscountedOperator& op, const Eigen::VectorXd& reward);

/// Gradient of one occupancy coordinate mu(s,a) with respect to theta:
///   d mu(s,a) / d theta = sum_{s',a'} d(s') beta[(s',a'),(s,a)] grad_theta pi(a'|s')
/// using the closed-form softmax Jacobian. Returns a theta-shaped table.
Eigen::MatrixXd occupancy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                   int target_state, int target_action);

/// Policy gradient of f(mu^pi):
///   grad_theta f = sum_{s,a} d(s) Q_{R_pi}(s,a) grad_theta pi(a|s),
/// with R_pi = utility.gradient(mu^pi) and Q computed through the
/// discounted operator. Returns a theta-shaped table.
Eigen::MatrixXd policy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                const UtilitySpec& utility);

/// Central finite differences of theta -> utility.value(occupancy(theta)),
/// one exact solve per probe. The independent oracle for policy_gradient.
Eigen::MatrixXd finite_diff_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                     const UtilitySpec& utility, double step);

/// Runs policy_gradient against finite_diff_gradient and bundles both
/// tables with their error statistics.
GradReport grad_check(const TabularMdp& mdp, const PolicyParams& params,
                      const UtilitySpec& utility, double step);

} // namespace genrl
