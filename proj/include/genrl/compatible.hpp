#pragma once

#include <Eigen/Dense>

#include "genrl/mdp.hpp"

namespace genrl {

/// Linear approximation g_w(s,a) = <w, phi(s,a)> of the Q-values, with
/// the compatible features phi(s,a) = grad_theta log pi(a|s). Fitting
/// under the d(s)pi(a|s)-weighted least-squares condition leaves the
/// policy gradient unchanged when g_w replaces Q.
struct CompatibleApprox {
    Eigen::VectorXd weights;  // [S*A]
    Eigen::MatrixXd features; // [S*A pairs, S*A params], row = pair s*A+a
    double residual_norm = 0.0;

    double value(int pair) const { return features.row(pair).dot(weights); }
};

/// Score-feature matrix: row (s,a), column (s',b) holds
/// 1(s'=s) * (1(b=a) - pi(b|s)), the softmax log-gradient. The all-ones
/// direction within each state block is a structural null mode.
Eigen::MatrixXd score_features(const PolicyParams& params);

/// Minimum-norm weighted least-squares fit of q_values onto the
/// compatible features, weights d(s)pi(a|s), via SVD with absolute
/// singular-value cutoff 1e-10. The returned weights satisfy the
/// orthogonality condition sum mu(s)pi(a|s)(Q - g_w)phi = 0.
CompatibleApprox fit_compatible(const TabularMdp& mdp, const PolicyParams& params,
                                const Eigen::VectorXd& q_values);

/// Policy gradient assembled from the fitted approximation:
///   grad(s,b) = sum_a d(s) * dpi(a|s)/dtheta(s,b) * g_w(s,a).
/// Makes no use of the original Q-values.
Eigen::MatrixXd fa_policy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                   const CompatibleApprox& approx);

} // namespace genrl
