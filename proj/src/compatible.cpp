#include "genrl/compatible.hpp"

#include <stdexcept>

#include "genrl/exact.hpp"

namespace genrl {

namespace {
constexpr double kSvdCutoff = 1e-10;
}

Eigen::MatrixXd score_features(const PolicyParams& params) {
    const Eigen::MatrixXd pi = policy_probs(params);
    const int S = static_cast<int>(pi.rows());
    const int A = static_cast<int>(pi.cols());
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(S * A, S * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            for (int b = 0; b < A; ++b)
                phi(s * A + a, s * A + b) = (b == a ? 1.0 : 0.0) - pi(s, b);
    return phi;
}

CompatibleApprox fit_compatible(const TabularMdp& mdp, const PolicyParams& params,
                                const Eigen::VectorXd& q_values) {
    if (q_values.size() != mdp.n_pairs())
        throw std::invalid_argument("q_values length must equal n_states*n_actions");
    if (!q_values.allFinite()) throw std::invalid_argument("q_values must be finite");

    const Eigen::MatrixXd pi = policy_probs(params);
    const Eigen::VectorXd d = occupancy_exact(mdp, params).state_marginal;

    CompatibleApprox approx;
    approx.features = score_features(params);

    // weight each pair by mu(s) pi(a|s), the literal Eq-11 factorization
    Eigen::VectorXd sqrt_w(mdp.n_pairs());
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            sqrt_w(mdp.pair_index(s, a)) = std::sqrt(d(s) * pi(s, a));

    const Eigen::MatrixXd lhs = sqrt_w.asDiagonal() * approx.features;
    const Eigen::VectorXd rhs = sqrt_w.asDiagonal() * q_values;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd inv_sigma = svd.singularValues();
    for (Eigen::Index i = 0; i < inv_sigma.size(); ++i)
        inv_sigma(i) = inv_sigma(i) > kSvdCutoff ? 1.0 / inv_sigma(i) : 0.0;
    approx.weights =
        svd.matrixV() * inv_sigma.asDiagonal() * (svd.matrixU().transpose() * rhs);

    approx.residual_norm = (rhs - lhs * approx.weights).norm();
    return approx;
}

Eigen::MatrixXd fa_policy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                   const CompatibleApprox& approx) {
    const Eigen::MatrixXd pi = policy_probs(params);
    const Eigen::VectorXd d = occupancy_exact(mdp, params).state_marginal;

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int b = 0; b < mdp.n_actions; ++b) {
            double acc = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) {
                const double jac = pi(s, a) * ((b == a ? 1.0 : 0.0) - pi(s, b));
                acc += jac * approx.value(mdp.pair_index(s, a));
            }
            grad(s, b) = d(s) * acc;
        }
    }
    return grad;
}

} // namespace genrl
