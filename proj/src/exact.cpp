#include "genrl/exact.hpp"

#include <cmath>

#include "genrl/errors.hpp"

namespace genrl {

namespace {

Eigen::VectorXd flatten_rows(const Eigen::MatrixXd& table) {
    Eigen::VectorXd v(table.size());
    for (Eigen::Index s = 0; s < table.rows(); ++s)
        for (Eigen::Index a = 0; a < table.cols(); ++a)
            v(s * table.cols() + a) = table(s, a);
    return v;
}

} // namespace

OccupancyMeasure occupancy_exact(const TabularMdp& mdp, const PolicyParams& params) {
    const int S = mdp.n_states;
    const Eigen::MatrixXd pi = policy_probs(params);
    const Eigen::MatrixXd kernel = policy_kernel(mdp, params);

    Eigen::VectorXd q(S);
    for (int s = 0; s < S; ++s) q(s) = mdp.q(s);

    const Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(S, S) - mdp.gamma * kernel.transpose();
    Eigen::VectorXd d = lhs.partialPivLu().solve(q);

    if (!d.allFinite() || (lhs * d - q).lpNorm<Eigen::Infinity>() > 1e-8)
        throw SolverFailure("occupancy solve failed: singular or inconsistent system");

    d = d.cwiseMax(0.0); // round-off clamp

    OccupancyMeasure mu;
    mu.gamma = mdp.gamma;
    mu.state_marginal = d;
    mu.state_action = d.asDiagonal() * pi;
    return mu;
}

DiscountedOperator discounted_operator(const TabularMdp& mdp, const PolicyParams& params) {
    const int n = mdp.n_pairs();
    if (n > kMaxDensePairs)
        throw SizeExceeded("state-action pair count " + std::to_string(n) +
                           " exceeds dense guard " + std::to_string(kMaxDensePairs));

    const Eigen::MatrixXd pi = policy_probs(params);
    Eigen::MatrixXd m(n, n);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                for (int a2 = 0; a2 < mdp.n_actions; ++a2)
                    m(mdp.pair_index(s, a), mdp.pair_index(s2, a2)) = mdp.p(s, a, s2) * pi(s2, a2);

    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * m;
    DiscountedOperator op;
    op.beta = lhs.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    if (!op.beta.allFinite())
        throw SolverFailure("discounted operator solve failed: non-finite inverse");
    return op;
}

Eigen::VectorXd q_value(const DiscountedOperator& op, const Eigen::VectorXd& reward) {
    return op.beta * reward;
}

Eigen::MatrixXd occupancy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                   int target_state, int target_action) {
    if (target_state < 0 || target_state >= mdp.n_states ||
        target_action < 0 || target_action >= mdp.n_actions)
        throw std::out_of_range("occupancy_gradient target out of bounds");

    const Eigen::MatrixXd pi = policy_probs(params);
    const Eigen::VectorXd d = occupancy_exact(mdp, params).state_marginal;
    const DiscountedOperator op = discounted_operator(mdp, params);
    const int target = mdp.pair_index(target_state, target_action);

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int b = 0; b < mdp.n_actions; ++b) {
            double acc = 0.0;
            // softmax Jacobian: d pi(a'|s) / d theta(s,b) = pi(a'|s) (1(b=a') - pi(b|s))
            for (int a2 = 0; a2 < mdp.n_actions; ++a2) {
                const double jac = pi(s, a2) * ((b == a2 ? 1.0 : 0.0) - pi(s, b));
                acc += op.beta(mdp.pair_index(s, a2), target) * jac;
            }
            grad(s, b) = d(s) * acc;
        }
    }
    return grad;
}

Eigen::MatrixXd policy_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                const UtilitySpec& utility) {
    const Eigen::MatrixXd pi = policy_probs(params);
    const OccupancyMeasure mu = occupancy_exact(mdp, params);
    const DiscountedOperator op = discounted_operator(mdp, params);
    const Eigen::VectorXd q_vals = q_value(op, flatten_rows(utility.gradient(mu)));

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int b = 0; b < mdp.n_actions; ++b) {
            double acc = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) {
                const double jac = pi(s, a) * ((b == a ? 1.0 : 0.0) - pi(s, b));
                acc += q_vals(mdp.pair_index(s, a)) * jac;
            }
            grad(s, b) = mu.state_marginal(s) * acc;
        }
    }
    return grad;
}

Eigen::MatrixXd finite_diff_gradient(const TabularMdp& mdp, const PolicyParams& params,
                                     const UtilitySpec& utility, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
    Eigen::MatrixXd grad(params.theta.rows(), params.theta.cols());
    PolicyParams probe = params;
    for (Eigen::Index s = 0; s < params.theta.rows(); ++s) {
        for (Eigen::Index a = 0; a < params.theta.cols(); ++a) {
            probe.theta(s, a) = params.theta(s, a) + step;
            const double f_plus = utility.value(occupancy_exact(mdp, probe));
            probe.theta(s, a) = params.theta(s, a) - step;
            const double f_minus = utility.value(occupancy_exact(mdp, probe));
            probe.theta(s, a) = params.theta(s, a);
            grad(s, a) = (f_plus - f_minus) / (2.0 * step);
        }
    }
    return grad;
}

GradReport grad_check(const TabularMdp& mdp, const PolicyParams& params,
                      const UtilitySpec& utility, double step) {
    GradReport report;
    report.analytic = policy_gradient(mdp, params, utility);
    report.numeric = finite_diff_gradient(mdp, params, utility, step);
    report.fd_step = step;
    report.max_abs_err = (report.analytic - report.numeric).cwiseAbs().maxCoeff();
    report.max_rel_err = 0.0;
    for (Eigen::Index i = 0; i < report.analytic.size(); ++i) {
        const double abs_err = std::abs(report.analytic(i) - report.numeric(i));
        const double scale = std::max(1.0, std::abs(report.numeric(i)));
        report.max_rel_err = std::max(report.max_rel_err, abs_err / scale);
    }
    return report;
}

} // namespace genrl
