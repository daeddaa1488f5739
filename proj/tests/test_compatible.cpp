#include <doctest.h>

#include <cmath>

#include "genrl/compatible.hpp"
#include "genrl/exact.hpp"
#include "test_helpers.hpp"

using namespace genrl;

namespace {

Eigen::VectorXd entropy_q_values(const TabularMdp& mdp, const PolicyParams& params) {
    const OccupancyMeasure mu = occupancy_exact(mdp, params);
    const Eigen::MatrixXd r_pi = UtilitySpec::neg_entropy().gradient(mu);
    Eigen::VectorXd r_flat(mdp.n_pairs());
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) r_flat(mdp.pair_index(s, a)) = r_pi(s, a);
    return q_value(discounted_operator(mdp, params), r_flat);
}

Eigen::VectorXd orthogonality_residual(const TabularMdp& mdp, const PolicyParams& params,
                                       const Eigen::VectorXd& q_values,
                                       const CompatibleApprox& approx) {
    const Eigen::MatrixXd pi = policy_probs(params);
    const Eigen::VectorXd d = occupancy_exact(mdp, params).state_marginal;
    Eigen::VectorXd residual = Eigen::VectorXd::Zero(mdp.n_pairs());
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a) {
            const int pair = mdp.pair_index(s, a);
            const double gap = q_values(pair) - approx.value(pair);
            residual += d(s) * pi(s, a) * gap * approx.features.row(pair).transpose();
        }
    return residual;
}

} // namespace

TEST_CASE("a realizable target is reproduced with negligible residual") {
    const TabularMdp mdp = testutil::suite_mdp(1);
    const PolicyParams params = testutil::random_params(5, 3, 1);
    const Eigen::MatrixXd phi = score_features(params);
    Eigen::VectorXd w_star(15);
    Rng rng = Rng::child(123, 0);
    for (int i = 0; i < 15; ++i) w_star(i) = rng.normal();
    const Eigen::VectorXd target = phi * w_star;

    const CompatibleApprox approx = fit_compatible(mdp, params, target);
    CHECK(approx.residual_norm <= 1e-10);
    for (int pair = 0; pair < 15; ++pair)
        CHECK(std::abs(approx.value(pair) - target(pair)) <= 1e-8);
}

TEST_CASE("state-constant Q-values project to the zero approximation") {
    const TabularMdp mdp = testutil::suite_mdp(2);
    const PolicyParams params = testutil::random_params(5, 3, 2);
    Eigen::VectorXd q_values(15);
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 3; ++a) q_values(mdp.pair_index(s, a)) = 2.0 + 0.7 * s;
    const CompatibleApprox approx = fit_compatible(mdp, params, q_values);
    for (int pair = 0; pair < 15; ++pair) CHECK(std::abs(approx.value(pair)) <= 1e-8);
    CHECK(orthogonality_residual(mdp, params, q_values, approx).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("the fitted weights satisfy the weighted orthogonality condition") {
    const TabularMdp mdp = testutil::suite_mdp(3);
    const PolicyParams params = testutil::random_params(5, 3, 3);
    const Eigen::VectorXd q_values = entropy_q_values(mdp, params);
    const CompatibleApprox approx = fit_compatible(mdp, params, q_values);
    CHECK(orthogonality_residual(mdp, params, q_values, approx).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("the approximated gradient equals the exact gradient") {
    for (std::uint64_t seed : {4ULL, 5ULL, 6ULL}) {
        const TabularMdp mdp = testutil::suite_mdp(seed);
        const PolicyParams params = testutil::random_params(5, 3, seed);
        const Eigen::VectorXd q_values = entropy_q_values(mdp, params);
        const CompatibleApprox approx = fit_compatible(mdp, params, q_values);
        const Eigen::MatrixXd via_fa = fa_policy_gradient(mdp, params, approx);
        const Eigen::MatrixXd exact = policy_gradient(mdp, params, UtilitySpec::neg_entropy());
        CHECK((via_fa - exact).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("zero weights give a zero gradient") {
    const TabularMdp mdp = testutil::suite_mdp(7);
    const PolicyParams params = testutil::random_params(5, 3, 7);
    CompatibleApprox approx;
    approx.weights = Eigen::VectorXd::Zero(15);
    approx.features = score_features(params);
    CHECK(fa_policy_gradient(mdp, params, approx).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-state constant shifts of the weights change nothing") {
    const TabularMdp mdp = testutil::suite_mdp(8);
    const PolicyParams params = testutil::random_params(5, 3, 8);
    const Eigen::VectorXd q_values = entropy_q_values(mdp, params);
    const CompatibleApprox fitted = fit_compatible(mdp, params, q_values);

    CompatibleApprox shifted = fitted;
    for (int s = 0; s < 5; ++s)
        for (int a = 0; a < 3; ++a) shifted.weights(mdp.pair_index(s, a)) += 0.37 * (s + 1);

    for (int pair = 0; pair < 15; ++pair)
        CHECK(std::abs(shifted.value(pair) - fitted.value(pair)) <= 1e-10);
    const Eigen::MatrixXd g1 = fa_policy_gradient(mdp, params, fitted);
    const Eigen::MatrixXd g2 = fa_policy_gradient(mdp, params, shifted);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit rejects malformed q-value vectors") {
    const TabularMdp mdp = testutil::suite_mdp(9);
    const PolicyParams params = testutil::random_params(5, 3, 9);
    CHECK_THROWS_AS(fit_compatible(mdp, params, Eigen::VectorXd::Zero(7)), std::invalid_argument);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(15);
    bad(3) = std::nan("");
    CHECK_THROWS_AS(fit_compatible(mdp, params, bad), std::invalid_argument);
}
