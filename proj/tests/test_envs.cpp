#include <doctest.h>

#include "genrl/envs.hpp"
#include "genrl/errors.hpp"
#include "genrl/exact.hpp"
#include "genrl/utility.hpp"
#include "test_helpers.hpp"

using namespace genrl;

TEST_CASE("chain moves right deterministically and reflects at the ends") {
    const TabularMdp mdp = build(EnvSpec::chain(2, 0.9));
    CHECK(validate(mdp).empty());
    CHECK(mdp.p(0, 1, 1) == 1.0); // right from 0 lands in 1
    CHECK(mdp.p(0, 0, 0) == 1.0); // left reflects
    CHECK(mdp.p(1, 1, 1) == 1.0); // right reflects at the top
    CHECK(mdp.q(0) == 1.0);
}

TEST_CASE("1x1 gridworld self-loops under every action and slip") {
    const TabularMdp mdp = build(EnvSpec::gridworld(1, 1, 0.3, 0.9));
    CHECK(validate(mdp).empty());
    for (int a = 0; a < 4; ++a) CHECK(mdp.p(0, a, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gridworld slip mass goes where it should") {
    const TabularMdp mdp = build(EnvSpec::gridworld(5, 5, 0.1, 0.95));
    CHECK(validate(mdp).empty());
    // interior cell (2,2) = state 12; up = state 7
    CHECK(mdp.p(12, 0, 7) == doctest::Approx(0.9 + 0.025).epsilon(1e-15));
    CHECK(mdp.p(12, 0, 17) == doctest::Approx(0.025).epsilon(1e-15)); // down
    CHECK(mdp.p(12, 0, 11) == doctest::Approx(0.025).epsilon(1e-15)); // left
    CHECK(mdp.p(12, 0, 13) == doctest::Approx(0.025).epsilon(1e-15)); // right
}

TEST_CASE("random mdp generation is deterministic and always valid") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const TabularMdp a = build(EnvSpec::random_mdp(5, 3, 0.9, seed));
        const TabularMdp b = build(EnvSpec::random_mdp(5, 3, 0.9, seed));
        CHECK(validate(a).empty());
        CHECK(a.transition == b.transition);
        CHECK(a.initial_dist == b.initial_dist);
    }
    const TabularMdp c = build(EnvSpec::random_mdp(5, 3, 0.9, 1));
    const TabularMdp d = build(EnvSpec::random_mdp(5, 3, 0.9, 2));
    CHECK(c.transition != d.transition);
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(build(EnvSpec::chain(0, 0.9)), InvalidSpec);
    CHECK_THROWS_AS(build(EnvSpec::gridworld(0, 3, 0.1, 0.9)), InvalidSpec);
    CHECK_THROWS_AS(build(EnvSpec::random_mdp(3, 0, 0.9, 1)), InvalidSpec);
    CHECK_THROWS_AS(EnvSpec::chain(5, 1.0), InvalidSpec);
    CHECK_THROWS_AS(build(EnvSpec::gridworld(2, 2, 1.0, 0.9)), InvalidSpec);
}

TEST_CASE("expert occupancy carries the right mass and self-imitation is free") {
    const TabularMdp mdp = build(EnvSpec::chain(2, 0.9));
    const PolicyParams uniform = uniform_params(2, 2);
    const Eigen::MatrixXd mu_expert = expert_occupancy(mdp, uniform);
    CHECK(mu_expert.sum() == doctest::Approx(10.0).epsilon(1e-10));

    const UtilitySpec spec = UtilitySpec::apprenticeship(mu_expert);
    CHECK(spec.value(occupancy_exact(mdp, uniform)) <= 1e-18);
}

TEST_CASE("a near-deterministic right mover concentrates mass on the right") {
    const TabularMdp mdp = build(EnvSpec::chain(5, 0.95));
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(5, 2);
    theta.col(1).setConstant(4.0); // strong right bias
    const Eigen::MatrixXd mu_expert = expert_occupancy(mdp, PolicyParams{theta});
    const double top_two = mu_expert.row(3).sum() + mu_expert.row(4).sum();
    CHECK(top_two / mu_expert.sum() >= 0.80);
}
