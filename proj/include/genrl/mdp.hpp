#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace genrl {

/// Finite MDP (S, A, gamma, P, q) with an optional reward table.
///
/// Invariants (see validate): every transition row is a probability
/// distribution, initial_dist is a probability distribution, and
/// 0 <= gamma < 1. Immutable after construction; all operations on it
/// are pure functions.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    std::vector<double> transition;   // [s][a][s'] row-major
    std::vector<double> initial_dist; // [s]
    std::vector<double> reward;       // [s][a] row-major; empty when absent

    double p(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double q(int s) const { return initial_dist[s]; }
    bool has_reward() const { return !reward.empty(); }
    double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }

    int n_pairs() const { return n_states * n_actions; }
    int pair_index(int s, int a) const { return s * n_actions + a; }
};

/// Parameters of a tabular softmax policy, pi(a|s) ~ exp(theta(s,a)).
/// Adding a constant to a row of theta leaves the policy unchanged.
struct PolicyParams {
    Eigen::MatrixXd theta; // [n_states, n_actions]
};

/// All-zero parameters, i.e. the uniform policy.
PolicyParams uniform_params(int n_states, int n_actions);

struct TrajectoryStep {
    int state;
    int action;
    int next_state;
};

/// A sampled rollout. Steps chain: steps[t].next_state == steps[t+1].state.
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::uint64_t seed = 0;
    int horizon = 0;
};

/// Checks every TabularMdp invariant and returns one message per
/// violation, each anchored to the offending entry. Empty means valid.
std::vector<std::string> validate(const TabularMdp& mdp);

/// Row-wise softmax of theta with max-subtraction. Rows sum to 1.
Eigen::MatrixXd policy_probs(const PolicyParams& params);

/// State-to-state kernel under the policy:
/// K(s,s') = sum_a pi(a|s) P(s'|s,a). Row-stochastic.
Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const PolicyParams& params);

/// Rolls out `horizon` steps. s0 is drawn from q, then each step draws
/// a_t from pi(.|s_t) and s_{t+1} from P(.|s_t,a_t), all by inverse-CDF
/// from a single mt19937_64 stream seeded with `seed`. Pure function of
/// its arguments.
Trajectory sample_trajectory(const TabularMdp& mdp, const PolicyParams& params,
                             int horizon, std::uint64_t seed);

} // namespace genrl
