#pragma once

#include <cstdint>

#include "genrl/mdp.hpp"

namespace genrl {

/// Seeded benchmark generator descriptor. Every generated MDP passes
/// validate() with zero violations, and generation is a pure function
/// of the spec.
struct EnvSpec {
    enum class Kind { kChain, kGridworld, kRandomMdp };
    Kind kind = Kind::kChain;
    double gamma = 0.9;

    int chain_length = 0; // chain

    int grid_width = 0; // gridworld
    int grid_height = 0;
    double slip_prob = 0.0;

    int n_states = 0; // random_mdp
    int n_actions = 0;
    std::uint64_t seed = 0;

    static EnvSpec chain(int length, double gamma);
    static EnvSpec gridworld(int width, int height, double slip_prob, double gamma);
    static EnvSpec random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed);
};

/// Instantiates the spec:
///  - chain: N states, 2 actions (0=left, 1=right), deterministic moves,
///    reflecting ends, q = point mass on state 0;
///  - gridworld: W*H states (state = row*W + col), 4 actions
///    (0=up, 1=right, 2=down, 3=left), with probability slip_prob the
///    move direction is redrawn uniformly, walls reflect in place,
///    q = point mass on cell (0,0);
///  - random_mdp: flat-Dirichlet transition rows and initial distribution,
///    all from the seed.
/// Throws InvalidSpec on out-of-range parameters.
TabularMdp build(const EnvSpec& spec);

/// Exact occupancy table of an expert policy, usable as the
/// apprenticeship target.
Eigen::MatrixXd expert_occupancy(const TabularMdp& mdp, const PolicyParams& expert_params);

} // namespace genrl
