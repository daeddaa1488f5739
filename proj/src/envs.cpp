#include "genrl/envs.hpp"

#include <cmath>

#include "genrl/errors.hpp"
#include "genrl/exact.hpp"
#include "genrl/rng.hpp"

namespace genrl {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidSpec("gamma must be in [0,1)");
}

std::vector<double> dirichlet_flat(Rng& rng, int n) {
    std::vector<double> v(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i] = -std::log1p(-rng.uniform());
        total += v[i];
    }
    for (int i = 0; i < n; ++i) v[i] /= total;
    return v;
}

TabularMdp build_chain(const EnvSpec& spec) {
    if (spec.chain_length < 1) throw InvalidSpec("chain length must be >= 1");
    const int n = spec.chain_length;
    TabularMdp mdp;
    mdp.n_states = n;
    mdp.n_actions = 2;
    mdp.gamma = spec.gamma;
    mdp.transition.assign(static_cast<std::size_t>(n) * 2 * n, 0.0);
    mdp.initial_dist.assign(n, 0.0);
    mdp.initial_dist[0] = 1.0;
    for (int s = 0; s < n; ++s) {
        const int left = std::max(0, s - 1);
        const int right = std::min(n - 1, s + 1);
        mdp.transition[(static_cast<std::size_t>(s) * 2 + 0) * n + left] = 1.0;
        mdp.transition[(static_cast<std::size_t>(s) * 2 + 1) * n + right] = 1.0;
    }
    return mdp;
}

TabularMdp build_gridworld(const EnvSpec& spec) {
    if (spec.grid_width < 1 || spec.grid_height < 1)
        throw InvalidSpec("gridworld dimensions must be >= 1");
    if (!(spec.slip_prob >= 0.0 && spec.slip_prob < 1.0))
        throw InvalidSpec("slip_prob must be in [0,1)");
    const int w = spec.grid_width;
    const int h = spec.grid_height;
    const int n = w * h;

    // 0=up, 1=right, 2=down, 3=left; walls reflect in place
    const int drow[4] = {-1, 0, 1, 0};
    const int dcol[4] = {0, 1, 0, -1};
    auto move = [&](int s, int dir) {
        const int row = s / w, col = s % w;
        const int r2 = row + drow[dir], c2 = col + dcol[dir];
        if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) return s;
        return r2 * w + c2;
    };

    TabularMdp mdp;
    mdp.n_states = n;
    mdp.n_actions = 4;
    mdp.gamma = spec.gamma;
    mdp.transition.assign(static_cast<std::size_t>(n) * 4 * n, 0.0);
    mdp.initial_dist.assign(n, 0.0);
    mdp.initial_dist[0] = 1.0;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            double* row = &mdp.transition[(static_cast<std::size_t>(s) * 4 + a) * n];
            row[move(s, a)] += 1.0 - spec.slip_prob;
            for (int dir = 0; dir < 4; ++dir) row[move(s, dir)] += spec.slip_prob / 4.0;
        }
    }
    return mdp;
}

TabularMdp build_random(const EnvSpec& spec) {
    if (spec.n_states < 1 || spec.n_actions < 1)
        throw InvalidSpec("random_mdp sizes must be >= 1");
    const int S = spec.n_states, A = spec.n_actions;
    TabularMdp mdp;
    mdp.n_states = S;
    mdp.n_actions = A;
    mdp.gamma = spec.gamma;
    mdp.transition.resize(static_cast<std::size_t>(S) * A * S);
    Rng rng = Rng::child(spec.seed, 0);
    mdp.initial_dist = dirichlet_flat(rng, S);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const std::vector<double> row = dirichlet_flat(rng, S);
            std::copy(row.begin(), row.end(),
                      mdp.transition.begin() + (static_cast<std::size_t>(s) * A + a) * S);
        }
    }
    return mdp;
}

} // namespace

EnvSpec EnvSpec::chain(int length, double gamma) {
    check_gamma(gamma);
    EnvSpec spec;
    spec.kind = Kind::kChain;
    spec.chain_length = length;
    spec.gamma = gamma;
    return spec;
}

EnvSpec EnvSpec::gridworld(int width, int height, double slip_prob, double gamma) {
    check_gamma(gamma);
    EnvSpec spec;
    spec.kind = Kind::kGridworld;
    spec.grid_width = width;
    spec.grid_height = height;
    spec.slip_prob = slip_prob;
    spec.gamma = gamma;
    return spec;
}

EnvSpec EnvSpec::random_mdp(int n_states, int n_actions, double gamma, std::uint64_t seed) {
    check_gamma(gamma);
    EnvSpec spec;
    spec.kind = Kind::kRandomMdp;
    spec.n_states = n_states;
    spec.n_actions = n_actions;
    spec.gamma = gamma;
    spec.seed = seed;
    return spec;
}

TabularMdp build(const EnvSpec& spec) {
    check_gamma(spec.gamma);
    switch (spec.kind) {
    case EnvSpec::Kind::kChain: return build_chain(spec);
    case EnvSpec::Kind::kGridworld: return build_gridworld(spec);
    case EnvSpec::Kind::kRandomMdp: return build_random(spec);
    }
    throw InvalidSpec("unknown env kind");
}

Eigen::MatrixXd expert_occupancy(const TabularMdp& mdp, const PolicyParams& expert_params) {
    return occupancy_exact(mdp, expert_params).state_action;
}

} // namespace genrl
