#include "genrl/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "genrl/rng.hpp"

namespace genrl {

namespace {

constexpr double kSumTol = 1e-12;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

PolicyParams uniform_params(int n_states, int n_actions) {
    return PolicyParams{Eigen::MatrixXd::Zero(n_states, n_actions)};
}

std::vector<std::string> validate(const TabularMdp& mdp) {
    std::vector<std::string> out;
    if (mdp.n_states <= 0) out.push_back("n_states must be positive, got " + std::to_string(mdp.n_states));
    if (mdp.n_actions <= 0) out.push_back("n_actions must be positive, got " + std::to_string(mdp.n_actions));
    if (!(mdp.gamma >= 0.0) || mdp.gamma >= 1.0)
        out.push_back("gamma must be in [0,1), got " + fmt_double(mdp.gamma));
    if (mdp.n_states <= 0 || mdp.n_actions <= 0) return out;

    const std::size_t want_p = static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states;
    if (mdp.transition.size() != want_p) {
        out.push_back("transition has " + std::to_string(mdp.transition.size()) +
                      " entries, expected n_states*n_actions*n_states = " + std::to_string(want_p));
        return out;
    }
    if (mdp.initial_dist.size() != static_cast<std::size_t>(mdp.n_states)) {
        out.push_back("initial_dist has " + std::to_string(mdp.initial_dist.size()) +
                      " entries, expected n_states = " + std::to_string(mdp.n_states));
        return out;
    }
    if (!mdp.reward.empty() &&
        mdp.reward.size() != static_cast<std::size_t>(mdp.n_states) * mdp.n_actions) {
        out.push_back("reward has " + std::to_string(mdp.reward.size()) +
                      " entries, expected n_states*n_actions = " +
                      std::to_string(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions));
    }

    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double row_sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) {
                const double v = mdp.p(s, a, s2);
                if (!std::isfinite(v)) {
                    out.push_back("transition entry not finite at (s=" + std::to_string(s) +
                                  ",a=" + std::to_string(a) + ",s'=" + std::to_string(s2) + ")");
                } else if (v < 0.0) {
                    out.push_back("transition entry " + fmt_double(v) + " < 0 at (s=" +
                                  std::to_string(s) + ",a=" + std::to_string(a) +
                                  ",s'=" + std::to_string(s2) + ")");
                }
                row_sum += v;
            }
            if (std::isfinite(row_sum) && std::abs(row_sum - 1.0) > kSumTol) {
                out.push_back("row sum " + fmt_double(row_sum) + " != 1 at (s=" +
                              std::to_string(s) + ",a=" + std::to_string(a) + ")");
            }
        }
    }

    double q_sum = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        const double v = mdp.initial_dist[s];
        if (!std::isfinite(v)) {
            out.push_back("initial_dist entry not finite at s=" + std::to_string(s));
        } else if (v < 0.0) {
            out.push_back("initial_dist entry " + fmt_double(v) + " < 0 at s=" + std::to_string(s));
        }
        q_sum += v;
    }
    if (std::isfinite(q_sum) && std::abs(q_sum - 1.0) > kSumTol)
        out.push_back("initial_dist sum " + fmt_double(q_sum) + " != 1");

    for (std::size_t i = 0; i < mdp.reward.size(); ++i) {
        if (!std::isfinite(mdp.reward[i])) {
            out.push_back("reward entry not finite at (s=" + std::to_string(i / mdp.n_actions) +
                          ",a=" + std::to_string(i % mdp.n_actions) + ")");
        }
    }
    return out;
}

Eigen::MatrixXd policy_probs(const PolicyParams& params) {
    if (!params.theta.allFinite())
        throw std::invalid_argument("policy parameters must be finite");
    const auto S = params.theta.rows();
    const auto A = params.theta.cols();
    Eigen::MatrixXd probs(S, A);
    for (Eigen::Index s = 0; s < S; ++s) {
        const double m = params.theta.row(s).maxCoeff();
        double z = 0.0;
        for (Eigen::Index a = 0; a < A; ++a) {
            probs(s, a) = std::exp(params.theta(s, a) - m);
            z += probs(s, a);
        }
        probs.row(s) /= z;
    }
    return probs;
}

Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const PolicyParams& params) {
    const Eigen::MatrixXd pi = policy_probs(params);
    Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                kernel(s, s2) += pi(s, a) * mdp.p(s, a, s2);
    return kernel;
}

Trajectory sample_trajectory(const TabularMdp& mdp, const PolicyParams& params,
                             int horizon, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const Eigen::MatrixXd pi = policy_probs(params);
    Rng rng(seed);

    Trajectory traj;
    traj.seed = seed;
    traj.horizon = horizon;
    traj.steps.reserve(horizon);

    int s = rng.categorical({mdp.initial_dist.data(), mdp.initial_dist.size()});
    std::vector<double> pi_row(mdp.n_actions);
    for (int t = 0; t < horizon; ++t) {
        for (int a = 0; a < mdp.n_actions; ++a) pi_row[a] = pi(s, a);
        const int a = rng.categorical(pi_row);
        const double* p_row = &mdp.transition[(static_cast<std::size_t>(s) * mdp.n_actions + a) *
                                              mdp.n_states];
        const int s2 = rng.categorical({p_row, static_cast<std::size_t>(mdp.n_states)});
        traj.steps.push_back({s, a, s2});
        s = s2;
    }
    return traj;
}

} // namespace genrl
