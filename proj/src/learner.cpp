#include "genrl/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "genrl/errors.hpp"
#include "genrl/exact.hpp"
#include "genrl/rng.hpp"

namespace genrl {

namespace {

void check_config(const TabularMdp& mdp, const TrainConfig& config) {
    if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (config.n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
    if (config.eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
    if (config.theta_init &&
        (config.theta_init->rows() != mdp.n_states || config.theta_init->cols() != mdp.n_actions))
        throw std::invalid_argument("theta_init shape must be [n_states, n_actions]");
}

PolicyParams initial_params(const TabularMdp& mdp, const TrainConfig& config) {
    if (config.theta_init) return PolicyParams{*config.theta_init};
    return uniform_params(mdp.n_states, mdp.n_actions);
}

double mean_policy_entropy(const Eigen::MatrixXd& pi) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < pi.rows(); ++s)
        for (Eigen::Index a = 0; a < pi.cols(); ++a)
            if (pi(s, a) > 0.0) total -= pi(s, a) * std::log(pi(s, a));
    return total / static_cast<double>(pi.rows());
}

TraceRow eval_row(const TabularMdp& mdp, const PolicyParams& params,
                  const UtilitySpec& utility, long step, const Eigen::VectorXd* d_estimate) {
    const OccupancyMeasure mu = occupancy_exact(mdp, params);
    TraceRow row;
    row.step = step;
    row.f_value = utility.value(mu);
    row.l1_occ_err =
        d_estimate ? (*d_estimate - mu.state_marginal).lpNorm<1>() : 0.0;
    row.grad_norm_proxy =
        policy_gradient(mdp, params, utility).cwiseAbs().maxCoeff();
    row.policy_entropy = mean_policy_entropy(policy_probs(params));
    return row;
}

} // namespace

TrainResult run_algorithm1(const TabularMdp& mdp, const TrainConfig& config) {
    check_config(mdp, config);
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    const StepSchedule occ_schedule =
        config.occupancy_schedule ? *config.occupancy_schedule : config.eta_schedule;

    PolicyParams params = initial_params(mdp, config);
    Eigen::MatrixXd pi = policy_probs(params);
    Eigen::VectorXd d_hat = Eigen::VectorXd::Constant(S, 1.0 / S); // uniform init, mass 1
    Eigen::MatrixXd q_table = Eigen::MatrixXd::Zero(S, A);
    const double uniform_base = 1.0 / static_cast<double>(S * A);
    const bool use_counts = config.occupancy_estimator == OccupancyEstimator::kEpisodicCount;
    Eigen::VectorXd episode_counts = Eigen::VectorXd::Zero(S);
    double episode_discount = 1.0;
    long episodes_folded = 0;

    Rng rng = Rng::child(config.seed, 0);
    TrainTrace trace;

    std::vector<double> row_buf(std::max(S, A));
    auto softmax_row = [&](int s) {
        const double m = params.theta.row(s).maxCoeff();
        double z = 0.0;
        for (int a = 0; a < A; ++a) {
            pi(s, a) = std::exp(params.theta(s, a) - m);
            z += pi(s, a);
        }
        pi.row(s) /= z;
    };

    OccupancyMeasure mu_hat;
    mu_hat.gamma = mdp.gamma;

    int s = 0;
    for (long t = 0; t < config.n_steps; ++t) {
        if (t % config.horizon == 0) {
            if (use_counts && t > 0) {
                // fold the finished episode into the running mean
                ++episodes_folded;
                d_hat += (episode_counts - d_hat) / static_cast<double>(episodes_folded);
            }
            episode_counts.setZero();
            episode_discount = 1.0;
            s = rng.categorical({mdp.initial_dist.data(), mdp.initial_dist.size()});
        }
        if (t % config.eval_every == 0)
            trace.rows.push_back(eval_row(mdp, params, config.utility, t, &d_hat));

        if (use_counts) {
            episode_counts(s) += episode_discount;
            episode_discount *= mdp.gamma;
        }

        for (int a = 0; a < A; ++a) row_buf[a] = pi(s, a);
        const int action = rng.categorical({row_buf.data(), static_cast<std::size_t>(A)});
        const double* p_row =
            &mdp.transition[(static_cast<std::size_t>(s) * A + action) * S];
        const int s_next = rng.categorical({p_row, static_cast<std::size_t>(S)});

        // occupancy estimate first, then the reward vector read off it
        if (!use_counts) {
            const double base = config.uniform_td_base ? uniform_base : mdp.q(s);
            td_update_in_place(d_hat, occ_schedule.at(t), base, mdp.gamma, s, s_next);
        }

        mu_hat.state_marginal = d_hat;
        mu_hat.state_action = d_hat.asDiagonal() * pi;
        const Eigen::MatrixXd reward = config.utility.gradient(mu_hat);

        double next_value;
        if (config.q_update == QUpdateRule::kPaperMin) {
            next_value = q_table.row(s_next).minCoeff();
        } else {
            next_value = pi.row(s_next).dot(q_table.row(s_next));
        }
        const double epsilon = config.epsilon_schedule.at(t);
        q_table(s, action) += epsilon * (reward(s, action) + mdp.gamma * next_value -
                                         q_table(s, action));

        // theta step along -score * Q for the visited pair
        const double eta = config.eta_schedule.at(t);
        const double q_sa = q_table(s, action);
        for (int b = 0; b < A; ++b) {
            const double score = (b == action ? 1.0 : 0.0) - pi(s, b);
            params.theta(s, b) -= eta * score * q_sa;
        }
        if (!params.theta.row(s).allFinite())
            throw NonFiniteUpdate("policy parameters became non-finite at step " +
                                      std::to_string(t),
                                  t);
        softmax_row(s);
        s = s_next;
    }

    trace.rows.push_back(eval_row(mdp, params, config.utility, config.n_steps, &d_hat));
    return TrainResult{std::move(params), std::move(trace)};
}

TrainResult run_exact_descent(const TabularMdp& mdp, const TrainConfig& config) {
    check_config(mdp, config);
    if (!(config.alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");

    PolicyParams params = initial_params(mdp, config);
    TrainTrace trace;
    for (long k = 0; k < config.n_steps; ++k) {
        if (k % config.eval_every == 0)
            trace.rows.push_back(eval_row(mdp, params, config.utility, k, nullptr));
        params.theta -= config.alpha * policy_gradient(mdp, params, config.utility);
        if (!params.theta.allFinite())
            throw NonFiniteUpdate("policy parameters became non-finite at step " +
                                      std::to_string(k),
                                  k);
    }
    trace.rows.push_back(eval_row(mdp, params, config.utility, config.n_steps, nullptr));
    return TrainResult{std::move(params), std::move(trace)};
}

} // namespace genrl
