#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "genrl/bootstrap.hpp"
#include "genrl/mdp.hpp"
#include "genrl/utility.hpp"

namespace genrl {

/// How the critic backs up the next-state value:
///   kPaperMin          -> gamma * min_a Q(s',a)   (optimal-control flavor)
///   kOnPolicyExpected  -> gamma * sum_a pi(a|s') Q(s',a)  (matches the
///                         on-policy Q the gradient theorem needs; default)
enum class QUpdateRule { kPaperMin, kOnPolicyExpected };

/// How the learner estimates the occupancy marginal that the utility
/// gradient is evaluated at:
///   kEpisodicCount -> discounted visit counts per episode, averaged
///                     across episodes (running mean). Consistent for the
///                     true marginal up to gamma^horizon truncation;
///                     default.
///   kTdUpdate      -> the one-coordinate TD rule on each sampled
///                     transition. Its fixed point matches the true
///                     marginal only when the policy kernel is symmetric;
///                     on asymmetric dynamics the resulting reward vector
///                     is systematically off. Kept as the literal variant.
enum class OccupancyEstimator { kEpisodicCount, kTdUpdate };

struct TrainConfig {
    StepSchedule epsilon_schedule = StepSchedule::polynomial(0.5, 0.6); // critic
    StepSchedule eta_schedule = StepSchedule::polynomial(0.5, 0.6);     // policy + occupancy
    /// Decoupled step sizes for the TD occupancy estimator; defaults to
    /// eta_schedule. Ignored by kEpisodicCount, which averages episodes.
    std::optional<StepSchedule> occupancy_schedule;
    double alpha = 0.01; // exact-descent learning rate
    int horizon = 100;   // episodic restart period
    long n_steps = 0;
    QUpdateRule q_update = QUpdateRule::kOnPolicyExpected;
    OccupancyEstimator occupancy_estimator = OccupancyEstimator::kEpisodicCount;
    std::uint64_t seed = 0;
    UtilitySpec utility;
    long eval_every = 1000;
    /// TD base term (kTdUpdate only): q(s_t) when false; the literal
    /// uniform constant 1/(S*A) when true.
    bool uniform_td_base = false;
    std::optional<Eigen::MatrixXd> theta_init; // zeros (uniform policy) if unset
};

struct TraceRow {
    long step;
    double f_value;        // exact utility value at the current policy
    double l1_occ_err;     // L1 gap between TD estimate and exact marginal
    double grad_norm_proxy; // max-abs entry of the exact policy gradient
    double policy_entropy; // mean action entropy over states
};

struct TrainTrace {
    std::vector<TraceRow> rows;
};

struct TrainResult {
    PolicyParams params;
    TrainTrace trace;
};

/// Online sample-based learner. Each environment step samples
/// a_t ~ pi(.|s_t) and s_{t+1} ~ P, TD-updates the occupancy marginal,
/// reads the reward vector off the utility gradient at the current
/// estimate, TD-updates the tabular critic, and steps theta down the
/// score-times-Q direction. Restarts from q every `horizon` steps.
/// Evaluation rows are exact even though learning is sampled. Fully
/// deterministic given (mdp, config). Throws NonFiniteUpdate if a
/// parameter leaves the finite range.
TrainResult run_algorithm1(const TabularMdp& mdp, const TrainConfig& config);

/// Deterministic baseline: theta <- theta - alpha * exact policy gradient,
/// n_steps times. No sampling.
TrainResult run_exact_descent(const TabularMdp& mdp, const TrainConfig& config);

} // namespace genrl
