#pragma once

#include <Eigen/Dense>
#include <vector>

#include "genrl/mdp.hpp"
#include "genrl/occupancy.hpp"

namespace genrl {

/// Step-size sequence: constant c, or polynomial c/(1+t)^p
/// (Robbins-Monro for p in (0.5, 1]).
struct StepSchedule {
    enum class Kind { kConstant, kPolynomial };
    Kind kind = Kind::kPolynomial;
    double c = 0.5;
    double p = 0.6;

    static StepSchedule constant(double c);
    static StepSchedule polynomial(double c, double p);

    double at(long t) const;
};

/// Current iterate of a stochastic occupancy-marginal estimator.
struct BootstrapState {
    Eigen::VectorXd estimate; // d over states
    long iteration = 0;
    StepSchedule step_schedule;
};

/// Deterministic fixed-point iteration d_{k+1} = q + gamma * K^T d_k,
/// whose unique fixed point is the exact state marginal. Contracts in
/// L1 at rate gamma per step. Returns the iterates d_1..d_n.
std::vector<Eigen::VectorXd> fixed_point_iterate(const TabularMdp& mdp,
                                                 const PolicyParams& params,
                                                 const Eigen::VectorXd& d0, int n_iters);

/// One TD update on a sampled transition: only coordinate s_t moves,
///   d(s_t) += eta_t * (q(s_t) + gamma * d(s_next) - d(s_t)),
/// with eta_t read from the schedule at the current iteration.
BootstrapState td_update(const BootstrapState& state, const TabularMdp& mdp,
                         int s_t, int s_next);

/// Same update with an explicit base term in place of q(s_t); used by the
/// learner's literal Algorithm-1 mode (uniform 1/(S*A) base).
BootstrapState td_update_with_base(const BootstrapState& state, double base,
                                   double gamma, int s_t, int s_next);

/// In-place core shared by both variants and the learner hot loop.
void td_update_in_place(Eigen::VectorXd& d, double eta, double base, double gamma,
                        int s_t, int s_next);

/// Discounted visit-count baseline over full trajectories:
///   mu(s,a) = (1/N) sum_traj sum_t gamma^t 1(s_t=s, a_t=a).
/// Truncation at the trajectory horizon biases the total mass low by a
/// factor of roughly gamma^H; no correction is applied.
OccupancyMeasure count_estimate(const std::vector<Trajectory>& trajectories, double gamma,
                                int n_states, int n_actions);

} // namespace genrl
