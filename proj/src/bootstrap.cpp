#include "genrl/bootstrap.hpp"

#include <cmath>
#include <stdexcept>

namespace genrl {

StepSchedule StepSchedule::constant(double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("schedule constant must be >= 0");
    return StepSchedule{Kind::kConstant, c, 0.0};
}

StepSchedule StepSchedule::polynomial(double c, double p) {
    if (!(c >= 0.0)) throw std::invalid_argument("schedule constant must be >= 0");
    if (!(p >= 0.0)) throw std::invalid_argument("schedule exponent must be >= 0");
    return StepSchedule{Kind::kPolynomial, c, p};
}

double StepSchedule::at(long t) const {
    if (kind == Kind::kConstant) return c;
    return c / std::pow(1.0 + static_cast<double>(t), p);
}

std::vector<Eigen::VectorXd> fixed_point_iterate(const TabularMdp& mdp,
                                                 const PolicyParams& params,
                                                 const Eigen::VectorXd& d0, int n_iters) {
    if (n_iters < 1) throw std::invalid_argument("n_iters must be >= 1");
    if (!d0.allFinite()) throw std::invalid_argument("d0 must be finite");

    const Eigen::MatrixXd kernel_t = policy_kernel(mdp, params).transpose();
    Eigen::VectorXd q(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) q(s) = mdp.q(s);

    std::vector<Eigen::VectorXd> iterates;
    iterates.reserve(n_iters);
    Eigen::VectorXd d = d0;
    for (int k = 0; k < n_iters; ++k) {
        d = q + mdp.gamma * (kernel_t * d);
        iterates.push_back(d);
    }
    return iterates;
}

void td_update_in_place(Eigen::VectorXd& d, double eta, double base, double gamma,
                        int s_t, int s_next) {
    d(s_t) += eta * (base + gamma * d(s_next) - d(s_t));
}

BootstrapState td_update(const BootstrapState& state, const TabularMdp& mdp,
                         int s_t, int s_next) {
    return td_update_with_base(state, mdp.q(s_t), mdp.gamma, s_t, s_next);
}

BootstrapState td_update_with_base(const BootstrapState& state, double base,
                                   double gamma, int s_t, int s_next) {
    if (s_t < 0 || s_t >= state.estimate.size() || s_next < 0 ||
        s_next >= state.estimate.size())
        throw std::out_of_range("td_update state index out of bounds");
    BootstrapState next = state;
    const double eta = state.step_schedule.at(state.iteration);
    td_update_in_place(next.estimate, eta, base, gamma, s_t, s_next);
    next.iteration = state.iteration + 1;
    return next;
}

OccupancyMeasure count_estimate(const std::vector<Trajectory>& trajectories, double gamma,
                                int n_states, int n_actions) {
    if (trajectories.empty()) throw std::invalid_argument("count_estimate needs trajectories");

    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_states, n_actions);
    for (const Trajectory& traj : trajectories) {
        double discount = 1.0;
        for (const TrajectoryStep& step : traj.steps) {
            counts(step.state, step.action) += discount;
            discount *= gamma;
        }
    }
    counts /= static_cast<double>(trajectories.size());

    OccupancyMeasure mu;
    mu.gamma = gamma;
    mu.state_action = counts;
    mu.state_marginal = counts.rowwise().sum();
    return mu;
}

} // namespace genrl
