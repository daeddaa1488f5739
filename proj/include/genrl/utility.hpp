#pragma once

#include <Eigen/Dense>
#include <string>

#include "genrl/occupancy.hpp"

namespace genrl {

enum class UtilityKind {
    kLinear,           // f(mu) = -<mu, R>           (reward maximization)
    kNegEntropy,       // f(mu) = sum mu~ log mu~    (pure exploration)
    kApprenticeshipL2, // f(mu) = ||mu - mu_expert||^2
};

/// A differentiable scalar objective of the occupancy measure together
/// with its gradient, which acts as a policy-dependent reward vector.
/// All objectives are minimized.
struct UtilitySpec {
    UtilityKind kind = UtilityKind::kLinear;
    Eigen::MatrixXd reward;           // [S,A]; required for kLinear
    Eigen::MatrixXd expert_occupancy; // [S,A]; required for kApprenticeshipL2
    double clamp_floor = 1e-12;       // log-domain floor for kNegEntropy

    static UtilitySpec linear(Eigen::MatrixXd reward);
    static UtilitySpec neg_entropy(double clamp_floor = 1e-12);
    static UtilitySpec apprenticeship(Eigen::MatrixXd expert_occupancy);

    /// f(mu). Throws MissingField if the kind's required field is absent.
    double value(const OccupancyMeasure& mu) const;

    /// Gradient df/dmu as an [S,A] table, evaluated entrywise:
    ///   linear            -> -R
    ///   neg_entropy       -> log(max(mu, clamp_floor)) + 1
    ///   apprenticeship_l2 -> 2 (mu - mu_expert)
    Eigen::MatrixXd gradient(const OccupancyMeasure& mu) const;
};

std::string utility_kind_name(UtilityKind kind);

} // namespace genrl
