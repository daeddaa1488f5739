#include "genrl/utility.hpp"

#include <cmath>

#include "genrl/errors.hpp"

namespace genrl {

UtilitySpec UtilitySpec::linear(Eigen::MatrixXd reward) {
    UtilitySpec spec;
    spec.kind = UtilityKind::kLinear;
    spec.reward = std::move(reward);
    return spec;
}

UtilitySpec UtilitySpec::neg_entropy(double clamp_floor) {
    if (!(clamp_floor > 0.0)) throw std::invalid_argument("clamp_floor must be > 0");
    UtilitySpec spec;
    spec.kind = UtilityKind::kNegEntropy;
    spec.clamp_floor = clamp_floor;
    return spec;
}

UtilitySpec UtilitySpec::apprenticeship(Eigen::MatrixXd expert_occupancy) {
    UtilitySpec spec;
    spec.kind = UtilityKind::kApprenticeshipL2;
    spec.expert_occupancy = std::move(expert_occupancy);
    return spec;
}

double UtilitySpec::value(const OccupancyMeasure& mu) const {
    switch (kind) {
    case UtilityKind::kLinear:
        if (reward.size() == 0) throw MissingField("linear utility requires a reward table");
        return -(mu.state_action.array() * reward.array()).sum();
    case UtilityKind::kNegEntropy: {
        const auto clamped = mu.state_action.array().max(clamp_floor);
        return (clamped * clamped.log()).sum();
    }
    case UtilityKind::kApprenticeshipL2:
        if (expert_occupancy.size() == 0)
            throw MissingField("apprenticeship_l2 utility requires expert_occupancy");
        return (mu.state_action - expert_occupancy).squaredNorm();
    }
    throw std::logic_error("unknown utility kind");
}

Eigen::MatrixXd UtilitySpec::gradient(const OccupancyMeasure& mu) const {
    switch (kind) {
    case UtilityKind::kLinear:
        if (reward.size() == 0) throw MissingField("linear utility requires a reward table");
        return -reward;
    case UtilityKind::kNegEntropy:
        return (mu.state_action.array().max(clamp_floor).log() + 1.0).matrix();
    case UtilityKind::kApprenticeshipL2:
        if (expert_occupancy.size() == 0)
            throw MissingField("apprenticeship_l2 utility requires expert_occupancy");
        return 2.0 * (mu.state_action - expert_occupancy);
    }
    throw std::logic_error("unknown utility kind");
}

std::string utility_kind_name(UtilityKind kind) {
    switch (kind) {
    case UtilityKind::kLinear: return "linear";
    case UtilityKind::kNegEntropy: return "neg_entropy";
    case UtilityKind::kApprenticeshipL2: return "apprenticeship_l2";
    }
    return "unknown";
}

} // namespace genrl
