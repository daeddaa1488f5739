#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "genrl/envs.hpp"
#include "genrl/exact.hpp"
#include "genrl/learner.hpp"
#include "genrl/mdp.hpp"
#include "genrl/occupancy.hpp"
#include "genrl/utility.hpp"

namespace genrl {

inline constexpr const char* kToolVersion = "genrl 0.1.0";

/// Reads a whole file; throws ParseError if unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit content digest, as 16 hex chars.
std::string fnv1a_hex(const std::string& content);

/// Parses JSON; on syntax errors rethrows ParseError with
/// "<name>:<line>:<col>" anchoring.
nlohmann::json parse_json(const std::string& text, const std::string& name);

// --- MDP ---------------------------------------------------------------

/// Structural decode only (field presence, types, shapes). Throws
/// ParseError. Invariants are checked separately by validate().
TabularMdp mdp_from_json(const nlohmann::json& j);
nlohmann::json mdp_to_json(const TabularMdp& mdp);

/// Decode + validate; throws ValidationError carrying every violation.
TabularMdp load_mdp(const std::filesystem::path& path);

// --- Policy ------------------------------------------------------------

PolicyParams policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const PolicyParams& params);
PolicyParams load_policy(const std::filesystem::path& path);

// --- Utility -----------------------------------------------------------

UtilitySpec utility_from_json(const nlohmann::json& j);
nlohmann::json utility_to_json(const UtilitySpec& spec);
UtilitySpec load_utility(const std::filesystem::path& path);

/// Shape/mass checks that need the MDP context (reward and
/// expert_occupancy must be [S,A]; expert mass must be 1/(1-gamma)
/// within 1e-6). Throws ParseError / ValidationError.
void check_utility_against(const UtilitySpec& spec, const TabularMdp& mdp);

// --- Env specs ----------------------------------------------------------

EnvSpec env_spec_from_json(const nlohmann::json& j);
nlohmann::json env_spec_to_json(const EnvSpec& spec);

// --- Train config --------------------------------------------------------

StepSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const StepSchedule& schedule);
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

// --- Outputs --------------------------------------------------------------

nlohmann::json occupancy_to_json(const OccupancyMeasure& mu);
nlohmann::json grad_report_to_json(const GradReport& report);

/// CSV with header step,f_value,l1_occ_err,grad_norm_proxy,policy_entropy.
std::string trace_to_csv(const TrainTrace& trace);

/// CSV row formatting shared by the trace writers: %.12g per value.
std::string format_csv_value(double v);

} // namespace genrl
