#include "genrl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "genrl/errors.hpp"

namespace genrl {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

json parse_json(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is a 1-based offset into the text; recover line:col
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + e.what());
    }
}

namespace {

const json& require_field(const json& j, const char* key, const char* context) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string(context) + ": missing field \"" + key + "\"");
    return *it;
}

double number_at(const json& j, const char* key, const char* context) {
    const json& v = require_field(j, key, context);
    if (!v.is_number()) throw ParseError(std::string(context) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

long integer_at(const json& j, const char* key, const char* context) {
    const json& v = require_field(j, key, context);
    if (!v.is_number_integer())
        throw ParseError(std::string(context) + ": \"" + key + "\" must be an integer");
    return v.get<long>();
}

std::vector<double> vector_from_json(const json& j, const char* context) {
    if (!j.is_array()) throw ParseError(std::string(context) + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ParseError(std::string(context) + ": expected numeric entries");
        out.push_back(v.get<double>());
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* context) {
    if (!j.is_array() || j.empty())
        throw ParseError(std::string(context) + ": expected a non-empty nested array");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ParseError(std::string(context) + ": expected nested arrays");
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::vector<double> row =
            vector_from_json(j[r], (std::string(context) + "[" + std::to_string(r) + "]").c_str());
        if (row.size() != cols)
            throw ParseError(std::string(context) + "[" + std::to_string(r) +
                             "]: ragged row (got " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(cols) + ")");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const std::vector<double>& v) {
    return json(v);
}

} // namespace

TabularMdp mdp_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("mdp: expected a JSON object");
    TabularMdp mdp;
    mdp.n_states = static_cast<int>(integer_at(j, "n_states", "mdp"));
    mdp.n_actions = static_cast<int>(integer_at(j, "n_actions", "mdp"));
    mdp.gamma = number_at(j, "gamma", "mdp");
    if (mdp.n_states <= 0 || mdp.n_actions <= 0)
        throw ParseError("mdp: n_states and n_actions must be positive");

    const json& p = require_field(j, "transition", "mdp");
    if (!p.is_array() || p.size() != static_cast<std::size_t>(mdp.n_states))
        throw ParseError("mdp: transition must have n_states outer entries");
    mdp.transition.reserve(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) {
        if (!p[s].is_array() || p[s].size() != static_cast<std::size_t>(mdp.n_actions))
            throw ParseError("mdp: transition[" + std::to_string(s) + "] must have n_actions entries");
        for (int a = 0; a < mdp.n_actions; ++a) {
            const std::string ctx = "mdp: transition[" + std::to_string(s) + "][" + std::to_string(a) + "]";
            const std::vector<double> row = vector_from_json(p[s][a], ctx.c_str());
            if (row.size() != static_cast<std::size_t>(mdp.n_states))
                throw ParseError(ctx + " must have n_states entries");
            mdp.transition.insert(mdp.transition.end(), row.begin(), row.end());
        }
    }

    mdp.initial_dist = vector_from_json(require_field(j, "initial_dist", "mdp"), "mdp: initial_dist");
    if (mdp.initial_dist.size() != static_cast<std::size_t>(mdp.n_states))
        throw ParseError("mdp: initial_dist must have n_states entries");

    if (j.contains("reward") && !j["reward"].is_null()) {
        const Eigen::MatrixXd r = matrix_from_json(j["reward"], "mdp: reward");
        if (r.rows() != mdp.n_states || r.cols() != mdp.n_actions)
            throw ParseError("mdp: reward must be [n_states][n_actions]");
        mdp.reward.resize(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a)
                mdp.reward[static_cast<std::size_t>(s) * mdp.n_actions + a] = r(s, a);
    }
    return mdp;
}

json mdp_to_json(const TabularMdp& mdp) {
    json p = json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        json per_state = json::array();
        for (int a = 0; a < mdp.n_actions; ++a) {
            json row = json::array();
            for (int s2 = 0; s2 < mdp.n_states; ++s2) row.push_back(mdp.p(s, a, s2));
            per_state.push_back(std::move(row));
        }
        p.push_back(std::move(per_state));
    }
    json j{{"n_states", mdp.n_states},
           {"n_actions", mdp.n_actions},
           {"gamma", mdp.gamma},
           {"transition", std::move(p)},
           {"initial_dist", vector_to_json(mdp.initial_dist)}};
    if (mdp.has_reward()) {
        Eigen::MatrixXd r(mdp.n_states, mdp.n_actions);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a) r(s, a) = mdp.r(s, a);
        j["reward"] = matrix_to_json(r);
    }
    return j;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
    const TabularMdp mdp = mdp_from_json(parse_json(read_file(path), path.string()));
    const std::vector<std::string> violations = validate(mdp);
    if (!violations.empty()) {
        std::string msg = path.string() + ": invalid MDP";
        for (const std::string& v : violations) msg += "\n  " + v;
        throw ValidationError(msg);
    }
    return mdp;
}

PolicyParams policy_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("policy: expected a JSON object");
    PolicyParams params{matrix_from_json(require_field(j, "theta", "policy"), "policy: theta")};
    if (!params.theta.allFinite()) throw ParseError("policy: theta entries must be finite");
    return params;
}

json policy_to_json(const PolicyParams& params) {
    return json{{"n_states", params.theta.rows()},
                {"n_actions", params.theta.cols()},
                {"theta", matrix_to_json(params.theta)}};
}

PolicyParams load_policy(const std::filesystem::path& path) {
    return policy_from_json(parse_json(read_file(path), path.string()));
}

UtilitySpec utility_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("utility: expected a JSON object");
    const json& kind = require_field(j, "kind", "utility");
    if (!kind.is_string()) throw ParseError("utility: \"kind\" must be a string");
    const std::string name = kind.get<std::string>();

    UtilitySpec spec;
    if (name == "linear") {
        spec.kind = UtilityKind::kLinear;
        spec.reward = matrix_from_json(require_field(j, "reward", "utility"), "utility: reward");
    } else if (name == "neg_entropy") {
        spec.kind = UtilityKind::kNegEntropy;
    } else if (name == "apprenticeship_l2") {
        spec.kind = UtilityKind::kApprenticeshipL2;
        spec.expert_occupancy = matrix_from_json(
            require_field(j, "expert_occupancy", "utility"), "utility: expert_occupancy");
    } else {
        throw ParseError("utility: unknown kind \"" + name + "\"");
    }
    if (j.contains("clamp_floor")) {
        spec.clamp_floor = j["clamp_floor"].get<double>();
        if (!(spec.clamp_floor > 0.0)) throw ParseError("utility: clamp_floor must be > 0");
    }
    return spec;
}

json utility_to_json(const UtilitySpec& spec) {
    json j{{"kind", utility_kind_name(spec.kind)}};
    switch (spec.kind) {
    case UtilityKind::kLinear: j["reward"] = matrix_to_json(spec.reward); break;
    case UtilityKind::kNegEntropy: j["clamp_floor"] = spec.clamp_floor; break;
    case UtilityKind::kApprenticeshipL2:
        j["expert_occupancy"] = matrix_to_json(spec.expert_occupancy);
        break;
    }
    return j;
}

UtilitySpec load_utility(const std::filesystem::path& path) {
    return utility_from_json(parse_json(read_file(path), path.string()));
}

void check_utility_against(const UtilitySpec& spec, const TabularMdp& mdp) {
    const auto check_shape = [&](const Eigen::MatrixXd& m, const char* what) {
        if (m.rows() != mdp.n_states || m.cols() != mdp.n_actions)
            throw ParseError(std::string("utility: ") + what + " must be [n_states][n_actions] = [" +
                             std::to_string(mdp.n_states) + "][" + std::to_string(mdp.n_actions) + "]");
    };
    if (spec.kind == UtilityKind::kLinear) check_shape(spec.reward, "reward");
    if (spec.kind == UtilityKind::kApprenticeshipL2) {
        check_shape(spec.expert_occupancy, "expert_occupancy");
        const double mass = spec.expert_occupancy.sum();
        const double want = 1.0 / (1.0 - mdp.gamma);
        if (std::abs(mass - want) > 1e-6)
            throw ValidationError("utility: expert_occupancy mass " + std::to_string(mass) +
                                  " differs from 1/(1-gamma) = " + std::to_string(want));
    }
}

EnvSpec env_spec_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("env: expected a JSON object");
    const json& kind = require_field(j, "kind", "env");
    if (!kind.is_string()) throw ParseError("env: \"kind\" must be a string");
    const std::string name = kind.get<std::string>();
    const double gamma = number_at(j, "gamma", "env");
    try {
        if (name == "chain")
            return EnvSpec::chain(static_cast<int>(integer_at(j, "length", "env")), gamma);
        if (name == "gridworld")
            return EnvSpec::gridworld(static_cast<int>(integer_at(j, "width", "env")),
                                      static_cast<int>(integer_at(j, "height", "env")),
                                      j.value("slip_prob", 0.0), gamma);
        if (name == "random_mdp")
            return EnvSpec::random_mdp(static_cast<int>(integer_at(j, "n_states", "env")),
                                       static_cast<int>(integer_at(j, "n_actions", "env")), gamma,
                                       j.value("seed", 0ULL));
    } catch (const InvalidSpec& e) {
        throw ParseError(std::string("env: ") + e.what());
    }
    throw ParseError("env: unknown kind \"" + name + "\"");
}

json env_spec_to_json(const EnvSpec& spec) {
    switch (spec.kind) {
    case EnvSpec::Kind::kChain:
        return json{{"kind", "chain"}, {"length", spec.chain_length}, {"gamma", spec.gamma}};
    case EnvSpec::Kind::kGridworld:
        return json{{"kind", "gridworld"},
                    {"width", spec.grid_width},
                    {"height", spec.grid_height},
                    {"slip_prob", spec.slip_prob},
                    {"gamma", spec.gamma}};
    case EnvSpec::Kind::kRandomMdp:
        return json{{"kind", "random_mdp"},
                    {"n_states", spec.n_states},
                    {"n_actions", spec.n_actions},
                    {"seed", spec.seed},
                    {"gamma", spec.gamma}};
    }
    throw std::logic_error("unknown env kind");
}

StepSchedule schedule_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("schedule: expected a JSON object");
    const std::string kind = require_field(j, "kind", "schedule").get<std::string>();
    const double c = number_at(j, "c", "schedule");
    if (!(c > 0.0)) throw ParseError("schedule: constant c must be > 0");
    if (kind == "constant") return StepSchedule::constant(c);
    if (kind == "polynomial") return StepSchedule::polynomial(c, number_at(j, "p", "schedule"));
    throw ParseError("schedule: unknown kind \"" + kind + "\"");
}

json schedule_to_json(const StepSchedule& schedule) {
    if (schedule.kind == StepSchedule::Kind::kConstant)
        return json{{"kind", "constant"}, {"c", schedule.c}};
    return json{{"kind", "polynomial"}, {"c", schedule.c}, {"p", schedule.p}};
}

TrainConfig train_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    TrainConfig config;
    config.epsilon_schedule = schedule_from_json(require_field(j, "epsilon", "config"));
    config.eta_schedule = schedule_from_json(require_field(j, "eta", "config"));
    if (j.contains("occupancy_eta"))
        config.occupancy_schedule = schedule_from_json(j["occupancy_eta"]);
    config.alpha = j.value("alpha", 0.01);
    config.horizon = static_cast<int>(integer_at(j, "horizon", "config"));
    config.n_steps = integer_at(j, "n_steps", "config");
    config.seed = j.value("seed", 0ULL);
    config.eval_every = j.value("eval_every", 1000L);
    config.utility = utility_from_json(require_field(j, "utility", "config"));
    config.uniform_td_base = j.value("uniform_td_base", false);
    const std::string rule = j.value("q_update", std::string("on_policy_expected"));
    if (rule == "paper_min") {
        config.q_update = QUpdateRule::kPaperMin;
    } else if (rule == "on_policy_expected") {
        config.q_update = QUpdateRule::kOnPolicyExpected;
    } else {
        throw ParseError("config: unknown q_update \"" + rule + "\"");
    }
    const std::string estimator =
        j.value("occupancy_estimator", std::string("episodic_count"));
    if (estimator == "episodic_count") {
        config.occupancy_estimator = OccupancyEstimator::kEpisodicCount;
    } else if (estimator == "td") {
        config.occupancy_estimator = OccupancyEstimator::kTdUpdate;
    } else {
        throw ParseError("config: unknown occupancy_estimator \"" + estimator + "\"");
    }
    if (j.contains("theta_init"))
        config.theta_init = matrix_from_json(j["theta_init"], "config: theta_init");
    if (config.horizon < 1) throw ParseError("config: horizon must be >= 1");
    if (config.n_steps < 0) throw ParseError("config: n_steps must be >= 0");
    if (config.eval_every < 1) throw ParseError("config: eval_every must be >= 1");
    return config;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
    return train_config_from_json(parse_json(read_file(path), path.string()));
}

json occupancy_to_json(const OccupancyMeasure& mu) {
    json marginal = json::array();
    for (Eigen::Index s = 0; s < mu.state_marginal.size(); ++s)
        marginal.push_back(mu.state_marginal(s));
    return json{{"state_action", matrix_to_json(mu.state_action)},
                {"state_marginal", std::move(marginal)},
                {"gamma", mu.gamma},
                {"total_mass", mu.total_mass()}};
}

json grad_report_to_json(const GradReport& report) {
    const auto flat = [](const Eigen::MatrixXd& m) {
        json arr = json::array();
        for (Eigen::Index s = 0; s < m.rows(); ++s)
            for (Eigen::Index a = 0; a < m.cols(); ++a) arr.push_back(m(s, a));
        return arr;
    };
    return json{{"max_abs_err", report.max_abs_err},
                {"max_rel_err", report.max_rel_err},
                {"fd_step", report.fd_step},
                {"n_states", report.analytic.rows()},
                {"n_actions", report.analytic.cols()},
                {"analytic", flat(report.analytic)},
                {"numeric", flat(report.numeric)}};
}

std::string format_csv_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trace_to_csv(const TrainTrace& trace) {
    std::string out = "step,f_value,l1_occ_err,grad_norm_proxy,policy_entropy\n";
    for (const TraceRow& row : trace.rows) {
        out += std::to_string(row.step);
        out += ',';
        out += format_csv_value(row.f_value);
        out += ',';
        out += format_csv_value(row.l1_occ_err);
        out += ',';
        out += format_csv_value(row.grad_norm_proxy);
        out += ',';
        out += format_csv_value(row.policy_entropy);
        out += '\n';
    }
    return out;
}

} // namespace genrl
