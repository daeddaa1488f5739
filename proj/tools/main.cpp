// genrl command-line tool: validate MDPs, solve occupancies, check
// gradients, run occupancy bootstraps and training, all reproducibly.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "genrl/bootstrap.hpp"
#include "genrl/compatible.hpp"
#include "genrl/envs.hpp"
#include "genrl/errors.hpp"
#include "genrl/exact.hpp"
#include "genrl/io.hpp"
#include "genrl/learner.hpp"
#include "genrl/mdp.hpp"
#include "genrl/rng.hpp"
#include "genrl/utility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalAbort = 3;

std::string iso_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

genrl::PolicyParams policy_for(const genrl::TabularMdp& mdp, const std::string& policy_file) {
    if (policy_file.empty()) return genrl::uniform_params(mdp.n_states, mdp.n_actions);
    genrl::PolicyParams params = genrl::load_policy(policy_file);
    if (params.theta.rows() != mdp.n_states || params.theta.cols() != mdp.n_actions)
        throw genrl::ParseError("policy theta shape does not match the MDP");
    return params;
}

int cmd_validate(const std::string& mdp_file) {
    const genrl::TabularMdp mdp =
        genrl::mdp_from_json(genrl::parse_json(genrl::read_file(mdp_file), mdp_file));
    const std::vector<std::string> violations = genrl::validate(mdp);
    for (const std::string& v : violations) std::cout << mdp_file << ": " << v << "\n";
    if (violations.empty()) {
        std::cout << "OK: " << mdp_file << " is a valid MDP\n";
        return kExitOk;
    }
    return kExitCheckFailed;
}

int cmd_solve(const std::string& mdp_file, const std::string& policy_file,
              const std::string& out_file, const std::string& format) {
    genrl::TabularMdp mdp;
    try {
        mdp = genrl::load_mdp(mdp_file);
    } catch (const genrl::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitCheckFailed;
    }
    const genrl::PolicyParams params = policy_for(mdp, policy_file);
    const genrl::OccupancyMeasure mu = genrl::occupancy_exact(mdp, params);

    std::string payload;
    if (format == "csv") {
        payload = "state,action,mu\n";
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a)
                payload += std::to_string(s) + "," + std::to_string(a) + "," +
                           genrl::format_csv_value(mu.state_action(s, a)) + "\n";
    } else {
        payload = genrl::occupancy_to_json(mu).dump(2) + "\n";
    }
    if (!out_file.empty()) genrl::write_file_atomic(out_file, payload);
    else std::cout << payload;
    std::printf("total_mass=%.10g expected=%.10g states=%d actions=%d\n", mu.total_mass(),
                1.0 / (1.0 - mdp.gamma), mdp.n_states, mdp.n_actions);
    return kExitOk;
}

int cmd_gradcheck(const std::string& mdp_file, const std::string& utility_file,
                  const std::string& policy_file, const std::string& method, double fd_step,
                  double tol, const std::string& out_file) {
    const genrl::TabularMdp mdp = genrl::load_mdp(mdp_file);
    const genrl::UtilitySpec utility = genrl::load_utility(utility_file);
    genrl::check_utility_against(utility, mdp);
    const genrl::PolicyParams params = policy_for(mdp, policy_file);

    genrl::GradReport report;
    if (method == "compatible") {
        const genrl::OccupancyMeasure mu = genrl::occupancy_exact(mdp, params);
        const genrl::DiscountedOperator op = genrl::discounted_operator(mdp, params);
        Eigen::VectorXd reward(mdp.n_pairs());
        const Eigen::MatrixXd r_pi = utility.gradient(mu);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a)
                reward(mdp.pair_index(s, a)) = r_pi(s, a);
        const genrl::CompatibleApprox approx =
            genrl::fit_compatible(mdp, params, genrl::q_value(op, reward));
        report.analytic = genrl::fa_policy_gradient(mdp, params, approx);
        report.numeric = genrl::finite_diff_gradient(mdp, params, utility, fd_step);
        report.fd_step = fd_step;
        report.max_abs_err = (report.analytic - report.numeric).cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < report.analytic.size(); ++i) {
            const double abs_err = std::abs(report.analytic(i) - report.numeric(i));
            report.max_rel_err = std::max(
                report.max_rel_err, abs_err / std::max(1.0, std::abs(report.numeric(i))));
        }
    } else {
        report = genrl::grad_check(mdp, params, utility, fd_step);
    }

    if (!out_file.empty())
        genrl::write_file_atomic(out_file, genrl::grad_report_to_json(report).dump(2) + "\n");
    const bool pass = report.max_abs_err <= tol;
    std::printf("%s method=%s max_abs_err=%.6g max_rel_err=%.6g fd_step=%.3g tol=%.3g\n",
                pass ? "PASS" : "FAIL", method.c_str(), report.max_abs_err, report.max_rel_err,
                report.fd_step, tol);
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_bootstrap(const std::string& mdp_file, const std::string& policy_file,
                  const std::string& mode, long iters, std::uint64_t seed, double schedule_c,
                  double schedule_p, long trace_every, const std::string& out_file) {
    const genrl::TabularMdp mdp = genrl::load_mdp(mdp_file);
    const genrl::PolicyParams params = policy_for(mdp, policy_file);
    const Eigen::VectorXd d_exact = genrl::occupancy_exact(mdp, params).state_marginal;

    std::string csv = "iter,l1_error,linf_error,eta\n";
    bool bound_ok = true;
    double worst_excess = 0.0;

    if (mode == "deterministic") {
        const Eigen::VectorXd d0 = Eigen::VectorXd::Zero(mdp.n_states);
        const double err0 = (d_exact - d0).lpNorm<1>();
        if (iters > 0) {
            const std::vector<Eigen::VectorXd> iterates =
                genrl::fixed_point_iterate(mdp, params, d0, static_cast<int>(iters));
            for (std::size_t k = 0; k < iterates.size(); ++k) {
                const Eigen::VectorXd gap = d_exact - iterates[k];
                const double l1 = gap.lpNorm<1>();
                const long n = static_cast<long>(k) + 1;
                if ((n % trace_every) == 0 || n == iters)
                    csv += std::to_string(n) + "," + genrl::format_csv_value(l1) + "," +
                           genrl::format_csv_value(gap.lpNorm<Eigen::Infinity>()) + ",1\n";
                const double bound = std::pow(mdp.gamma, static_cast<double>(n)) * err0;
                if (l1 > bound * (1.0 + 1e-9) + 1e-12) {
                    bound_ok = false;
                    worst_excess = std::max(worst_excess, l1 - bound);
                }
            }
        }
    } else if (mode == "td") {
        genrl::BootstrapState state;
        state.estimate = Eigen::VectorXd::Zero(mdp.n_states);
        state.step_schedule = genrl::StepSchedule::polynomial(schedule_c, schedule_p);
        const Eigen::MatrixXd pi = genrl::policy_probs(params);
        genrl::Rng rng = genrl::Rng::child(seed, 0);
        std::vector<double> pi_row(mdp.n_actions);
        int s = rng.categorical({mdp.initial_dist.data(), mdp.initial_dist.size()});
        for (long t = 0; t < iters; ++t) {
            for (int a = 0; a < mdp.n_actions; ++a) pi_row[a] = pi(s, a);
            const int action = rng.categorical(pi_row);
            const double* p_row =
                &mdp.transition[(static_cast<std::size_t>(s) * mdp.n_actions + action) *
                                mdp.n_states];
            const int s_next = rng.categorical({p_row, static_cast<std::size_t>(mdp.n_states)});
            const double eta = state.step_schedule.at(state.iteration);
            state = genrl::td_update(state, mdp, s, s_next);
            if (((t + 1) % trace_every) == 0 || t + 1 == iters) {
                const Eigen::VectorXd gap = d_exact - state.estimate;
                csv += std::to_string(t + 1) + "," + genrl::format_csv_value(gap.lpNorm<1>()) +
                       "," + genrl::format_csv_value(gap.lpNorm<Eigen::Infinity>()) + "," +
                       genrl::format_csv_value(eta) + "\n";
            }
            s = s_next;
        }
    } else {
        throw genrl::ParseError("unknown bootstrap mode \"" + mode + "\"");
    }

    if (!out_file.empty()) genrl::write_file_atomic(out_file, csv);
    else std::cout << csv;
    if (!bound_ok) {
        std::printf("FAIL contraction bound violated (worst excess %.3g)\n", worst_excess);
        return kExitCheckFailed;
    }
    if (mode == "deterministic") std::printf("PASS contraction bound holds for %ld iterations\n", iters);
    return kExitOk;
}

struct SeedRunOutcome {
    std::uint64_t seed = 0;
    fs::path dir;
    double final_f = 0.0;
    std::optional<std::string> error;
    bool non_finite = false;
    long non_finite_step = 0;
};

json meta_json(const genrl::TrainConfig& config, const std::string& method) {
    json schedules{{"epsilon", genrl::schedule_to_json(config.epsilon_schedule)},
                   {"eta", genrl::schedule_to_json(config.eta_schedule)}};
    if (config.occupancy_schedule)
        schedules["occupancy_eta"] = genrl::schedule_to_json(*config.occupancy_schedule);
    return json{{"seed", config.seed},
                {"rng", genrl::kRngName},
                {"rng_stream_rule", "child k of seed s = splitmix64(s ^ (0x9E3779B97F4A7C15*(k+1)))"},
                {"version", genrl::kToolVersion},
                {"method", method},
                {"schedules", schedules},
                {"alpha", config.alpha},
                {"horizon", config.horizon},
                {"n_steps", config.n_steps},
                {"eval_every", config.eval_every},
                {"q_update", config.q_update == genrl::QUpdateRule::kPaperMin
                                 ? "paper_min"
                                 : "on_policy_expected"},
                {"occupancy_estimator",
                 config.occupancy_estimator == genrl::OccupancyEstimator::kEpisodicCount
                     ? "episodic_count"
                     : "td"},
                {"uniform_td_base", config.uniform_td_base},
                {"utility", genrl::utility_to_json(config.utility)}};
}

void run_one_seed(const genrl::TabularMdp& mdp, genrl::TrainConfig config,
                  const std::string& method, SeedRunOutcome& outcome) {
    try {
        config.seed = outcome.seed;
        const genrl::TrainResult result = method == "exact"
                                              ? genrl::run_exact_descent(mdp, config)
                                              : genrl::run_algorithm1(mdp, config);
        fs::create_directories(outcome.dir);
        genrl::write_file_atomic(outcome.dir / "trace.csv", genrl::trace_to_csv(result.trace));
        genrl::write_file_atomic(outcome.dir / "policy.json",
                                 genrl::policy_to_json(result.params).dump(2) + "\n");
        genrl::write_file_atomic(outcome.dir / "meta.json", meta_json(config, method).dump(2) + "\n");
        outcome.final_f = result.trace.rows.back().f_value;
    } catch (const genrl::NonFiniteUpdate& e) {
        outcome.non_finite = true;
        outcome.non_finite_step = e.step;
        outcome.error = e.what();
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
}

int cmd_train(const std::string& mdp_file, const std::string& env_file,
              const std::string& config_file, const std::string& out_dir,
              const std::string& method, const std::string& seeds_range,
              std::int64_t seed_override, bool alg1_literal,
              const std::vector<std::string>& raw_args) {
    const std::string started_at = iso_utc_now();

    genrl::TabularMdp mdp;
    json inputs_digest = json::object();
    bool export_built_mdp = false;
    if (!env_file.empty()) {
        const std::string text = genrl::read_file(env_file);
        mdp = genrl::build(genrl::env_spec_from_json(genrl::parse_json(text, env_file)));
        inputs_digest[env_file] = genrl::fnv1a_hex(text);
        export_built_mdp = true;
    } else {
        mdp = genrl::load_mdp(mdp_file);
        inputs_digest[mdp_file] = genrl::fnv1a_hex(genrl::read_file(mdp_file));
    }
    const std::string config_text = genrl::read_file(config_file);
    genrl::TrainConfig config =
        genrl::train_config_from_json(genrl::parse_json(config_text, config_file));
    inputs_digest[config_file] = genrl::fnv1a_hex(config_text);
    genrl::check_utility_against(config.utility, mdp);
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
    if (alg1_literal) {
        config.occupancy_estimator = genrl::OccupancyEstimator::kTdUpdate;
        config.uniform_td_base = true;
    }

    std::vector<std::uint64_t> seeds;
    if (!seeds_range.empty()) {
        const auto colon = seeds_range.find(':');
        if (colon == std::string::npos)
            throw genrl::ParseError("--seeds expects a range like 0:9");
        const long lo = std::stol(seeds_range.substr(0, colon));
        const long hi = std::stol(seeds_range.substr(colon + 1));
        if (lo > hi) throw genrl::ParseError("--seeds range is empty");
        for (long k = lo; k <= hi; ++k) seeds.push_back(static_cast<std::uint64_t>(k));
    } else {
        seeds.push_back(config.seed);
    }

    const fs::path out(out_dir);
    fs::create_directories(out);
    if (export_built_mdp)
        genrl::write_file_atomic(out / "mdp.json", genrl::mdp_to_json(mdp).dump(2) + "\n");
    std::vector<SeedRunOutcome> outcomes(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        outcomes[i].seed = seeds[i];
        outcomes[i].dir = seeds.size() == 1 ? out : out / ("seed_" + std::to_string(seeds[i]));
    }

    // independent instances; fan out across hardware threads
    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_workers; ++w) {
        workers.emplace_back([&, w]() {
            for (std::size_t i = w; i < outcomes.size(); i += n_workers)
                run_one_seed(mdp, config, method, outcomes[i]);
        });
    }
    for (std::thread& worker : workers) worker.join();

    bool any_non_finite = false;
    for (const SeedRunOutcome& outcome : outcomes) {
        if (outcome.error) {
            std::cerr << "seed " << outcome.seed << ": " << *outcome.error << "\n";
            if (outcome.non_finite) any_non_finite = true;
        } else {
            std::printf("seed %llu: final_f=%.10g -> %s\n",
                        static_cast<unsigned long long>(outcome.seed), outcome.final_f,
                        outcome.dir.string().c_str());
        }
    }
    if (any_non_finite) return kExitNumericalAbort;
    for (const SeedRunOutcome& outcome : outcomes)
        if (outcome.error) return kExitInputError;

    std::string command_line;
    for (const std::string& arg : raw_args) {
        if (!command_line.empty()) command_line += ' ';
        command_line += arg;
    }
    json output_files = json::array();
    if (export_built_mdp) output_files.push_back((out / "mdp.json").string());
    for (const SeedRunOutcome& outcome : outcomes) {
        output_files.push_back((outcome.dir / "trace.csv").string());
        output_files.push_back((outcome.dir / "policy.json").string());
        output_files.push_back((outcome.dir / "meta.json").string());
    }
    json seeds_json = json::array();
    for (const std::uint64_t s : seeds) seeds_json.push_back(s);
    const json manifest{{"command_line", command_line},
                        {"inputs", inputs_digest},
                        {"seeds", seeds_json},
                        {"tool_version", genrl::kToolVersion},
                        {"started_at", started_at},
                        {"finished_at", iso_utc_now()},
                        {"outputs", output_files}};
    genrl::write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tabular MDP toolkit: occupancy measures, policy gradients for general "
                 "utilities, and sample-based training"};
    app.set_version_flag("--version", std::string(genrl::kToolVersion));
    app.require_subcommand(1);

    std::vector<std::string> raw_args(argv, argv + argc);

    // validate
    auto* validate = app.add_subcommand("validate", "Check an MDP file against all invariants");
    std::string v_mdp;
    validate->add_option("mdp", v_mdp, "MDP JSON file")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "Exact occupancy measure of a policy");
    std::string s_mdp, s_policy, s_out, s_format = "json";
    bool s_uniform = false;
    solve->add_option("mdp", s_mdp, "MDP JSON file")->required();
    solve->add_option("--policy", s_policy, "policy JSON file (theta table)");
    solve->add_flag("--uniform", s_uniform, "use the uniform policy (default when no --policy)");
    solve->add_option("--out", s_out, "write occupancy here instead of stdout");
    solve->add_option("--format", s_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck",
                                         "Analytic policy gradient vs finite differences");
    std::string g_mdp, g_utility, g_policy, g_out, g_method = "exact";
    double g_fd_step = 1e-5, g_tol = 1e-6;
    gradcheck->add_option("mdp", g_mdp, "MDP JSON file")->required();
    gradcheck->add_option("--utility", g_utility, "utility JSON file")->required();
    gradcheck->add_option("--policy", g_policy, "policy JSON file (default uniform)");
    gradcheck->add_option("--method", g_method, "exact or compatible")
        ->check(CLI::IsMember({"exact", "compatible"}));
    gradcheck->add_option("--fd-step", g_fd_step, "central-difference step");
    gradcheck->add_option("--tol", g_tol, "max-abs-error tolerance");
    gradcheck->add_option("--out", g_out, "write the gradient report JSON here");

    // bootstrap
    auto* bootstrap = app.add_subcommand("bootstrap", "Occupancy-marginal estimation trace");
    std::string b_mdp, b_policy, b_mode = "deterministic", b_out;
    long b_iters = 100, b_trace_every = 1;
    std::uint64_t b_seed = 0;
    double b_schedule_c = 0.5, b_schedule_p = 0.6;
    bootstrap->add_option("mdp", b_mdp, "MDP JSON file")->required();
    bootstrap->add_option("--policy", b_policy, "policy JSON file (default uniform)");
    bootstrap->add_option("--mode", b_mode, "deterministic or td")
        ->check(CLI::IsMember({"deterministic", "td"}));
    bootstrap->add_option("--iters", b_iters, "iterations / sampled updates");
    bootstrap->add_option("--seed", b_seed, "sampling seed (td mode)");
    bootstrap->add_option("--schedule-c", b_schedule_c, "step-size constant (td mode)");
    bootstrap->add_option("--schedule-p", b_schedule_p, "step-size exponent (td mode)");
    bootstrap->add_option("--trace-every", b_trace_every, "emit every k-th row");
    bootstrap->add_option("--out", b_out, "write the CSV trace here");

    // train
    auto* train = app.add_subcommand("train", "Run the sample-based learner or exact descent");
    std::string t_mdp, t_env, t_config, t_out, t_method = "alg1", t_seeds;
    bool t_literal = false;
    std::int64_t t_seed = -1;
    train->add_option("mdp", t_mdp, "MDP JSON file");
    train->add_option("--env", t_env, "environment spec JSON (alternative to an MDP file)");
    train->add_option("--config", t_config, "train config JSON")->required();
    train->add_option("--out", t_out, "output directory")->required();
    train->add_option("--method", t_method, "alg1 or exact")
        ->check(CLI::IsMember({"alg1", "exact"}));
    train->add_option("--seeds", t_seeds, "inclusive seed range a:b, one run per seed");
    train->add_option("--seed", t_seed, "override the config seed");
    train->add_flag("--alg1-literal", t_literal,
                    "literal occupancy update: per-transition TD rule with uniform 1/(S*A) base");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(v_mdp);
        if (*solve) return cmd_solve(s_mdp, s_policy, s_out, s_format);
        if (*gradcheck)
            return cmd_gradcheck(g_mdp, g_utility, g_policy, g_method, g_fd_step, g_tol, g_out);
        if (*bootstrap)
            return cmd_bootstrap(b_mdp, b_policy, b_mode, b_iters, b_seed, b_schedule_c,
                                 b_schedule_p, b_trace_every, b_out);
        if (*train) {
            if (t_mdp.empty() == t_env.empty())
                throw genrl::ParseError("train needs exactly one of an MDP file or --env");
            return cmd_train(t_mdp, t_env, t_config, t_out, t_method, t_seeds, t_seed, t_literal,
                             raw_args);
        }
    } catch (const genrl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const genrl::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const genrl::NonFiniteUpdate& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kExitNumericalAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
