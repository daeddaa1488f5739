#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "genrl/envs.hpp"
#include "genrl/io.hpp"
#include "genrl/mdp.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using namespace genrl;

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "genrl_cli_tests";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const std::string cmd =
        std::string(GENRL_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WEXITSTATUS(raw);
    result.stdout_text = read_file(out);
    return result;
}

fs::path write_fixture(const std::string& name, const std::string& content) {
    const fs::path path = work_dir() / name;
    write_file_atomic(path, content);
    return path;
}

fs::path valid_mdp_file() {
    static const fs::path path = [] {
        const TabularMdp mdp = testutil::suite_mdp(1);
        return write_fixture("suite.json", mdp_to_json(mdp).dump(2));
    }();
    return path;
}

} // namespace

TEST_CASE("validate: exit 0 on a valid file, 1 on violations, 2 on garbage") {
    CHECK(run_cli("validate " + valid_mdp_file().string()).exit_code == 0);

    const fs::path bad = write_fixture("bad_rows.json", R"({
        "n_states": 2, "n_actions": 1, "gamma": 0.9,
        "transition": [[[0.5, 0.6]], [[0.0, 1.0]]],
        "initial_dist": [1.0, 0.0]
    })");
    const CliResult violated = run_cli("validate " + bad.string());
    CHECK(violated.exit_code == 1);
    CHECK(violated.stdout_text.find("row sum") != std::string::npos);

    CHECK(run_cli("validate /nonexistent/place.json").exit_code == 2);
    const fs::path garbage = write_fixture("garbage.json", "{not json");
    CHECK(run_cli("validate " + garbage.string()).exit_code == 2);
}

TEST_CASE("solve: writes the occupancy with the expected mass") {
    const fs::path loop = write_fixture("loop.json", R"({
        "n_states": 1, "n_actions": 1, "gamma": 0.9,
        "transition": [[[1.0]]], "initial_dist": [1.0]
    })");
    const fs::path out = work_dir() / "occupancy.json";
    const CliResult result = run_cli("solve " + loop.string() + " --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("total_mass=10") != std::string::npos);
    const auto j = nlohmann::json::parse(read_file(out));
    CHECK(j["total_mass"].get<double>() == doctest::Approx(10.0).epsilon(1e-10));

    const CliResult csv = run_cli("solve " + loop.string() + " --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.stdout_text.find("state,action,mu") != std::string::npos);
}

TEST_CASE("solve: chain occupancy matches the in-process solution") {
    const TabularMdp chain = genrl::build(EnvSpec::chain(2, 0.9));
    const fs::path mdp_file = write_fixture("chain2.json", mdp_to_json(chain).dump(2));
    const fs::path out = work_dir() / "chain_occ.json";
    REQUIRE(run_cli("solve " + mdp_file.string() + " --out " + out.string()).exit_code == 0);
    const auto j = nlohmann::json::parse(read_file(out));
    const OccupancyMeasure mu = occupancy_exact(chain, uniform_params(2, 2));
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a)
            CHECK(j["state_action"][s][a].get<double>() ==
                  doctest::Approx(mu.state_action(s, a)).epsilon(1e-12));
}

TEST_CASE("gradcheck: passes at sane tolerances and fails at zero") {
    const fs::path utility = write_fixture("entropy.json", R"({"kind": "neg_entropy"})");
    const std::string base =
        "gradcheck " + valid_mdp_file().string() + " --utility " + utility.string();

    const CliResult pass = run_cli(base + " --tol 1e-6");
    CHECK(pass.exit_code == 0);
    CHECK(pass.stdout_text.find("PASS") != std::string::npos);

    const CliResult compat = run_cli(base + " --method compatible --tol 1e-6");
    CHECK(compat.exit_code == 0);

    const CliResult fail = run_cli(base + " --tol 0");
    CHECK(fail.exit_code == 1);
    CHECK(fail.stdout_text.find("FAIL") != std::string::npos);

    CHECK(run_cli("gradcheck " + valid_mdp_file().string() + " --utility /nope.json").exit_code ==
          2);

    // constant utility: both gradients are numerically zero
    const fs::path constant = write_fixture(
        "constant.json",
        R"({"kind": "linear", "reward": [[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0]]})");
    CHECK(run_cli("gradcheck " + valid_mdp_file().string() + " --utility " + constant.string() +
                  " --tol 1e-9")
              .exit_code == 0);
}

TEST_CASE("bootstrap: deterministic mode checks the contraction bound") {
    const CliResult result =
        run_cli("bootstrap " + valid_mdp_file().string() + " --mode deterministic --iters 50");
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("PASS contraction bound") != std::string::npos);

    const CliResult empty =
        run_cli("bootstrap " + valid_mdp_file().string() + " --mode deterministic --iters 0");
    CHECK(empty.exit_code == 0);
    CHECK(empty.stdout_text.find("iter,l1_error,linf_error,eta\n") != std::string::npos);

    const CliResult td = run_cli("bootstrap " + valid_mdp_file().string() +
                                 " --mode td --iters 1000 --seed 3 --trace-every 100");
    CHECK(td.exit_code == 0);
}

TEST_CASE("train: writes traces, policies, meta and a manifest") {
    const fs::path env = write_fixture("env.json",
                                       R"({"kind": "chain", "length": 3, "gamma": 0.9})");
    const fs::path config = write_fixture("train.json", R"({
        "epsilon": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "eta": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "horizon": 50,
        "n_steps": 2000,
        "seed": 4,
        "eval_every": 500,
        "utility": {"kind": "neg_entropy"}
    })");
    const fs::path out = work_dir() / "train_out";
    fs::remove_all(out);
    const CliResult result = run_cli("train --env " + env.string() + " --config " +
                                     config.string() + " --out " + out.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "policy.json"));
    CHECK(fs::exists(out / "meta.json"));
    CHECK(fs::exists(out / "manifest.json"));

    const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
    for (const auto& path : manifest["outputs"]) CHECK(fs::exists(path.get<std::string>()));
    const auto meta = nlohmann::json::parse(read_file(out / "meta.json"));
    CHECK(meta["rng"].get<std::string>() == "mt19937_64");

    // the env-built MDP is exported in the standard format and validates
    const TabularMdp exported = mdp_from_json(nlohmann::json::parse(read_file(out / "mdp.json")));
    CHECK(validate(exported).empty());
    CHECK(exported.n_states == 3);

    const std::string trace = read_file(out / "trace.csv");
    CHECK(trace.rfind("step,f_value,l1_occ_err,grad_norm_proxy,policy_entropy\n", 0) == 0);

    // constant utility: the final policy equals the initial one
    const fs::path const_config = write_fixture("train_const.json", R"({
        "epsilon": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "eta": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "horizon": 50,
        "n_steps": 500,
        "seed": 4,
        "eval_every": 500,
        "utility": {"kind": "linear", "reward": [[0,0],[0,0],[0,0]]}
    })");
    const fs::path out2 = work_dir() / "train_const_out";
    fs::remove_all(out2);
    CHECK(run_cli("train --env " + env.string() + " --config " + const_config.string() +
                  " --out " + out2.string())
              .exit_code == 0);
    const auto policy = nlohmann::json::parse(read_file(out2 / "policy.json"));
    for (const auto& row : policy["theta"])
        for (const auto& v : row) CHECK(v.get<double>() == 0.0);
}

TEST_CASE("train: literal mode is recorded and runaway steps exit 3") {
    const fs::path env = write_fixture("env3.json",
                                       R"({"kind": "chain", "length": 3, "gamma": 0.9})");
    const fs::path config = write_fixture("train_lit.json", R"({
        "epsilon": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "eta": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "horizon": 50,
        "n_steps": 500,
        "seed": 1,
        "eval_every": 500,
        "utility": {"kind": "neg_entropy"}
    })");
    const fs::path out = work_dir() / "literal_out";
    fs::remove_all(out);
    CHECK(run_cli("train --env " + env.string() + " --config " + config.string() + " --out " +
                  out.string() + " --alg1-literal")
              .exit_code == 0);
    const auto meta = nlohmann::json::parse(read_file(out / "meta.json"));
    CHECK(meta["occupancy_estimator"].get<std::string>() == "td");
    CHECK(meta["uniform_td_base"].get<bool>());

    const fs::path blowup = write_fixture("train_blowup.json", R"({
        "epsilon": {"kind": "constant", "c": 1e308},
        "eta": {"kind": "constant", "c": 1e308},
        "horizon": 50,
        "n_steps": 500,
        "seed": 1,
        "eval_every": 500,
        "utility": {"kind": "linear", "reward": [[1,1],[1,1],[1,1]]}
    })");
    const fs::path out2 = work_dir() / "blowup_out";
    fs::remove_all(out2);
    const CliResult aborted = run_cli("train --env " + env.string() + " --config " +
                                      blowup.string() + " --out " + out2.string());
    CHECK(aborted.exit_code == 3);
}

TEST_CASE("train: seed fan-out writes one directory per seed") {
    const fs::path env = write_fixture("env2.json",
                                       R"({"kind": "chain", "length": 2, "gamma": 0.9})");
    const fs::path config = write_fixture("train_fan.json", R"({
        "epsilon": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "eta": {"kind": "polynomial", "c": 0.5, "p": 0.6},
        "horizon": 50,
        "n_steps": 300,
        "seed": 0,
        "eval_every": 300,
        "utility": {"kind": "neg_entropy"}
    })");
    const fs::path out = work_dir() / "fan_out";
    fs::remove_all(out);
    const CliResult result = run_cli("train --env " + env.string() + " --config " +
                                     config.string() + " --out " + out.string() + " --seeds 0:3");
    CHECK(result.exit_code == 0);
    for (int k = 0; k <= 3; ++k) {
        CHECK(fs::exists(out / ("seed_" + std::to_string(k)) / "trace.csv"));
        CHECK(fs::exists(out / ("seed_" + std::to_string(k)) / "policy.json"));
    }
}
