// SPDX-License-Identifier: Apache-2.0
//
// isacbeam: secure ISAC transmit beamforming under a target location prior
// Copyright (C) 2026 The isacbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "isacbeam/cli_runner.hpp"
#include "isacbeam/presets.hpp"

using namespace isacbeam;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch_dir(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("isacbeam_cli_test_" + name);
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write_file(const fs::path &p, const std::string &text)
    {
        std::ofstream out(p, std::ios::binary);
        out << text;
    }

    std::string config_error(const std::string &json)
    {
        try
        {
            cli::parse_config(json);
        }
        catch (const cli::ConfigError &e)
        {
            return e.what();
        }
        return "";
    }

    int run_tool(const std::string &args)
    {
        const std::string cmd = std::string("ISACBEAM_LOG=error \"") + ISACBEAM_TOOL_PATH + "\" " + args +
                                " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    const char *pcrb_json = R"({
      "preset": "paper-sec6",
      "scenario": { "qbar_scale": "array-consistent" },
      "experiment": { "name": "pcrb-validate", "sigma_theta_list": [1e-3, 1e-2], "covariance": "random" },
      "seed": 7
    })";
}

TEST_CASE("preset matches the built-in scenario", "[cli]")
{
    const cli::ExperimentConfig cfg =
        cli::parse_config(R"({"preset": "paper-sec6", "experiment": {"name": "beampattern"}})");
    const ScenarioConfig ref = presets::paper_sec6(30.0);
    CHECK(cfg.scenario.array.n_tx == 8);
    CHECK(cfg.scenario.array.n_rx == 10);
    CHECK(cfg.scenario.array.spacing_ratio == 0.5);
    REQUIRE(cfg.scenario.prior.size() == 4);
    for (std::size_t k = 0; k < 4; ++k)
    {
        CHECK(cfg.scenario.prior.angles_rad[k] == Catch::Approx(ref.prior.angles_rad[k]).epsilon(1e-15));
        CHECK(cfg.scenario.prior.probs[k] == ref.prior.probs[k]);
    }
    CHECK(cfg.scenario.channels.power_budget_w == Catch::Approx(0.1).epsilon(1e-14));
    CHECK(cfg.scenario.channels.noise_user_w == Catch::Approx(1e-9).epsilon(1e-14));
    CHECK(cfg.scenario.channels.noise_radar_w == Catch::Approx(1e-9).epsilon(1e-14));
    CHECK(cfg.scenario.channels.beta0_over_r2 == Catch::Approx(0.1).epsilon(1e-14));
    CHECK((cfg.scenario.channels.user_channel - ref.channels.user_channel).norm() <=
          1e-14 * ref.channels.user_channel.norm());
    CHECK(cfg.qbar_scale == pcrb::QbarScale::Published);
    CHECK(cfg.experiment.name == cli::Experiment::Beampattern);
    CHECK(cfg.experiment.pcrb_threshold == 2.68e-5);
    CHECK(cfg.seed == 1);

    const cli::ExperimentConfig loud = cli::parse_config(
        R"({"preset": "paper-sec6", "scenario": {"user_path_loss_db": 60}, "experiment": {"name": "beampattern"}})");
    const ScenarioConfig ref60 = presets::paper_sec6(60.0);
    CHECK((loud.scenario.channels.user_channel - ref60.channels.user_channel).norm() <=
          1e-14 * ref60.channels.user_channel.norm());
}

TEST_CASE("config errors name the offending key", "[cli]")
{
    CHECK(config_error(R"({"preset": "paper-sec6", "scenario": {"bogus": 1}, "experiment": {"name": "beampattern"}})") ==
          "$.scenario.bogus: unknown key");
    CHECK(config_error(R"({"preset": "paper-sec6", "experiment": {"name": "beampattern"}, "extra": 0})") ==
          "$.extra: unknown key");
    CHECK(config_error(R"({"preset": "paper-sec6"})") == "$.experiment: missing required key");
    CHECK(config_error(R"({"experiment": {"name": "beampattern"}})") == "$.scenario.n_tx: missing required key");
    CHECK(config_error(R"({"preset": "paper-sec6", "experiment": {"name": "tradeoff"}})") ==
          "$.experiment.pcrb_thresholds: required and non-empty for tradeoff");
    CHECK(config_error(R"({"preset": "paper-sec6", "experiment": {"name": "pcrb-validate"}})") ==
          "$.experiment.sigma_theta_list: required and non-empty for pcrb-validate");
    CHECK(config_error(R"({"preset": "paper-sec6", "scenario": {"n_tx": "eight"}, "experiment": {"name": "beampattern"}})") ==
          "$.scenario.n_tx: expected an integer");
    CHECK(config_error(R"({"preset": "paper-sec6", "experiment": {"name": "sweep"}})").rfind("$.experiment.name:", 0) ==
          0);
    CHECK(config_error(R"({"preset": "other", "experiment": {"name": "beampattern"}})").rfind("$.preset:", 0) == 0);
    CHECK(config_error(R"({"preset": "paper-sec6", "experiment": {"name": "beampattern"}, "seed": -3})") ==
          "$.seed: expected a nonnegative integer");
    CHECK(config_error("{not json").rfind("$: invalid JSON", 0) == 0);
    CHECK(config_error(
              R"({"preset": "paper-sec6", "experiment": {"name": "tradeoff", "pcrb_thresholds": [1e-5, -2e-5]}})") ==
          "$.experiment.pcrb_thresholds: values must be positive");
}

TEST_CASE("load options override the file values", "[cli]")
{
    cli::LoadOptions opt;
    opt.output_override = "elsewhere";
    opt.has_seed = true;
    opt.seed = 99;
    const cli::ExperimentConfig cfg = cli::parse_config(pcrb_json, opt);
    CHECK(cfg.output_dir == fs::path("elsewhere"));
    CHECK(cfg.seed == 99);
    CHECK(cfg.qbar_scale == pcrb::QbarScale::ArrayConsistent);
    CHECK(cfg.experiment.sigma_theta_list == std::vector<double>{1e-3, 1e-2});
    CHECK(cfg.canonical != cli::parse_config(pcrb_json).canonical);
    CHECK(cli::preset_names() == std::vector<std::string>{"paper-sec6"});
}

TEST_CASE("user channel file is read relative to the config", "[cli]")
{
    const fs::path dir = scratch_dir("channel");
    std::string lines;
    for (int i = 0; i < 8; ++i)
        lines += std::to_string(0.01 * (i + 1)) + "," + std::to_string(-0.005 * i) + "\n";
    write_file(dir / "h.txt", lines);
    write_file(dir / "cfg.json", R"({"preset": "paper-sec6", "scenario": {"user_channel_file": "h.txt"},
                                     "experiment": {"name": "beampattern"}})");
    const cli::ExperimentConfig cfg = cli::load_config(dir / "cfg.json");
    CHECK(cfg.scenario.channels.user_channel(3) == cdouble(0.04, -0.015));

    write_file(dir / "short.txt", "0.1,0.2\n");
    write_file(dir / "bad.json", R"({"preset": "paper-sec6", "scenario": {"user_channel_file": "short.txt"},
                                     "experiment": {"name": "beampattern"}})");
    CHECK_THROWS_AS(cli::load_config(dir / "bad.json"), cli::ConfigError);
    CHECK_THROWS_AS(cli::load_config(dir / "missing.json"), cli::ConfigError);
}

TEST_CASE("FNV-1a reference values", "[cli]")
{
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(cli::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("number formatting", "[cli]")
{
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(cli::format_number(2.68e-5) == "2.68e-05");
    CHECK(cli::format_number(1.0 / 3.0, 3) == "0.333");
    CHECK(cli::format_number(std::nan("")) == "nan");
    CHECK(cli::format_number(INFINITY) == "inf");
    CHECK(cli::format_number(-INFINITY) == "-inf");
}

TEST_CASE("experiment output is deterministic and carries the config hash", "[cli]")
{
    const fs::path dir = scratch_dir("determinism");
    cli::LoadOptions opt;
    opt.output_override = dir / "a";
    const cli::ExperimentConfig a = cli::parse_config(pcrb_json, opt);
    opt.output_override = dir / "b";
    const cli::ExperimentConfig b = cli::parse_config(pcrb_json, opt);
    const cli::RunSummary ra = cli::run_experiment(a);
    const cli::RunSummary rb = cli::run_experiment(b);
    CHECK(ra.rows == 2);
    const std::string ta = slurp(ra.csv_path);
    CHECK(ta == slurp(rb.csv_path));

    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cli::fnv1a(a.canonical)));
    const std::string first = ta.substr(0, ta.find('\n'));
    CHECK(first == std::string("# isacbeam 1.0.0 config_hash=") + hash + " experiment=pcrb-validate");
    CHECK(ta.find("sigma_theta,pcrb_exact,pcrb_upper_quad,pcrb_closed_form,rel_err_bound_vs_closed\n") !=
          std::string::npos);

    opt.output_override = dir / "c";
    opt.has_seed = true;
    opt.seed = 8;
    const cli::RunSummary rc = cli::run_experiment(cli::parse_config(pcrb_json, opt));
    CHECK(slurp(rc.csv_path) != ta);
}

TEST_CASE("tool exit codes", "[cli]")
{
    const fs::path dir = scratch_dir("exit");
    write_file(dir / "ok.json", pcrb_json);
    write_file(dir / "bad.json", R"({"preset": "paper-sec6", "experiment": {"name": "nope"}})");
    write_file(dir / "infeasible.json", R"({"preset": "paper-sec6",
        "experiment": {"name": "beampattern", "pcrb_threshold": 1e-9}})");
    const std::string out = " --out \"" + (dir / "out").string() + "\"";

    CHECK(run_tool("validate-config \"" + (dir / "ok.json").string() + "\"") == cli::exit_ok);
    CHECK(run_tool("validate-config \"" + (dir / "bad.json").string() + "\"") == cli::exit_config);
    CHECK(run_tool("run --config \"" + (dir / "ok.json").string() + "\"" + out) == cli::exit_ok);
    CHECK(fs::exists(dir / "out" / "pcrb_validate.csv"));
    CHECK(run_tool("run --config \"" + (dir / "bad.json").string() + "\"" + out) == cli::exit_config);
    CHECK(run_tool("run --config \"" + (dir / "infeasible.json").string() + "\"" + out) == cli::exit_infeasible);
    CHECK(run_tool("run --config \"" + (dir / "ok.json").string() + "\" --preset nope" + out) == cli::exit_config);
    CHECK(run_tool("run --config \"" + (dir / "absent.json").string() + "\"") == cli::exit_config);
    CHECK(run_tool("") == cli::exit_config);
}
