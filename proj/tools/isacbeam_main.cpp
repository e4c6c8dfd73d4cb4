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



#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "isacbeam/cli_runner.hpp"

namespace
{
    using namespace isacbeam;

    // ISACBEAM_LOG in {error, info, debug}; info when unset.
    bool configure_logging()
    {
        auto logger = spdlog::stderr_color_mt("isacbeam");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        const char *env = std::getenv("ISACBEAM_LOG");
        const std::string level = env ? env : "info";
        if (level == "error")
            spdlog::set_level(spdlog::level::err);
        else if (level == "info")
            spdlog::set_level(spdlog::level::info);
        else if (level == "debug")
            spdlog::set_level(spdlog::level::debug);
        else
        {
            spdlog::set_level(spdlog::level::info);
            spdlog::error("ISACBEAM_LOG must be one of error, info, debug (got \"{}\")", level);
            return false;
        }
        return true;
    }

    int run_command(const std::string &config, const cli::LoadOptions &opt, int threads)
    {
        cli::ExperimentConfig cfg;
        try
        {
            cfg = cli::load_config(config, opt);
        }
        catch (const cli::ConfigError &e)
        {
            spdlog::error("config: {}", e.what());
            return cli::exit_config;
        }
        if (threads > 0)
            omp_set_num_threads(threads);
        spdlog::info("experiment {} (seed {}, {} threads)", cli::to_string(cfg.experiment.name), cfg.seed,
                     omp_get_max_threads());
        try
        {
            cli::run_experiment(cfg);
        }
        catch (const InfeasibleScenario &e)
        {
            spdlog::error("infeasible: {}", e.what());
            return cli::exit_infeasible;
        }
        catch (const NumericalError &e)
        {
            spdlog::error("numerical failure: {}", e.what());
            return cli::exit_numerical;
        }
        catch (const InvalidInput &e)
        {
            spdlog::error("invalid input: {}", e.what());
            return cli::exit_config;
        }
        return cli::exit_ok;
    }

    int validate_command(const std::string &config)
    {
        try
        {
            const cli::ExperimentConfig cfg = cli::load_config(config);
            spdlog::info("{}: ok (experiment {}, config_hash={:016x})", config, cli::to_string(cfg.experiment.name),
                         cli::fnv1a(cfg.canonical));
            return cli::exit_ok;
        }
        catch (const cli::ConfigError &e)
        {
            spdlog::error("config: {}", e.what());
            return cli::exit_config;
        }
    }
}

int main(int argc, char **argv)
{
    if (!configure_logging())
        return cli::exit_config;

    CLI::App app{"Secure ISAC beamforming experiments"};
    app.set_version_flag("--version", std::string(cli::version));
    app.require_subcommand(1);

    std::string config;
    std::string preset;
    std::string out;
    int threads = 0;
    std::uint64_t seed = 0;

    CLI::App *run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--preset", preset, "Scenario preset")->check(CLI::IsMember(cli::preset_names()));
    run->add_option("--out", out, "Output directory (overrides output.directory)");
    run->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    CLI::Option *seed_opt = run->add_option("--seed", seed, "Random seed (overrides the config seed)");

    std::string validate_path;
    CLI::App *validate = app.add_subcommand("validate-config", "Parse and validate a config file");
    validate->add_option("path", validate_path, "JSON experiment config")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? cli::exit_ok : cli::exit_config;
    }

    try
    {
        if (*run)
        {
            cli::LoadOptions opt;
            opt.preset = preset;
            opt.output_override = out;
            opt.has_seed = seed_opt->count() > 0;
            opt.seed = seed;
            return run_command(config, opt, threads);
        }
        return validate_command(validate_path);
    }
    catch (const std::exception &e)
    {
        spdlog::error("{}", e.what());
        return 1;
    }
}
