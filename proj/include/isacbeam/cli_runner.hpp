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



#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "isacbeam/array_model.hpp"
#include "isacbeam/pcrb.hpp"

namespace isacbeam::cli
{
    inline constexpr const char *version = "1.0.0";

    // Malformed or inconsistent configuration; the message carries the JSON key path.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class Experiment
    {
        GammaSweep,
        Beampattern,
        Tradeoff,
        PcrbValidate
    };

    const char *to_string(Experiment e);

    struct GammaGridSpec
    {
        double min = 1e-4;
        double max = 0.0; // <= 0 selects the interference-free eavesdropper SINR bound
        int points = 64;
        int golden_iterations = 20;
    };

    enum class CovarianceSpec
    {
        Isotropic, // P / N_t I
        Optimized, // beams of the proposed design at pcrb_threshold
        Random     // random PSD covariance at full power, drawn from the seed
    };

    struct ExperimentParams
    {
        Experiment name = Experiment::GammaSweep;
        GammaGridSpec gamma_grid;
        std::vector<double> pcrb_thresholds; // Gamma list, rad^2
        double pcrb_threshold = 2.68e-5;      // beampattern and optimized covariance
        double theta_min_deg = -90.0;
        double theta_max_deg = 90.0;
        double theta_step_deg = 1.0;
        std::vector<double> sigma_theta_list;
        CovarianceSpec covariance = CovarianceSpec::Isotropic;
    };

    struct ExperimentConfig
    {
        ScenarioConfig scenario;
        pcrb::QbarScale qbar_scale = pcrb::QbarScale::Published;
        ExperimentParams experiment;
        std::filesystem::path output_dir = "out";
        int precision = 12;
        std::uint64_t seed = 1;
        // Canonical JSON of the resolved configuration; hashed into every CSV header.
        std::string canonical;
    };

    struct LoadOptions
    {
        std::string preset;                    // overrides the "preset" key when non-empty
        std::filesystem::path output_override; // overrides output.directory when non-empty
        bool has_seed = false;
        std::uint64_t seed = 1;
    };

    // Strict parse: unknown keys, wrong types and missing required fields throw ConfigError.
    ExperimentConfig parse_config(const std::string &json_text, const LoadOptions &opt = {},
                                  const std::filesystem::path &base_dir = ".");
    ExperimentConfig load_config(const std::filesystem::path &path, const LoadOptions &opt = {});

    // Names accepted for "preset" and --preset.
    std::vector<std::string> preset_names();

    // 64-bit FNV-1a.
    std::uint64_t fnv1a(const std::string &bytes);

    // printf-style %.<precision>g; non-finite values print as nan, inf, -inf.
    std::string format_number(double v, int precision = 12);

    struct RunSummary
    {
        std::filesystem::path csv_path;
        std::size_t rows = 0;
    };

    // Each runner writes one CSV into cfg.output_dir.
    RunSummary run_gamma_sweep(const ExperimentConfig &cfg);
    RunSummary run_beampattern(const ExperimentConfig &cfg);
    RunSummary run_tradeoff(const ExperimentConfig &cfg);
    RunSummary run_pcrb_validate(const ExperimentConfig &cfg);
    RunSummary run_experiment(const ExperimentConfig &cfg);

    // Process exit codes.
    inline constexpr int exit_ok = 0;
    inline constexpr int exit_config = 2;
    inline constexpr int exit_infeasible = 3;
    inline constexpr int exit_numerical = 4;
}
