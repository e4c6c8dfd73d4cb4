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



// Serial reference paths against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "isacbeam/beam_design.hpp"
#include "isacbeam/evaluation.hpp"
#include "isacbeam/presets.hpp"

namespace
{
    using namespace isacbeam;

    const design::DesignScenario &reference_scenario()
    {
        static const design::DesignScenario sc =
            design::make_design_scenario(presets::paper_sec6(30.0), presets::reference_pcrb_threshold);
        return sc;
    }

    void BM_gamma_grid(benchmark::State &state)
    {
        design::GammaSearchConfig cfg;
        cfg.grid_points = static_cast<int>(state.range(1));
        cfg.policy = state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
        const design::DesignScenario &sc = reference_scenario();
        const std::vector<double> grid = design::gamma_grid(sc, cfg);
        for (auto _ : state)
            benchmark::DoNotOptimize(design::evaluate_gamma_points(grid, sc, cfg));
        state.SetItemsProcessed(state.iterations() * cfg.grid_points);
    }

    void BM_mc_mse(benchmark::State &state)
    {
        const design::DesignScenario &sc = reference_scenario();
        static const design::BeamformingSolution sol = design::search_gamma(sc);
        const ExecutionPolicy policy = state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
        const int trials = static_cast<int>(state.range(1));
        for (auto _ : state)
            benchmark::DoNotOptimize(eval::mc_mse_oracle(sol.w, sol.an_beams, sc.config,
                                                         sc.config.channels.beta_min_abs(), trials, 16, 7, policy));
        state.SetItemsProcessed(state.iterations() * trials);
    }
}

BENCHMARK(BM_gamma_grid)->ArgNames({"parallel", "points"})->Args({0, 16})->Args({1, 16})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_mse)->ArgNames({"parallel", "trials"})->Args({0, 200})->Args({1, 200})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
