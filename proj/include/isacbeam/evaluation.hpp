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
#include <vector>

#include "isacbeam/array_model.hpp"
#include "isacbeam/beam_design.hpp"

namespace isacbeam::eval
{
    double sinr_user(const cvec &w, const std::vector<cvec> &vs, const cvec &h, double sigma2);

    // Eavesdropper at theta with one-way gain beta0/r^2 taken from channels.
    double sinr_eve(const cvec &w, const std::vector<cvec> &vs, double theta, const ChannelParams &channels,
                    const ArrayConfig &cfg);

    struct SecrecyReport
    {
        double sinr_user = 0.0;
        std::vector<double> sinr_eve;
        std::vector<double> rates;
        double worst_case_rate = 0.0;
    };

    SecrecyReport secrecy_report(const cvec &w, const std::vector<cvec> &vs, const ScenarioConfig &sc);

    struct BeampatternRow
    {
        double theta = 0.0;
        double info_power = 0.0; // W
        double an_power = 0.0;   // W
    };

    std::vector<BeampatternRow> beampattern(const cvec &w, const std::vector<cvec> &vs,
                                            const std::vector<double> &theta_grid, const ArrayConfig &cfg);

    design::KktReport kkt_report(const design::InnerSolveResult &result, const design::DesignScenario &sc);

    struct MseResult
    {
        double empirical_mse = 0.0;
        double pcrb_exact = 0.0;
        int n_trials = 0;
        int n_snapshots = 0;
        double grid_step = 0.0;
    };

    /*
     * Monte-Carlo MAP estimation of theta: per trial theta is drawn from the prior, n_snapshots
     * echoes are simulated with fresh unit-power symbols, and the estimate maximises the
     * concentrated log-likelihood plus log prior on a 4096-point grid over the prior support.
     * Trial seeds are derived from (seed, trial) so the result does not depend on the policy.
     */
    MseResult mc_mse_oracle(const cvec &w, const std::vector<cvec> &vs, const ScenarioConfig &sc, cdouble beta,
                            int n_trials, int n_snapshots, std::uint64_t seed,
                            ExecutionPolicy policy = ExecutionPolicy::Parallel);
}
