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

#include "isacbeam/array_model.hpp"

namespace isacbeam::presets
{
    // Sensing threshold used for the beampattern experiment.
    inline constexpr double reference_pcrb_threshold = 2.68e-5;
    inline constexpr double reference_user_angle_deg = -10.0;

    /*
     * Reference scenario: N_t = 8, N_r = 10, half-wavelength spacing, K = 4 candidate angles
     * (-55, -35, 65, 45) deg with probabilities (0.2, 0.3, 0.1, 0.4), P = 20 dBm, target path loss
     * 10 dB, |alpha_bar| = 0.0071, all noise powers -60 dBm, LoS user at -10 deg.
     */
    ScenarioConfig paper_sec6(double user_path_loss_db = 30.0, double sigma_theta = 1e-2);
}
