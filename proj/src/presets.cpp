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


#include "isacbeam/presets.hpp"

namespace isacbeam::presets
{
    ScenarioConfig paper_sec6(double user_path_loss_db, double sigma_theta)
    {
        ScenarioConfig sc;
        sc.array = ArrayConfig{8, 10, 0.5};
        sc.prior.range_m = 1.0;
        sc.prior.angles_rad = {deg_to_rad(-55.0), deg_to_rad(-35.0), deg_to_rad(65.0), deg_to_rad(45.0)};
        sc.prior.probs = {0.2, 0.3, 0.1, 0.4};
        sc.prior.sigma_theta = sigma_theta;
        sc.channels.beta0_over_r2 = db_to_linear(-10.0);
        sc.channels.alpha_min_abs = 0.0071;
        sc.channels.noise_user_w = dbm_to_watt(-60.0);
        sc.channels.noise_eve_w = dbm_to_watt(-60.0);
        sc.channels.noise_radar_w = dbm_to_watt(-60.0);
        sc.channels.power_budget_w = dbm_to_watt(20.0);
        sc.channels.user_channel = los_user_channel(deg_to_rad(reference_user_angle_deg), user_path_loss_db, sc.array);
        return sc;
    }
}
