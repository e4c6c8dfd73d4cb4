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

#include <vector>

#include "isacbeam/core.hpp"

namespace isacbeam
{
    // Uniform linear arrays at the base station. Transmit and receive arrays share the spacing.
    struct ArrayConfig
    {
        int n_tx = 8;
        int n_rx = 10;
        double spacing_ratio = 0.5; // antenna spacing over wavelength

        void validate() const;
    };

    // Discrete candidate target angles, smoothed into a Gaussian mixture of width sigma_theta.
    struct LocationPrior
    {
        double range_m = 1.0;
        std::vector<double> angles_rad;
        std::vector<double> probs;
        double sigma_theta = 1e-2;

        std::size_t size() const { return angles_rad.size(); }
        void validate() const;
    };

    struct ChannelParams
    {
        double beta0_over_r2 = 0.1; // one-way BS-target power gain
        double alpha_min_abs = 0.0071;
        double noise_user_w = 1e-9;
        double noise_eve_w = 1e-9;
        double noise_radar_w = 1e-9;
        double power_budget_w = 0.1;
        cvec user_channel;

        // |beta_bar| = (beta0 / r^2) |alpha_bar|, the worst-case reflection amplitude.
        double beta_min_abs() const { return beta0_over_r2 * alpha_min_abs; }
        // sigma_E^2 r^2 / beta0, the eavesdropper noise referred to the transmit side.
        double eve_noise_referred() const { return noise_eve_w / beta0_over_r2; }
        void validate(int n_tx) const;
    };

    struct ScenarioConfig
    {
        ArrayConfig array;
        LocationPrior prior;
        ChannelParams channels;

        void validate() const;
    };

    /*
     * Steering vectors. Element n (1-based) of an N-element array carries the phase
     * pi * Delta * (2n - 1 - N) * sin(theta), so the phase reference sits at the array centre
     * and ||a(theta)||^2 = N for every theta.
     */
    cvec steering_tx(double theta, const ArrayConfig &cfg);
    cvec steering_rx(double theta, const ArrayConfig &cfg);
    cvec steering_tx_deriv(double theta, const ArrayConfig &cfg);
    cvec steering_rx_deriv(double theta, const ArrayConfig &cfg);

    // M(theta) = b(theta) a^H(theta), N_rx x N_tx.
    cmat response_matrix(double theta, const ArrayConfig &cfg);
    // dM/dtheta = b' a^H + b a'^H.
    cmat response_matrix_deriv(double theta, const ArrayConfig &cfg);

    // Gaussian-mixture smoothing of the discrete prior, in 1/rad.
    double gmm_pdf(double theta, const LocationPrior &prior);

    // h_E^H(theta) = sqrt(beta0 / r^2) a^H(theta).
    crow eavesdropper_channel(double theta, const ChannelParams &channels, const ArrayConfig &cfg);

    // LoS user channel h = sqrt(10^(-PL/10)) a(user_angle).
    cvec los_user_channel(double user_angle, double path_loss_db, const ArrayConfig &cfg);

    // Sum over receive elements of the squared phase slope, ||b'(theta)||^2 / cos^2(theta).
    double rx_slope_energy(const ArrayConfig &cfg);
}
