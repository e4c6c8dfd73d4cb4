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


#include "isacbeam/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace isacbeam
{
    namespace
    {
        // Phase coefficient (2n - 1 - N) for 1-based n, written for 0-based index i.
        inline double phase_index(int i, int n) { return static_cast<double>(2 * i + 1 - n); }

        cvec steering(double theta, int n, double spacing)
        {
            cvec a(n);
            const double s = pi * spacing * std::sin(theta);
            for (int i = 0; i < n; ++i)
                a(i) = std::polar(1.0, phase_index(i, n) * s);
            return a;
        }

        cvec steering_deriv(double theta, int n, double spacing)
        {
            cvec a = steering(theta, n, spacing);
            const double c = pi * spacing * std::cos(theta);
            for (int i = 0; i < n; ++i)
                a(i) *= cdouble(0.0, phase_index(i, n) * c);
            return a;
        }
    }

    void ArrayConfig::validate() const
    {
        if (n_tx < 1 || n_rx < 1)
            throw InvalidInput("ArrayConfig: n_tx and n_rx must be at least 1");
        if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio))
            throw InvalidInput("ArrayConfig: spacing_ratio must be positive");
    }

    void LocationPrior::validate() const
    {
        if (angles_rad.empty())
            throw InvalidInput("LocationPrior: at least one candidate angle is required");
        if (angles_rad.size() != probs.size())
            throw InvalidInput("LocationPrior: angles and probs differ in length");
        if (!(sigma_theta > 0.0) || !std::isfinite(sigma_theta))
            throw InvalidInput("LocationPrior: sigma_theta must be positive");
        if (!(range_m > 0.0))
            throw InvalidInput("LocationPrior: range_m must be positive");
        double total = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k)
        {
            if (!(probs[k] >= 0.0 && probs[k] <= 1.0))
                throw InvalidInput("LocationPrior: probability " + std::to_string(k) + " outside [0,1]");
            if (!(angles_rad[k] >= -pi && angles_rad[k] < pi))
                throw InvalidInput("LocationPrior: angle " + std::to_string(k) + " outside [-pi, pi)");
            total += probs[k];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw InvalidInput("LocationPrior: probabilities must sum to 1");
        std::vector<double> sorted = angles_rad;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidInput("LocationPrior: candidate angles must be distinct");
    }

    void ChannelParams::validate(int n_tx) const
    {
        const double positives[] = {beta0_over_r2, alpha_min_abs, noise_user_w, noise_eve_w, noise_radar_w, power_budget_w};
        for (double v : positives)
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidInput("ChannelParams: gains, noise powers and power budget must be positive");
        if (user_channel.size() != n_tx)
            throw InvalidInput("ChannelParams: user_channel length must equal n_tx");
        if (!(user_channel.norm() > 0.0))
            throw InvalidInput("ChannelParams: user_channel must be nonzero");
    }

    void ScenarioConfig::validate() const
    {
        array.validate();
        prior.validate();
        channels.validate(array.n_tx);
    }

    cvec steering_tx(double theta, const ArrayConfig &cfg) { return steering(theta, cfg.n_tx, cfg.spacing_ratio); }
    cvec steering_rx(double theta, const ArrayConfig &cfg) { return steering(theta, cfg.n_rx, cfg.spacing_ratio); }
    cvec steering_tx_deriv(double theta, const ArrayConfig &cfg) { return steering_deriv(theta, cfg.n_tx, cfg.spacing_ratio); }
    cvec steering_rx_deriv(double theta, const ArrayConfig &cfg) { return steering_deriv(theta, cfg.n_rx, cfg.spacing_ratio); }

    cmat response_matrix(double theta, const ArrayConfig &cfg)
    {
        return steering_rx(theta, cfg) * steering_tx(theta, cfg).adjoint();
    }

    cmat response_matrix_deriv(double theta, const ArrayConfig &cfg)
    {
        return steering_rx_deriv(theta, cfg) * steering_tx(theta, cfg).adjoint() +
               steering_rx(theta, cfg) * steering_tx_deriv(theta, cfg).adjoint();
    }

    double gmm_pdf(double theta, const LocationPrior &prior)
    {
        const double s = prior.sigma_theta;
        const double norm = 1.0 / (s * std::sqrt(2.0 * pi));
        double p = 0.0;
        for (std::size_t k = 0; k < prior.size(); ++k)
        {
            const double u = (theta - prior.angles_rad[k]) / s;
            p += prior.probs[k] * norm * std::exp(-0.5 * u * u);
        }
        return p;
    }

    crow eavesdropper_channel(double theta, const ChannelParams &channels, const ArrayConfig &cfg)
    {
        return std::sqrt(channels.beta0_over_r2) * steering_tx(theta, cfg).adjoint();
    }

    cvec los_user_channel(double user_angle, double path_loss_db, const ArrayConfig &cfg)
    {
        if (!(path_loss_db >= 0.0))
            throw InvalidInput("los_user_channel: path loss must be nonnegative");
        return std::sqrt(db_to_linear(-path_loss_db)) * steering_tx(user_angle, cfg);
    }

    double rx_slope_energy(const ArrayConfig &cfg)
    {
        double acc = 0.0;
        for (int i = 0; i < cfg.n_rx; ++i)
            acc += phase_index(i, cfg.n_rx) * phase_index(i, cfg.n_rx);
        return pi * pi * cfg.spacing_ratio * cfg.spacing_ratio * acc;
    }
}
