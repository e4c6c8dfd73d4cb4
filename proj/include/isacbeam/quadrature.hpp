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

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "isacbeam/array_model.hpp"

namespace isacbeam::quad
{
    // Gauss-Hermite rule for the weight exp(-u^2) on the real line.
    struct GaussHermiteRule
    {
        std::vector<double> nodes;
        std::vector<double> weights;
    };

    // Nodes and weights are computed once per order and cached.
    const GaussHermiteRule &gauss_hermite(int order);

    inline constexpr int mixture_order = 40;

    /*
     * E[f(theta)] under the Gaussian mixture: every component is integrated with the
     * substitution theta = theta_k + sqrt(2) sigma u, so the Gaussian weight becomes exp(-u^2).
     * T must support T + T and double * T; `zero` fixes the accumulator shape.
     */
    template <typename T, typename F>
    T mixture_expectation(const LocationPrior &prior, F &&f, T zero, int order = mixture_order)
    {
        const GaussHermiteRule &rule = gauss_hermite(order);
        const double scale = std::sqrt(2.0) * prior.sigma_theta;
        const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
        T acc = zero;
        for (std::size_t k = 0; k < prior.size(); ++k)
        {
            if (prior.probs[k] == 0.0)
                continue;
            T part = zero;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                part = part + (rule.weights[i] * inv_sqrt_pi) * f(prior.angles_rad[k] + scale * rule.nodes[i]);
            acc = acc + prior.probs[k] * part;
        }
        return acc;
    }

    struct AdaptiveResult
    {
        double value = 0.0;
        double error_estimate = 0.0;
        int evaluations = 0;
        bool converged = true;
        std::string diagnostics;
    };

    // Adaptive Simpson on [a, b] with Richardson correction.
    AdaptiveResult adaptive_simpson(const std::function<double(double)> &f, double a, double b,
                                    double abs_tol, int max_depth = 50);
}
