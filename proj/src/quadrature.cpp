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


#include "isacbeam/quadrature.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace isacbeam::quad
{
    namespace
    {
        // Newton iteration on the orthonormal Hermite recurrence with the usual asymptotic
        // starting guesses; converges to full double precision for orders used here.
        GaussHermiteRule compute_rule(int n)
        {
            GaussHermiteRule rule;
            rule.nodes.assign(n, 0.0);
            rule.weights.assign(n, 0.0);
            const double pim4 = std::pow(pi, -0.25);
            const int m = (n + 1) / 2;
            double z = 0.0;
            for (int i = 0; i < m; ++i)
            {
                if (i == 0)
                    z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
                else if (i == 1)
                    z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
                else if (i == 2)
                    z = 1.86 * z - 0.86 * rule.nodes[0];
                else if (i == 3)
                    z = 1.91 * z - 0.91 * rule.nodes[1];
                else
                    z = 2.0 * z - rule.nodes[i - 2];

                double pp = 0.0;
                for (int it = 0; it < 100; ++it)
                {
                    double p1 = pim4, p2 = 0.0;
                    for (int j = 0; j < n; ++j)
                    {
                        const double p3 = p2;
                        p2 = p1;
                        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
                    }
                    pp = std::sqrt(2.0 * n) * p2;
                    const double z1 = z;
                    z = z1 - p1 / pp;
                    if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z)))
                        break;
                }
                rule.nodes[i] = z;
                rule.nodes[n - 1 - i] = -z;
                rule.weights[i] = 2.0 / (pp * pp);
                rule.weights[n - 1 - i] = rule.weights[i];
            }
            return rule;
        }

        struct SimpsonState
        {
            const std::function<double(double)> &f;
            int evaluations = 0;
            int max_depth;
            bool converged = true;
            double worst_interval_a = 0.0, worst_interval_b = 0.0;
        };

        double simpson_step(SimpsonState &st, double a, double fa, double m, double fm, double b, double fb,
                            double whole, double tol, int depth, double &err)
        {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = st.f(lm), frm = st.f(rm);
            st.evaluations += 2;
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (std::abs(delta) <= 15.0 * tol || !std::isfinite(delta))
            {
                err += std::abs(delta) / 15.0;
                return left + right + delta / 15.0;
            }
            if (depth >= st.max_depth)
            {
                st.converged = false;
                st.worst_interval_a = a;
                st.worst_interval_b = b;
                err += std::abs(delta) / 15.0;
                return left + right + delta / 15.0;
            }
            return simpson_step(st, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, err) +
                   simpson_step(st, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, err);
        }
    }

    const GaussHermiteRule &gauss_hermite(int order)
    {
        if (order < 1)
            throw InvalidInput("gauss_hermite: order must be positive");
        static std::mutex lock;
        static std::map<int, GaussHermiteRule> cache;
        std::lock_guard<std::mutex> guard(lock);
        auto it = cache.find(order);
        if (it == cache.end())
            it = cache.emplace(order, compute_rule(order)).first;
        return it->second;
    }

    AdaptiveResult adaptive_simpson(const std::function<double(double)> &f, double a, double b,
                                    double abs_tol, int max_depth)
    {
        AdaptiveResult out;
        if (!(b > a))
            return out;
        SimpsonState st{f, 0, max_depth};
        const double m = 0.5 * (a + b);
        const double fa = f(a), fm = f(m), fb = f(b);
        st.evaluations = 3;
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        double err = 0.0;
        out.value = simpson_step(st, a, fa, m, fm, b, fb, whole, abs_tol, 0, err);
        out.error_estimate = err;
        out.evaluations = st.evaluations;
        out.converged = st.converged && std::isfinite(out.value);
        if (!out.converged)
        {
            std::ostringstream os;
            os << "adaptive Simpson hit depth " << max_depth << " near [" << st.worst_interval_a << ", "
               << st.worst_interval_b << "], estimate " << out.value << " +/- " << err;
            out.diagnostics = os.str();
        }
        return out;
    }
}
