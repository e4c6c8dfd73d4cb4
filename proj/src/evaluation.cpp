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


#include "isacbeam/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace isacbeam::eval
{
    namespace
    {
        double interference(const cvec &g, const std::vector<cvec> &vs)
        {
            double acc = 0.0;
            for (const cvec &v : vs)
                acc += std::norm(g.dot(v));
            return acc;
        }

        double lambda_max(const cmat &m)
        {
            Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
            return es.eigenvalues().maxCoeff();
        }

        double product_rel(const cmat &a, const cmat &b)
        {
            const double den = a.norm() * b.norm();
            return den > 0.0 ? (a * b).norm() / den : 0.0;
        }

        double log_prior(double theta, const LocationPrior &prior)
        {
            double lmax = -std::numeric_limits<double>::infinity();
            std::vector<double> l(prior.size());
            const double s = prior.sigma_theta;
            for (std::size_t k = 0; k < prior.size(); ++k)
            {
                const double u = (theta - prior.angles_rad[k]) / s;
                l[k] = prior.probs[k] > 0.0 ? std::log(prior.probs[k]) - 0.5 * u * u
                                            : -std::numeric_limits<double>::infinity();
                lmax = std::max(lmax, l[k]);
            }
            double acc = 0.0;
            for (double v : l)
                acc += std::exp(v - lmax);
            return lmax + std::log(acc) - std::log(s * std::sqrt(2.0 * pi));
        }

        cdouble complex_normal(std::mt19937_64 &rng, std::normal_distribution<double> &nd, double power)
        {
            const double s = std::sqrt(0.5 * power);
            const double re = nd(rng);
            const double im = nd(rng);
            return {s * re, s * im};
        }
    }

    double sinr_user(const cvec &w, const std::vector<cvec> &vs, const cvec &h, double sigma2)
    {
        return std::norm(h.dot(w)) / (interference(h, vs) + sigma2);
    }

    double sinr_eve(const cvec &w, const std::vector<cvec> &vs, double theta, const ChannelParams &channels,
                    const ArrayConfig &cfg)
    {
        const cvec a = steering_tx(theta, cfg);
        return std::norm(a.dot(w)) / (interference(a, vs) + channels.eve_noise_referred());
    }

    SecrecyReport secrecy_report(const cvec &w, const std::vector<cvec> &vs, const ScenarioConfig &sc)
    {
        SecrecyReport r;
        r.sinr_user = sinr_user(w, vs, sc.channels.user_channel, sc.channels.noise_user_w);
        r.worst_case_rate = std::numeric_limits<double>::infinity();
        for (double th : sc.prior.angles_rad)
        {
            const double se = sinr_eve(w, vs, th, sc.channels, sc.array);
            r.sinr_eve.push_back(se);
            r.rates.push_back(std::max(0.0, std::log2(1.0 + r.sinr_user) - std::log2(1.0 + se)));
            r.worst_case_rate = std::min(r.worst_case_rate, r.rates.back());
        }
        if (r.rates.empty())
            r.worst_case_rate = std::log2(1.0 + r.sinr_user);
        return r;
    }

    std::vector<BeampatternRow> beampattern(const cvec &w, const std::vector<cvec> &vs,
                                            const std::vector<double> &theta_grid, const ArrayConfig &cfg)
    {
        std::vector<BeampatternRow> rows;
        rows.reserve(theta_grid.size());
        for (double th : theta_grid)
        {
            const cvec a = steering_tx(th, cfg);
            rows.push_back({th, std::norm(a.dot(w)), interference(a, vs)});
        }
        return rows;
    }

    design::KktReport kkt_report(const design::InnerSolveResult &result, const design::DesignScenario &sc)
    {
        if (result.status != sdp::Status::Optimal || result.beta.size() != sc.k())
            throw InvalidInput("kkt_report: inner solve is not optimal");
        design::KktReport r;
        const int n = sc.n_tx();
        const cmat eye = cmat::Identity(n, n);
        const ChannelParams &ch = sc.config.channels;
        cmat sum_ba = cmat::Zero(n, n);
        double sum_b = 0.0;
        for (std::size_t k = 0; k < sc.k(); ++k)
        {
            sum_ba += result.beta[k] * sc.a_outer[k];
            sum_b += result.beta[k];
            r.multipliers_nonnegative = r.multipliers_nonnegative && result.beta[k] >= 0.0;
        }
        r.s_mat = hermitian_part(sc.h_outer - sum_ba + result.psi * sc.qbar.matrix - result.rho * eye);
        r.b_mat = hermitian_part(-result.lambda * sc.h_outer + result.gamma * sum_ba + result.psi * sc.qbar.matrix -
                                 result.rho * eye);
        r.lambda_max_s = lambda_max(r.s_mat);
        r.lambda_max_b = lambda_max(r.b_mat);
        r.xi = -result.lambda * ch.noise_user_w + result.gamma * ch.eve_noise_referred() * sum_b +
               result.rho * ch.power_budget_w - result.psi * std::max(0.0, sc.sensing_coefficient);
        r.sw_rel = product_rel(r.s_mat, result.w_mat);
        r.bv_rel = product_rel(r.b_mat, result.v_mat);
        r.lambda = result.lambda;
        r.rho = result.rho;
        r.psi = result.psi;
        r.beta = result.beta;
        r.multipliers_nonnegative = r.multipliers_nonnegative && result.rho >= 0.0 && result.psi >= 0.0;
        return r;
    }

    MseResult mc_mse_oracle(const cvec &w, const std::vector<cvec> &vs, const ScenarioConfig &sc, cdouble beta,
                            int n_trials, int n_snapshots, std::uint64_t seed, ExecutionPolicy policy)
    {
        sc.validate();
        if (n_trials < 1 || n_snapshots < 1)
            throw InvalidInput("mc_mse_oracle: trial and snapshot counts must be positive");
        const LocationPrior &prior = sc.prior;
        const ArrayConfig &cfg = sc.array;
        const double s = prior.sigma_theta;
        const double sr2 = sc.channels.noise_radar_w;

        // Estimation grid: 4096 points spread uniformly over the merged +-6 sigma supports.
        constexpr int grid_size = 4096;
        std::vector<std::pair<double, double>> segs;
        for (double th : prior.angles_rad)
            segs.emplace_back(th - 6.0 * s, th + 6.0 * s);
        std::sort(segs.begin(), segs.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto &sg : segs)
        {
            if (!merged.empty() && sg.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, sg.second);
            else
                merged.push_back(sg);
        }
        double total = 0.0;
        for (const auto &m : merged)
            total += m.second - m.first;
        const double step = total / grid_size;
        std::vector<double> grid;
        grid.reserve(grid_size);
        for (int i = 0; i < grid_size; ++i)
        {
            double off = (i + 0.5) * step;
            for (const auto &m : merged)
            {
                const double wdt = m.second - m.first;
                if (off < wdt || &m == &merged.back())
                {
                    grid.push_back(m.first + std::min(off, wdt));
                    break;
                }
                off -= wdt;
            }
        }

        const cmat rx = pcrb::covariance(w, vs);
        const pcrb::PcrbBreakdown bound =
            pcrb::pcrb_exact_breakdown(rx, beta, prior, cfg, sc.channels, static_cast<double>(n_snapshots));
        const double quantization = step * step / 12.0;
        if (!(quantization <= 0.05 * bound.value))
            throw NumericalError("mc_mse_oracle: estimation grid too coarse for the bound being tested");

        std::vector<cvec> a_grid(grid.size()), b_grid(grid.size());
        std::vector<double> lp_grid(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g)
        {
            a_grid[g] = steering_tx(grid[g], cfg);
            b_grid[g] = steering_rx(grid[g], cfg);
            lp_grid[g] = log_prior(grid[g], prior);
        }

        std::vector<double> cdf;
        double acc = 0.0;
        for (double p : prior.probs)
            cdf.push_back(acc += p);

        const int nt = cfg.n_tx, nr = cfg.n_rx;
        std::vector<double> sq_err(n_trials, 0.0);
        auto trial = [&](int t) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(t), 0x5eedu};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> ud(0.0, 1.0);
            std::normal_distribution<double> nd(0.0, 1.0);

            const double u = ud(rng) * acc;
            std::size_t k = 0;
            while (k + 1 < cdf.size() && u > cdf[k])
                ++k;
            const double theta = prior.angles_rad[k] + s * nd(rng);
            const cvec a = steering_tx(theta, cfg);
            const cvec b = steering_rx(theta, cfg);

            cmat y_sum = cmat::Zero(nr, nt); // sum_l y_l x_l^H
            cmat x_sum = cmat::Zero(nt, nt); // sum_l x_l x_l^H
            cvec x(nt), y(nr);
            for (int l = 0; l < n_snapshots; ++l)
            {
                x = complex_normal(rng, nd, 1.0) * w;
                for (const cvec &v : vs)
                    x += complex_normal(rng, nd, 1.0) * v;
                const cdouble ax = beta * a.dot(x);
                for (int i = 0; i < nr; ++i)
                    y(i) = ax * b(i) + complex_normal(rng, nd, sr2);
                y_sum += y * x.adjoint();
                x_sum += x * x.adjoint();
            }

            // Concentrated log-likelihood after least-squares beta, plus log prior.
            double best = -std::numeric_limits<double>::infinity();
            double est = grid.front();
            for (std::size_t g = 0; g < grid.size(); ++g)
            {
                const cdouble num = b_grid[g].dot(y_sum * a_grid[g]);
                const double den = b_grid[g].squaredNorm() * a_grid[g].dot(x_sum * a_grid[g]).real();
                const double obj = (den > 0.0 ? std::norm(num) / (sr2 * den) : 0.0) + lp_grid[g];
                if (obj > best)
                {
                    best = obj;
                    est = grid[g];
                }
            }
            sq_err[t] = (est - theta) * (est - theta);
        };

        if (policy == ExecutionPolicy::Parallel)
        {
#pragma omp parallel for schedule(static)
            for (int t = 0; t < n_trials; ++t)
                trial(t);
        }
        else
        {
            for (int t = 0; t < n_trials; ++t)
                trial(t);
        }

        MseResult r;
        double sum = 0.0;
        for (double e : sq_err)
            sum += e;
        r.empirical_mse = sum / n_trials;
        r.pcrb_exact = bound.value;
        r.n_trials = n_trials;
        r.n_snapshots = n_snapshots;
        r.grid_step = step;
        return r;
    }
}
