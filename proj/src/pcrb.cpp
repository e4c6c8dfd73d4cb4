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


#include "isacbeam/pcrb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "isacbeam/quadrature.hpp"

namespace isacbeam::pcrb
{
    namespace
    {
        struct TraceSums
        {
            double g1 = 0.0, g2 = 0.0, g4 = 0.0;
            cdouble g3 = 0.0;

            TraceSums operator+(const TraceSums &o) const { return {g1 + o.g1, g2 + o.g2, g4 + o.g4, g3 + o.g3}; }
            friend TraceSums operator*(double s, const TraceSums &t) { return {s * t.g1, s * t.g2, s * t.g4, s * t.g3}; }
        };

        // Per-angle traces using M = b a^H, so that every trace collapses to quadratic forms in R.
        TraceSums traces_at(double theta, const cmat &rx, const ArrayConfig &cfg)
        {
            const cvec a = steering_tx(theta, cfg);
            const cvec ad = steering_tx_deriv(theta, cfg);
            const cvec b = steering_rx(theta, cfg);
            const cvec bd = steering_rx_deriv(theta, cfg);

            const cvec ra = rx * a;
            const cvec rad = rx * ad;
            const double a_r_a = a.dot(ra).real();        // a^H R a
            const double ad_r_ad = ad.dot(rad).real();    // a'^H R a'
            const cdouble a_r_ad = a.dot(rad);            // a^H R a'
            const cdouble ad_r_a = ad.dot(ra);            // a'^H R a
            const double nb = b.squaredNorm();
            const double nbd = bd.squaredNorm();
            const cdouble bd_b = bd.dot(b);               // b'^H b

            TraceSums t;
            t.g1 = nb * a_r_a;
            t.g2 = nbd * a_r_a + (bd_b * ad_r_a + std::conj(bd_b) * a_r_ad).real() + nb * ad_r_ad;
            t.g3 = bd_b * a_r_a + nb * a_r_ad;
            t.g4 = nbd * a_r_a;
            return t;
        }

        double log_component(const LocationPrior &prior, std::size_t k, double theta)
        {
            const double u = (theta - prior.angles_rad[k]) / prior.sigma_theta;
            return std::log(prior.probs[k]) - std::log(prior.sigma_theta * std::sqrt(2.0 * pi)) - 0.5 * u * u;
        }

        // Integrand of eps: sum_{k<n} q_k q_n (theta_n - theta_k)^2 / (sigma^4 sum_j q_j), in log space.
        double eps_integrand(const LocationPrior &prior, double theta)
        {
            const std::size_t K = prior.size();
            std::vector<double> lq(K, -std::numeric_limits<double>::infinity());
            double lmax = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k)
            {
                if (prior.probs[k] > 0.0)
                    lq[k] = log_component(prior, k, theta);
                lmax = std::max(lmax, lq[k]);
            }
            if (!std::isfinite(lmax))
                return 0.0;
            double sum = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                sum += std::exp(lq[k] - lmax);
            const double lse = lmax + std::log(sum);
            const double s4 = std::pow(prior.sigma_theta, 4);
            double acc = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t n = k + 1; n < K; ++n)
                {
                    if (!std::isfinite(lq[k]) || !std::isfinite(lq[n]))
                        continue;
                    const double d = prior.angles_rad[n] - prior.angles_rad[k];
                    acc += std::exp(lq[k] + lq[n] - lse) * d * d;
                }
            return acc / s4;
        }
    }

    double rho0(const ArrayConfig &cfg, QbarScale scale)
    {
        const double d2 = pi * pi * cfg.spacing_ratio * cfg.spacing_ratio;
        if (scale == QbarScale::ArrayConsistent)
            return 0.5 * rx_slope_energy(cfg);
        double acc = 0.0;
        for (int n = 1; n <= cfg.n_rx; ++n)
            acc += static_cast<double>((n - 1) * (n - 1));
        return d2 * acc;
    }

    void require_psd(const cmat &rx, const char *who)
    {
        if (rx.rows() != rx.cols())
            throw InvalidInput(std::string(who) + ": covariance must be square");
        const double scale = std::max(1.0, rx.norm());
        if ((rx - rx.adjoint()).norm() > 1e-10 * scale)
            throw InvalidInput(std::string(who) + ": covariance is not Hermitian");
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(rx), Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
        if (lmin < -1e-10 * std::max(1.0, lmax))
            throw InvalidInput(std::string(who) + ": covariance is not positive semidefinite");
    }

    FimComponents fim_components(const cmat &rx, const LocationPrior &prior, const ArrayConfig &cfg)
    {
        prior.validate();
        if (rx.rows() != cfg.n_tx)
            throw InvalidInput("fim_components: covariance dimension must equal n_tx");
        require_psd(rx, "fim_components");
        const TraceSums t = quad::mixture_expectation(
            prior, [&](double theta) { return traces_at(theta, rx, cfg); }, TraceSums{});
        const PriorFim jp = fim_prior(prior);
        FimComponents out;
        out.g1 = t.g1;
        out.g2 = t.g2;
        out.g3 = t.g3;
        out.g4 = t.g4;
        out.eps = jp.eps;
        out.jp_theta = jp.jp_theta;
        return out;
    }

    Eigen::Matrix3d fim_data(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                             const ChannelParams &channels)
    {
        const FimComponents g = fim_components(rx, prior, cfg);
        const double c = 2.0 / channels.noise_radar_w;
        const cdouble bc = std::conj(beta) * g.g3;
        Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
        j(0, 0) = c * std::norm(beta) * g.g2;
        j(0, 1) = j(1, 0) = c * bc.real();
        j(0, 2) = j(2, 0) = -c * bc.imag();
        j(1, 1) = j(2, 2) = c * g.g1;
        return j;
    }

    PriorFim fim_prior(const LocationPrior &prior)
    {
        prior.validate();
        const double s = prior.sigma_theta;
        PriorFim out;
        std::size_t active = 0;
        for (double p : prior.probs)
            active += p > 0.0 ? 1 : 0;
        if (active <= 1)
        {
            out.eps = 0.0;
            out.jp_theta = 1.0 / (s * s);
            return out;
        }

        // Integration support: +-8 sigma around every component plus the gaps between
        // neighbours where the mixture is still representable (above 1e-300).
        std::vector<double> centres;
        for (std::size_t k = 0; k < prior.size(); ++k)
            if (prior.probs[k] > 0.0)
                centres.push_back(prior.angles_rad[k]);
        std::sort(centres.begin(), centres.end());
        std::vector<std::pair<double, double>> pieces;
        for (double c : centres)
            pieces.emplace_back(c - 8.0 * s, c + 8.0 * s);
        for (std::size_t i = 0; i + 1 < centres.size(); ++i)
        {
            const double mid = 0.5 * (centres[i] + centres[i + 1]);
            if (gmm_pdf(mid, prior) > 1e-300)
                pieces.emplace_back(centres[i], centres[i + 1]);
        }
        std::sort(pieces.begin(), pieces.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto &pc : pieces)
        {
            if (!merged.empty() && pc.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, pc.second);
            else
                merged.push_back(pc);
        }

        double total_width = 0.0;
        for (const auto &m : merged)
            total_width += m.second - m.first;
        const double total_tol = 1e-13 / (s * s);
        double eps = 0.0;
        auto f = [&](double theta) { return eps_integrand(prior, theta); };
        for (const auto &m : merged)
        {
            // Chunks no wider than sigma so the first Simpson samples resolve every bump.
            const int chunks = std::max(1, static_cast<int>(std::ceil((m.second - m.first) / s)));
            const double h = (m.second - m.first) / chunks;
            for (int c = 0; c < chunks; ++c)
            {
                const double a = m.first + c * h;
                const double b = (c + 1 == chunks) ? m.second : a + h;
                const auto r = quad::adaptive_simpson(f, a, b, total_tol * h / total_width);
                if (!r.converged)
                    throw NumericalError("fim_prior: " + r.diagnostics);
                eps += r.value;
            }
        }
        out.eps = std::max(0.0, eps);
        out.jp_theta = 1.0 / (s * s) - out.eps;
        return out;
    }

    PcrbBreakdown pcrb_exact_breakdown(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                                       const ChannelParams &channels, double snapshots)
    {
        PcrbBreakdown out;
        out.components = fim_components(rx, prior, cfg);
        const FimComponents &g = out.components;
        const double c = snapshots * 2.0 / channels.noise_radar_w;
        const double jbb = c * g.g1;
        double schur = g.jp_theta;
        if (jbb > 0.0 && std::norm(beta) > 0.0)
        {
            const double jtt = c * std::norm(beta) * g.g2;
            const cdouble bc = std::conj(beta) * g.g3;
            const double cross = c * c * std::norm(bc) / jbb;
            schur += jtt - cross;
        }
        if (!(schur >= 1e-14 * g.jp_theta))
        {
            out.degenerate = true;
            schur = g.jp_theta;
        }
        out.schur = schur;
        out.value = 1.0 / schur;
        return out;
    }

    double pcrb_exact(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                      const ChannelParams &channels)
    {
        return pcrb_exact_breakdown(rx, beta, prior, cfg, channels).value;
    }

    double pcrb_upper(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                      const ChannelParams &channels)
    {
        const FimComponents g = fim_components(rx, prior, cfg);
        return 1.0 / ((2.0 * std::norm(beta) / channels.noise_radar_w) * g.g4 + g.jp_theta);
    }

    QbarMatrix q_bar(const LocationPrior &prior, const ArrayConfig &cfg, QbarScale scale)
    {
        prior.validate();
        QbarMatrix out;
        out.rho0 = rho0(cfg, scale);
        out.matrix = cmat::Zero(cfg.n_tx, cfg.n_tx);
        for (std::size_t k = 0; k < prior.size(); ++k)
        {
            const double wk = out.rho0 * prior.probs[k] * (std::cos(2.0 * prior.angles_rad[k]) + 1.0);
            out.weights.push_back(wk);
            const cvec a = steering_tx(prior.angles_rad[k], cfg);
            out.matrix += wk * (a * a.adjoint());
        }
        out.matrix = hermitian_part(out.matrix);
        return out;
    }

    double pcrb_closed_form(const cvec &w, const std::vector<cvec> &vs, double beta_abs_min, const QbarMatrix &qbar,
                            const LocationPrior &prior, const ChannelParams &channels)
    {
        double quad_form = w.size() ? w.dot(qbar.matrix * w).real() : 0.0;
        for (const cvec &v : vs)
            quad_form += v.dot(qbar.matrix * v).real();
        const double s = prior.sigma_theta;
        return 1.0 / ((2.0 * beta_abs_min * beta_abs_min / channels.noise_radar_w) * quad_form + 1.0 / (s * s));
    }

    double pcrb_closed_form_cov(const cmat &rx, double beta_abs_min, const QbarMatrix &qbar, const LocationPrior &prior,
                                const ChannelParams &channels)
    {
        const double s = prior.sigma_theta;
        return 1.0 / ((2.0 * beta_abs_min * beta_abs_min / channels.noise_radar_w) * trace_product(qbar.matrix, rx) +
                      1.0 / (s * s));
    }

    QbarComponentCheck validate_qbar_component(std::size_t k, const LocationPrior &prior, const ArrayConfig &cfg)
    {
        prior.validate();
        if (k >= prior.size())
            throw InvalidInput("validate_qbar_component: component index out of range");
        const double r0 = rho0(cfg, QbarScale::Published);
        const double thk = prior.angles_rad[k];

        LocationPrior single = prior;
        single.angles_rad = {thk};
        single.probs = {1.0};
        const cmat zero = cmat::Zero(cfg.n_tx, cfg.n_tx);
        const cmat integral = quad::mixture_expectation(
            single,
            [&](double theta) -> cmat {
                const cvec a = steering_tx(theta, cfg);
                const double c = std::cos(theta);
                return (c * c) * (a * a.adjoint());
            },
            zero, 64);

        QbarComponentCheck out;
        out.s_quadrature = (2.0 * r0 * prior.probs[k]) * integral;
        const cvec ak = steering_tx(thk, cfg);
        out.s_closed_form = (r0 * prior.probs[k] * (std::cos(2.0 * thk) + 1.0)) * (ak * ak.adjoint());
        double max_abs = 0.0, max_rel = 0.0, max_ref = 0.0;
        for (Eigen::Index i = 0; i < out.s_closed_form.rows(); ++i)
            for (Eigen::Index j = 0; j < out.s_closed_form.cols(); ++j)
            {
                const double diff = std::abs(out.s_quadrature(i, j) - out.s_closed_form(i, j));
                const double ref = std::abs(out.s_closed_form(i, j));
                max_abs = std::max(max_abs, diff);
                max_ref = std::max(max_ref, ref);
                if (ref > 0.0)
                    max_rel = std::max(max_rel, diff / ref);
            }
        if (max_ref == 0.0 && max_abs > 0.0)
            max_rel = std::numeric_limits<double>::infinity();
        out.max_abs_error = max_abs;
        out.max_rel_error = max_rel;
        out.array_ratio = rx_slope_energy(cfg) / (2.0 * r0);
        return out;
    }

    cmat covariance(const cvec &w, const std::vector<cvec> &vs)
    {
        cmat r = w * w.adjoint();
        for (const cvec &v : vs)
            r += v * v.adjoint();
        return hermitian_part(r);
    }
}
