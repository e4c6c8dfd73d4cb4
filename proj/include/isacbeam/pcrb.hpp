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

#include "isacbeam/array_model.hpp"

namespace isacbeam::pcrb
{
    // Prior-averaged traces feeding the Fisher information, per unit data SNR.
    struct FimComponents
    {
        double g1 = 0.0;  // E[tr(M^H M R)]
        double g2 = 0.0;  // E[tr(M'^H M' R)]
        cdouble g3 = 0.0; // E[tr(M'^H M R)]
        double g4 = 0.0;  // E[||b'||^2 a^H R a]
        double eps = 0.0;
        double jp_theta = 0.0; // 1/sigma_theta^2 - eps
    };

    struct PriorFim
    {
        double jp_theta = 0.0;
        double eps = 0.0;
    };

    // Scale of the closed-form matrix Q_bar.
    enum class QbarScale
    {
        // rho0 = sum_{n=1}^{N_r} pi^2 Delta^2 (n-1)^2, used by the optimisation.
        Published,
        // rho = ||b'(theta)||^2 / (2 cos^2 theta) of the modelled receive array; this is the
        // small-sigma limit of the quadrature matrix behind pcrb_upper.
        ArrayConsistent
    };

    struct QbarMatrix
    {
        cmat matrix;
        double rho0 = 0.0;
        std::vector<double> weights; // rho0 p_k (cos 2 theta_k + 1)
    };

    struct PcrbBreakdown
    {
        double value = 0.0;
        double schur = 0.0; // inverse of value unless degenerate
        bool degenerate = false;
        FimComponents components;
    };

    struct QbarComponentCheck
    {
        cmat s_quadrature;
        cmat s_closed_form;
        double max_rel_error = 0.0;
        double max_abs_error = 0.0;
        // ||b'(theta)||^2 of the modelled receive array over the 2 rho0 cos^2(theta) weight used for S.
        double array_ratio = 0.0;
    };

    double rho0(const ArrayConfig &cfg, QbarScale scale = QbarScale::Published);

    // Throws InvalidInput when rx is not Hermitian PSD within 1e-10 (relative).
    void require_psd(const cmat &rx, const char *who);

    FimComponents fim_components(const cmat &rx, const LocationPrior &prior, const ArrayConfig &cfg);

    // Data FIM over (theta, beta_R, beta_I), real symmetric 3x3.
    Eigen::Matrix3d fim_data(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                             const ChannelParams &channels);

    // eps by adaptive Simpson; throws NumericalError on non-convergence.
    PriorFim fim_prior(const LocationPrior &prior);

    // `snapshots` multiplies the data FIM (independent echoes).
    PcrbBreakdown pcrb_exact_breakdown(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                                       const ChannelParams &channels, double snapshots = 1.0);
    double pcrb_exact(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                      const ChannelParams &channels);
    double pcrb_upper(const cmat &rx, cdouble beta, const LocationPrior &prior, const ArrayConfig &cfg,
                      const ChannelParams &channels);

    QbarMatrix q_bar(const LocationPrior &prior, const ArrayConfig &cfg, QbarScale scale = QbarScale::Published);

    double pcrb_closed_form(const cvec &w, const std::vector<cvec> &vs, double beta_abs_min, const QbarMatrix &qbar,
                            const LocationPrior &prior, const ChannelParams &channels);
    // Same value written in terms of the covariance: depends on tr(Q_bar R) only.
    double pcrb_closed_form_cov(const cmat &rx, double beta_abs_min, const QbarMatrix &qbar, const LocationPrior &prior,
                                const ChannelParams &channels);

    // Quadrature of the component matrix S(theta_k) against its small-sigma closed form.
    QbarComponentCheck validate_qbar_component(std::size_t k, const LocationPrior &prior, const ArrayConfig &cfg);

    // R_x = w w^H + sum v v^H.
    cmat covariance(const cvec &w, const std::vector<cvec> &vs);
}
