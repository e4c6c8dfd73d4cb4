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

#include <optional>
#include <string>
#include <vector>

#include "isacbeam/array_model.hpp"
#include "isacbeam/pcrb.hpp"
#include "isacbeam/sdp_solver.hpp"

namespace isacbeam::design
{
    // Eigenvalues below this fraction of the largest are treated as zero in every rank decision.
    inline constexpr double rank_threshold = 1e-9;

    // Immutable data shared by all inner solves of one search.
    struct DesignScenario
    {
        ScenarioConfig config;
        double pcrb_threshold = 0.0; // Gamma, rad^2
        pcrb::QbarMatrix qbar;
        cmat h_outer;                     // H = h h^H
        std::vector<cmat> a_outer;        // A_k = a(theta_k) a(theta_k)^H
        double sensing_coefficient = 0.0; // sigma_R^2 / (2 |beta_bar|^2) (1/Gamma - 1/sigma_theta^2)
        bool sensing_vacuous = false;     // 1/Gamma <= 1/sigma_theta^2

        int n_tx() const { return config.array.n_tx; }
        std::size_t k() const { return config.prior.size(); }
        int max_an_beams() const { return static_cast<int>(std::min<std::size_t>(k(), n_tx())); }
    };

    DesignScenario make_design_scenario(const ScenarioConfig &config, double pcrb_threshold,
                                        pcrb::QbarScale scale = pcrb::QbarScale::Published);

    struct InnerOptions
    {
        sdp::Tolerances tol{1e-8, 1e-8, 200};
        bool with_an = true; // false drops the V block (no artificial noise)
    };

    struct AssembledInner
    {
        sdp::SdpProblem problem;
        // Variables are solved in units W = s W_hat, V = s V_hat, t = t0 t_hat.
        double t0 = 1.0;
        double s = 1.0;
        bool sensing_vacuous = false;
    };

    // Rows: one eavesdropper-SINR cap per candidate angle (LE), the normalisation (EQ), the power
    // budget (LE) and the sensing constraint (GE), in that order.
    AssembledInner assemble_inner(double gamma, const DesignScenario &sc, bool with_an = true);

    struct InnerSolveResult
    {
        double gamma = 0.0;
        cmat w_mat;
        cmat v_mat;
        double t = 0.0;
        double f_gamma = 0.0; // tr(H W)
        std::vector<double> beta;
        double lambda = 0.0;
        double rho = 0.0;
        double psi = 0.0;
        sdp::Status status = sdp::Status::NumericalFailure;
        bool with_an = true;
        bool sensing_vacuous = false;
        bool dual_positive = false; // lambda > 1e-10 and rho > 1e-10
        sdp::SdpSolution raw;
    };

    InnerSolveResult solve_inner(double gamma, const DesignScenario &sc, const InnerOptions &opt = {});

    struct ReconstructionReport
    {
        int null_dim = 0;
        double second_over_first = 0.0; // of W_bar
        double objective_rel_error = 0.0;
        // Relative violations of: eavesdropper caps (max over k), normalisation, power, sensing,
        // and the negative part of the smallest eigenvalue of W_bar and V_bar.
        double eve_rel = 0.0, norm_rel = 0.0, power_rel = 0.0, sensing_rel = 0.0, psd_rel = 0.0;
        double trace_total_error = 0.0;
        int v_rank = 0;
        bool ok = false;
        std::string failure;

        double max_constraint_rel() const;
    };

    struct Reconstruction
    {
        cmat w_bar;
        cmat v_bar;
        double t_bar = 0.0;
        ReconstructionReport report;
    };

    class CertificateFailure : public NumericalError
    {
    public:
        CertificateFailure(const std::string &what, ReconstructionReport rep)
            : NumericalError(what), report(std::move(rep))
        {
        }
        ReconstructionReport report;
    };

    inline constexpr double reconstruction_tol = 1e-7;

    // Throws CertificateFailure when any check exceeds reconstruction_tol.
    Reconstruction reconstruct_rank_one(const InnerSolveResult &result, const DesignScenario &sc);

    struct Beams
    {
        cvec w;
        std::vector<cvec> an;
    };

    // Global phase: largest-magnitude entry of every beam made real positive.
    Beams extract_beams(const cmat &w_bar, const cmat &v_bar, double t_bar, int max_an_beams);

    struct KktReport
    {
        cmat s_mat, b_mat;
        double lambda_max_s = 0.0;
        double lambda_max_b = 0.0;
        double xi = 0.0;
        double sw_rel = 0.0; // ||S W||_F / (||S|| ||W||)
        double bv_rel = 0.0;
        double lambda = 0.0, rho = 0.0, psi = 0.0;
        std::vector<double> beta;
        bool multipliers_nonnegative = true;
    };

    struct GammaSearchConfig
    {
        double gamma_min = 1e-4;
        double gamma_max = 0.0; // <= 0 selects P N_t (beta0/r^2) / sigma_E^2
        int grid_points = 64;
        int golden_iterations = 20;
        ExecutionPolicy policy = ExecutionPolicy::Parallel;
        InnerOptions inner;
    };

    double default_gamma_max(const DesignScenario &sc);
    std::vector<double> gamma_grid(const DesignScenario &sc, const GammaSearchConfig &cfg);

    struct GammaPoint
    {
        double gamma = 0.0;
        double f_gamma = 0.0;
        double g = 0.0; // log2((1 + f) / (1 + gamma)), -inf when not solved
        sdp::Status status = sdp::Status::NumericalFailure;
        bool refined = false;
    };

    // Inner solves over a list of gamma values; results keep the input order for any policy.
    std::vector<GammaPoint> evaluate_gamma_points(const std::vector<double> &gammas, const DesignScenario &sc,
                                                  const GammaSearchConfig &cfg);

    struct BeamformingSolution
    {
        cvec w;
        std::vector<cvec> an_beams;
        double gamma_star = 0.0;
        double secrecy_rate = 0.0;  // bits/s/Hz
        double realized_rate = 0.0; // worst-case rate recomputed from the beams
        double pcrb_value = 0.0;    // closed form at |beta_bar|
        double power_used = 0.0;
        bool feasible = false;
        bool suboptimal_fallback = false;
        std::vector<GammaPoint> evaluated; // grid first, then refinement points
        std::optional<ReconstructionReport> reconstruction;
        std::optional<KktReport> kkt;
    };

    BeamformingSolution search_gamma(const DesignScenario &sc, const GammaSearchConfig &cfg = {});

    struct FeasibilityProbe
    {
        bool feasible = false;
        double max_lhs = 0.0;      // P lambda_max(Q_bar)
        double required_rhs = 0.0; // sensing coefficient
    };

    FeasibilityProbe feasibility_probe(const DesignScenario &sc);

    BeamformingSolution benchmark_mrt(const DesignScenario &sc);
    BeamformingSolution benchmark_no_an(const DesignScenario &sc, GammaSearchConfig cfg = {});
}
