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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "isacbeam/beam_design.hpp"
#include "isacbeam/evaluation.hpp"
#include "isacbeam/presets.hpp"
#include "oracles.hpp"

using namespace isacbeam;
using Catch::Approx;

namespace
{
    design::GammaSearchConfig quick_search()
    {
        design::GammaSearchConfig gc;
        gc.grid_points = 16;
        gc.golden_iterations = 8;
        return gc;
    }

    long double norm2_ld(const cvec &h)
    {
        long double s = 0.0L;
        for (Eigen::Index i = 0; i < h.size(); ++i)
            s += static_cast<long double>(std::norm(h(i)));
        return s;
    }
}

TEST_CASE("inner problem has one row per eavesdropper angle plus three", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    const design::AssembledInner as = design::assemble_inner(1.0, sc);
    REQUIRE(as.problem.psd_blocks == std::vector<int>{8, 8});
    REQUIRE(as.problem.scalar_count == 1);
    REQUIRE(as.problem.constraints.size() == 7);
    for (int i = 0; i < 4; ++i)
        CHECK(as.problem.constraints[i].sense == sdp::Sense::LE);
    CHECK(as.problem.constraints[4].sense == sdp::Sense::EQ);
    CHECK(as.problem.constraints[5].sense == sdp::Sense::LE);
    CHECK(as.problem.constraints[6].sense == sdp::Sense::GE);

    const design::AssembledInner nv = design::assemble_inner(1.0, sc, false);
    REQUIRE(nv.problem.psd_blocks == std::vector<int>{8});
}

TEST_CASE("sensing coefficient from the raw scenario numbers", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    const long double bb = 0.1L * 0.0071L;
    const long double oracle = 1e-9L / (2.0L * bb * bb) * (1.0L / 2.68e-5L - 1.0L / (1e-2L * 1e-2L));
    CHECK(sc.sensing_coefficient == Approx(static_cast<double>(oracle)).epsilon(1e-12));
    CHECK(sc.sensing_coefficient == Approx(27.09).epsilon(1e-3));
    CHECK_FALSE(sc.sensing_vacuous);
}

TEST_CASE("threshold at the prior variance makes sensing vacuous", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 1e-4);
    CHECK(sc.sensing_vacuous);
    CHECK(std::abs(sc.sensing_coefficient) < 1e-9);
    CHECK(design::feasibility_probe(sc).feasible);
    CHECK_THROWS_AS(design::make_design_scenario(cfg, 0.0), InvalidInput);
    CHECK_THROWS_AS(design::make_design_scenario(cfg, -1e-5), InvalidInput);
    CHECK_THROWS_AS(design::assemble_inner(0.0, sc), InvalidInput);
}

TEST_CASE("vacuous sensing and slack caps reduce to maximum ratio transmission", "[design]")
{
    for (double loss : {30.0, 60.0})
    {
        const ScenarioConfig cfg = presets::paper_sec6(loss);
        const design::DesignScenario sc = design::make_design_scenario(cfg, 1e-4);
        const double gmax = design::default_gamma_max(sc);
        const design::InnerSolveResult r = design::solve_inner(gmax, sc);
        REQUIRE(r.status == sdp::Status::Optimal);
        const long double oracle = 0.1L * norm2_ld(cfg.channels.user_channel) / 1e-9L;
        CHECK(oracle::rel_err(r.f_gamma, static_cast<double>(oracle)) < 1e-6);
    }
}

TEST_CASE("inner optimum is nondecreasing in gamma", "[design][property]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    design::GammaSearchConfig gc;
    gc.grid_points = 20;
    const std::vector<double> grid = design::gamma_grid(sc, gc);
    REQUIRE(grid.size() == 20);
    const std::vector<design::GammaPoint> pts = design::evaluate_gamma_points(grid, sc, gc);
    for (std::size_t i = 0; i < pts.size(); ++i)
        REQUIRE(pts[i].status == sdp::Status::Optimal);
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].f_gamma >= pts[i - 1].f_gamma * (1.0 - 1e-6));
}

TEST_CASE("threshold below the probe limit is infeasible", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 1e-9);
    const design::FeasibilityProbe probe = design::feasibility_probe(sc);
    CHECK_FALSE(probe.feasible);
    CHECK(probe.required_rhs > probe.max_lhs);
    const design::InnerSolveResult r = design::solve_inner(1.0, sc);
    CHECK(r.status == sdp::Status::Infeasible);
    CHECK_THROWS_AS(design::search_gamma(sc, quick_search()), InfeasibleScenario);
}

TEST_CASE("inner optimum exhausts the power budget with positive multipliers", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    for (double gamma : {0.01, 1.0, 100.0, 1e4})
    {
        const design::InnerSolveResult r = design::solve_inner(gamma, sc);
        REQUIRE(r.status == sdp::Status::Optimal);
        const double tr = r.w_mat.trace().real() + r.v_mat.trace().real();
        CHECK(std::abs(tr - r.t * 0.1) <= 1e-7 * r.t * 0.1);
        CHECK(r.dual_positive);
        CHECK(r.lambda > 1e-10);
        CHECK(r.rho > 1e-10);
    }
}

TEST_CASE("rank-one reconstruction keeps value and constraints", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    for (double gamma : {0.1, 10.0, 1e3})
    {
        const design::InnerSolveResult r = design::solve_inner(gamma, sc);
        REQUIRE(r.status == sdp::Status::Optimal);
        const design::Reconstruction rec = design::reconstruct_rank_one(r, sc);
        CHECK(rec.report.ok);
        CHECK(rec.report.second_over_first <= design::rank_threshold);
        CHECK(rec.report.objective_rel_error <= 1e-7);
        CHECK(rec.report.max_constraint_rel() <= 1e-7);
        CHECK(rec.report.trace_total_error <= 1e-10 * (1.0 + r.w_mat.trace().real() + r.v_mat.trace().real()));
        CHECK(rec.report.v_rank <= sc.max_an_beams());

        // W_bar is the projection of W* on its own range when W* is already rank one.
        Eigen::SelfAdjointEigenSolver<cmat> es(r.w_mat);
        const double l1 = es.eigenvalues()(7), l2 = std::max(0.0, es.eigenvalues()(6));
        if (l2 <= 1e-9 * l1)
            CHECK((rec.w_bar - r.w_mat).norm() <= 1e-6 * r.w_mat.norm());

        const design::Beams b = design::extract_beams(rec.w_bar, rec.v_bar, rec.t_bar, sc.max_an_beams());
        const cmat ww = b.w * b.w.adjoint();
        CHECK((ww - rec.w_bar / rec.t_bar).norm() <= 1e-8 * (1.0 + ww.norm()));
        cmat vv = cmat::Zero(8, 8);
        for (const cvec &v : b.an)
            vv += v * v.adjoint();
        CHECK((vv - rec.v_bar / rec.t_bar).norm() <= 1e-8 * (1.0 + ww.norm()));

        const double sinr = eval::sinr_user(b.w, b.an, cfg.channels.user_channel, cfg.channels.noise_user_w);
        CHECK(std::abs(sinr - r.f_gamma) <= 1e-6 * r.f_gamma);
    }
}

TEST_CASE("beam extraction factors a synthetic rank-one matrix", "[design]")
{
    std::mt19937_64 rng(17);
    const cvec u = oracle::random_vector(6, 1.0, rng);
    const double p = 0.37;
    const cmat w_bar = 2.0 * p * u * u.adjoint();
    const design::Beams b = design::extract_beams(w_bar, cmat::Zero(6, 6), 2.0, 4);
    CHECK(b.an.empty());
    CHECK(b.w.squaredNorm() == Approx(p).epsilon(1e-12));
    Eigen::Index imax = 0;
    b.w.cwiseAbs().maxCoeff(&imax);
    CHECK(std::abs(b.w(imax).imag()) <= 1e-14);
    CHECK(b.w(imax).real() > 0.0);
    const cdouble align = u.dot(b.w);
    CHECK(std::abs(align) == Approx(std::sqrt(p)).epsilon(1e-12));
    CHECK_THROWS_AS(design::extract_beams(w_bar, w_bar, 0.0, 4), InvalidInput);
}

TEST_CASE("searched rate dominates every optimal grid point", "[design][property]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    const design::BeamformingSolution sol = design::search_gamma(sc, quick_search());
    REQUIRE(sol.feasible);
    for (const design::GammaPoint &p : sol.evaluated)
        if (p.status == sdp::Status::Optimal)
            CHECK(sol.secrecy_rate >= std::max(0.0, p.g) - 1e-12);
    CHECK(sol.power_used <= 0.1 * (1.0 + 1e-7));
    CHECK(sol.pcrb_value <= 2.68e-5 * (1.0 + 1e-6));
    CHECK(static_cast<int>(sol.an_beams.size()) <= sc.max_an_beams());
    CHECK(std::abs(sol.realized_rate - sol.secrecy_rate) <= 1e-6 * (1.0 + sol.secrecy_rate));
    REQUIRE(sol.kkt.has_value());
    CHECK(sol.kkt->multipliers_nonnegative);
}

TEST_CASE("tighter sensing never raises the secrecy rate", "[design][property]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    double prev = -1.0;
    for (double gamma_thr : {1e-5, 2.68e-5, 9e-5})
    {
        const design::DesignScenario sc = design::make_design_scenario(cfg, gamma_thr);
        const double rate = design::search_gamma(sc, quick_search()).secrecy_rate;
        if (prev >= 0.0)
            CHECK(rate >= prev - 1e-6 * (1.0 + prev));
        prev = rate;
    }
}

TEST_CASE("negligible eavesdropper gain recovers the unrestricted MRT rate", "[design]")
{
    ScenarioConfig cfg = presets::paper_sec6(30.0);
    cfg.channels.noise_eve_w = 1e4; // eavesdropper SINR below 1e-5 for every beam within budget
    const design::DesignScenario sc = design::make_design_scenario(cfg, 1e-4);
    design::GammaSearchConfig gc = quick_search();
    gc.gamma_max = 1e3;
    const design::BeamformingSolution sol = design::search_gamma(sc, gc);
    const long double f = 0.1L * norm2_ld(cfg.channels.user_channel) / 1e-9L;
    const double oracle = static_cast<double>(std::log2(1.0L + f));
    CHECK(std::abs(sol.secrecy_rate - oracle) <= 1e-3);
}

TEST_CASE("maximum ratio transmission benchmark", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(30.0);
    const design::DesignScenario loose = design::make_design_scenario(cfg, 1e-4);
    const design::BeamformingSolution m = design::benchmark_mrt(loose);
    CHECK(m.w.squaredNorm() == Approx(0.1).epsilon(1e-12));
    CHECK(m.an_beams.empty());
    CHECK(m.feasible);

    const design::DesignScenario strict = design::make_design_scenario(cfg, 1e-5);
    CHECK_FALSE(design::benchmark_mrt(strict).feasible);
}

TEST_CASE("no artificial noise benchmark", "[design]")
{
    const ScenarioConfig cfg = presets::paper_sec6(60.0);
    const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
    const design::BeamformingSolution n = design::benchmark_no_an(sc, quick_search());
    CHECK(n.an_beams.empty());
    CHECK(n.power_used == Approx(n.w.squaredNorm()).epsilon(1e-14));
    CHECK(n.power_used <= 0.1 * (1.0 + 1e-7));
    CHECK(n.secrecy_rate >= 0.0);
    CHECK(n.secrecy_rate <= 1e-6);
}
