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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "isacbeam/beam_design.hpp"
#include "isacbeam/cli_runner.hpp"
#include "isacbeam/evaluation.hpp"
#include "isacbeam/pcrb.hpp"
#include "isacbeam/presets.hpp"
#include "isacbeam/sdp_solver.hpp"

using namespace isacbeam;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

    cmat random_psd(int n, int rank, double power, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> nd(0.0, 1.0);
        cmat g(n, rank);
        for (int j = 0; j < rank; ++j)
            for (int i = 0; i < n; ++i)
            {
                const double re = nd(rng);
                g(i, j) = cdouble(re, nd(rng));
            }
        cmat r = g * g.adjoint();
        r = 0.5 * (r + r.adjoint());
        return r * (power / r.trace().real());
    }

    cvec random_vector(int n, double norm, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> nd(0.0, 1.0);
        cvec v(n);
        for (int i = 0; i < n; ++i)
        {
            const double re = nd(rng);
            v(i) = cdouble(re, nd(rng));
        }
        return v * (norm / v.norm());
    }

    double dbm(double w) { return 10.0 * std::log10(w * 1e3); }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    cdouble echo_gain(const ScenarioConfig &cfg) { return cdouble(cfg.channels.beta_min_abs(), 0.0); }

    // 1. pcrb_exact <= pcrb_upper for random covariances.
    Outcome bound_chain()
    {
        const auto t0 = Clock::now();
        const ScenarioConfig cfg = presets::paper_sec6(30.0);
        std::mt19937_64 rng(101);
        int violations = 0;
        double worst = -1.0;
        for (int trial = 0; trial < 200; ++trial)
        {
            const cmat rx = random_psd(8, 1 + trial % 8, cfg.channels.power_budget_w, rng);
            const double exact = pcrb::pcrb_exact(rx, echo_gain(cfg), cfg.prior, cfg.array, cfg.channels);
            const double upper = pcrb::pcrb_upper(rx, echo_gain(cfg), cfg.prior, cfg.array, cfg.channels);
            const double excess = (exact - upper) / upper;
            worst = std::max(worst, excess);
            if (excess > 1e-12)
                ++violations;
        }
        const double t = seconds_since(t0);
        return {violations == 0 && t < 30.0,
                fmt::format("violations {} of 200, max (exact-upper)/upper {:.3g}, {:.1f} s", violations, worst, t)};
    }

    // 2. Closed form against the quadrature upper bound.
    Outcome closed_form()
    {
        std::mt19937_64 rng(202);
        double worst[2] = {0.0, 0.0};
        const double sigmas[2] = {1e-3, 1e-2};
        for (int s = 0; s < 2; ++s)
        {
            const ScenarioConfig cfg = presets::paper_sec6(30.0, sigmas[s]);
            const pcrb::QbarMatrix q = pcrb::q_bar(cfg.prior, cfg.array, pcrb::QbarScale::ArrayConsistent);
            for (int trial = 0; trial < 100; ++trial)
            {
                const int n_an = trial % 5;
                const double share = n_an ? 0.5 : 1.0;
                const cvec w = random_vector(8, std::sqrt(share * cfg.channels.power_budget_w), rng);
                std::vector<cvec> vs;
                for (int i = 0; i < n_an; ++i)
                    vs.push_back(random_vector(8, std::sqrt((1.0 - share) * cfg.channels.power_budget_w / n_an), rng));
                const double cf =
                    pcrb::pcrb_closed_form(w, vs, cfg.channels.beta_min_abs(), q, cfg.prior, cfg.channels);
                const double up = pcrb::pcrb_upper(pcrb::covariance(w, vs), echo_gain(cfg), cfg.prior, cfg.array,
                                                   cfg.channels);
                worst[s] = std::max(worst[s], std::abs(cf - up) / up);
            }
        }
        return {worst[0] <= 1e-3 && worst[1] <= 2e-2,
                fmt::format("max rel err {:.3g} at sigma 1e-3 (limit 1e-3), {:.3g} at sigma 1e-2 (limit 2e-2)",
                            worst[0], worst[1])};
    }

    // 3. Quadrature component matrices against their small-sigma closed forms.
    Outcome component_check()
    {
        const ScenarioConfig cfg = presets::paper_sec6(30.0, 1e-3);
        double worst = 0.0;
        for (std::size_t k = 0; k < cfg.prior.size(); ++k)
            worst = std::max(worst, pcrb::validate_qbar_component(k, cfg.prior, cfg.array).max_rel_error);
        return {worst <= 1e-3, fmt::format("max elementwise rel err {:.3g} over 4 angles (limit 1e-3)", worst)};
    }

    // 4. Largest-eigenvalue instances for the SDP solver.
    Outcome solver_suite()
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(404);
        std::normal_distribution<double> nd(0.0, 1.0);
        double worst_err = 0.0, worst_gap = 0.0;
        int optimal = 0;
        for (int trial = 0; trial < 50; ++trial)
        {
            const int n = 2 + trial % 9;
            cmat g(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                {
                    const double re = nd(rng);
                    g(i, j) = cdouble(re, nd(rng));
                }
            const cmat c = 0.5 * (g + g.adjoint());
            sdp::SdpProblem p;
            p.psd_blocks = {n};
            p.objective_blocks = {c};
            p.constraints.push_back({{cmat::Identity(n, n)}, rvec(), 1.0, sdp::Sense::EQ});
            const sdp::SdpSolution s = sdp::solve(p);
            Eigen::SelfAdjointEigenSolver<cmat> es(c, Eigen::EigenvaluesOnly);
            const double lmax = es.eigenvalues().maxCoeff();
            if (s.status == sdp::Status::Optimal)
            {
                ++optimal;
                worst_gap = std::max(worst_gap, s.gap);
            }
            worst_err = std::max(worst_err, s.status == sdp::Status::Optimal ? std::abs(s.objective - lmax) : INFINITY);
        }
        const double t = seconds_since(t0);
        return {optimal == 50 && worst_err <= 1e-7 && worst_gap <= 1e-8 && t < 10.0,
                fmt::format("{} of 50 optimal, max |value - lambda_max| {:.3g}, max gap {:.3g}, {:.2f} s", optimal,
                            worst_err, worst_gap, t)};
    }

    // 5 and 6 share one 64-point sweep.
    struct SweepChecks
    {
        Outcome certificates;
        Outcome reconstruction;
    };

    SweepChecks sweep_checks()
    {
        const ScenarioConfig cfg = presets::paper_sec6(30.0);
        const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
        const design::GammaSearchConfig gc;
        const std::vector<double> grid = design::gamma_grid(sc, gc);
        int checked = 0, cert_bad = 0, rec_bad = 0, not_optimal = 0;
        double min_lambda = INFINITY, min_rho = INFINITY, max_s = -INFINITY, max_b = -INFINITY, max_xi = -INFINITY;
        double max_rank = 0.0, max_obj = 0.0, max_con = 0.0;
        int max_vrank = 0;
        std::string first_failure;
        for (double gamma : grid)
        {
            const design::InnerSolveResult r = design::solve_inner(gamma, sc);
            if (r.status != sdp::Status::Optimal)
            {
                ++not_optimal;
                continue;
            }
            if (!(r.f_gamma > 0.0))
                continue;
            ++checked;
            const design::KktReport k = eval::kkt_report(r, sc);
            min_lambda = std::min(min_lambda, r.lambda);
            min_rho = std::min(min_rho, r.rho);
            max_s = std::max(max_s, k.lambda_max_s);
            max_b = std::max(max_b, k.lambda_max_b);
            max_xi = std::max(max_xi, k.xi);
            if (!(r.lambda > 1e-10 && r.rho > 1e-10 && k.lambda_max_s <= 1e-7 && k.lambda_max_b <= 1e-7 &&
                  k.xi <= 1e-7))
                ++cert_bad;
            try
            {
                const design::Reconstruction rec = design::reconstruct_rank_one(r, sc);
                const design::ReconstructionReport &q = rec.report;
                max_rank = std::max(max_rank, q.second_over_first);
                max_obj = std::max(max_obj, q.objective_rel_error);
                max_con = std::max(max_con, q.max_constraint_rel());
                max_vrank = std::max(max_vrank, q.v_rank);
                if (!(q.second_over_first <= 1e-7 && q.objective_rel_error <= 1e-7 && q.max_constraint_rel() <= 1e-7 &&
                      q.v_rank <= 4))
                    ++rec_bad;
            }
            catch (const design::CertificateFailure &e)
            {
                ++rec_bad;
                if (first_failure.empty())
                    first_failure = fmt::format(", first failure at gamma {:.4g}: {}", gamma, e.what());
            }
        }
        SweepChecks out;
        out.certificates = {
            cert_bad == 0 && checked > 0,
            fmt::format("{} solves checked ({} not optimal), min lambda {:.3g}, min rho {:.3g}, max lambda_max(S) "
                        "{:.3g}, max lambda_max(B) {:.3g}, max xi {:.3g}",
                        checked, not_optimal, min_lambda, min_rho, max_s, max_b, max_xi)};
        out.reconstruction = {rec_bad == 0 && checked > 0,
                              fmt::format("{} failures of {}, max second/first {:.3g}, max objective rel err {:.3g}, "
                                          "max constraint rel {:.3g}, max rank(V) {}{}",
                                          rec_bad, checked, max_rank, max_obj, max_con, max_vrank, first_failure)};
        return out;
    }

    // 7. Rate-versus-gamma curves at 30 dB. Also hands the middle solution to criterion 10.
    Outcome gamma_trend(design::BeamformingSolution &reference)
    {
        const auto t0 = Clock::now();
        const ScenarioConfig cfg = presets::paper_sec6(30.0);
        const design::GammaSearchConfig gc;
        std::vector<double> rates;
        std::string detail;
        bool unimodal = true;
        for (double thr : {1e-5, 2.68e-5, 5e-5})
        {
            const design::DesignScenario sc = design::make_design_scenario(cfg, thr);
            const design::BeamformingSolution sol = design::search_gamma(sc, gc);
            if (thr == 2.68e-5)
                reference = sol;
            int changes = 0, prev_sign = 0;
            for (int i = 1; i < gc.grid_points; ++i)
            {
                const double d = sol.evaluated[i].g - sol.evaluated[i - 1].g;
                const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
                if (sign != 0 && prev_sign != 0 && sign != prev_sign)
                    ++changes;
                if (sign != 0)
                    prev_sign = sign;
            }
            unimodal = unimodal && changes == 1;
            rates.push_back(sol.secrecy_rate);
            detail += fmt::format("Gamma {:.3g}: rate {:.6g}, {} sign change(s); ", thr, sol.secrecy_rate, changes);
        }
        const bool monotone = rates[1] >= rates[0] && rates[2] >= rates[1];
        const double t = seconds_since(t0);
        return {unimodal && monotone && t < 300.0,
                detail + fmt::format("rate nondecreasing in Gamma: {}, {:.1f} s", monotone ? "yes" : "no", t)};
    }

    // 8. Beampattern of the 60 dB design.
    Outcome beampattern_trend()
    {
        const ScenarioConfig cfg = presets::paper_sec6(60.0);
        const design::DesignScenario sc = design::make_design_scenario(cfg, 2.68e-5);
        const design::BeamformingSolution sol = design::search_gamma(sc);
        std::vector<double> theta;
        for (int d = -90; d <= 90; ++d)
            theta.push_back(deg_to_rad(d));
        const std::vector<eval::BeampatternRow> bp = eval::beampattern(sol.w, sol.an_beams, theta, cfg.array);
        auto row = [&](int deg) { return bp[static_cast<std::size_t>(deg + 90)]; };

        const double margin = dbm(row(-10).info_power) - dbm(row(-10).an_power);
        bool user_ok = margin >= 3.0;
        bool an_ok = true, min_ok = true;
        std::string detail = fmt::format("info - AN at -10 deg {:.2f} dB; ", margin);
        for (int deg : {-55, -35, 45, 65})
        {
            const double info = row(deg).info_power, an = row(deg).an_power;
            an_ok = an_ok && an > info;
            bool local_min = true;
            for (int off = -5; off <= 5; ++off)
                if (off != 0 && row(deg + off).info_power < info)
                    local_min = false;
            min_ok = min_ok && local_min;
            detail += fmt::format("{} deg: AN - info {:.1f} dB, local min {}; ", deg, dbm(an) - dbm(info),
                                  local_min ? "yes" : "no");
        }
        detail += fmt::format("{} AN beams", sol.an_beams.size());
        return {user_ok && an_ok && min_ok, detail};
    }

    // 9. Proposed, MRT and no-AN schemes over the Gamma grid at 60 dB.
    Outcome tradeoff_trend()
    {
        const ScenarioConfig cfg = presets::paper_sec6(60.0);
        const std::vector<double> grid = {1e-5, 1.5e-5, 2e-5, 2.68e-5, 3.5e-5, 4.5e-5, 5.5e-5, 6.5e-5, 7.5e-5, 9e-5};
        std::vector<double> proposed;
        bool benchmarks_zero = true;
        int mrt_feasible = 0, noan_feasible = 0;
        double max_bench = 0.0;
        bool mrt_strict_infeasible = false;
        for (double thr : grid)
        {
            const design::DesignScenario sc = design::make_design_scenario(cfg, thr);
            proposed.push_back(design::search_gamma(sc).secrecy_rate);
            const design::BeamformingSolution m = design::benchmark_mrt(sc);
            const design::BeamformingSolution n = design::benchmark_no_an(sc);
            if (thr == grid.front())
                mrt_strict_infeasible = !m.feasible;
            for (const design::BeamformingSolution *b : {&m, &n})
                if (b->feasible)
                {
                    max_bench = std::max(max_bench, b->secrecy_rate);
                    benchmarks_zero = benchmarks_zero && b->secrecy_rate == 0.0;
                }
            mrt_feasible += m.feasible ? 1 : 0;
            noan_feasible += n.feasible ? 1 : 0;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < proposed.size(); ++i)
            monotone = monotone && proposed[i] >= proposed[i - 1];
        return {monotone && mrt_strict_infeasible && benchmarks_zero,
                fmt::format("proposed {:.4g} .. {:.4g} nondecreasing: {}; MRT infeasible at Gamma 1e-5: {}; MRT "
                            "feasible at {} points, no-AN at {}, max benchmark rate {:.3g}",
                            proposed.front(), proposed.back(), monotone ? "yes" : "no",
                            mrt_strict_infeasible ? "yes" : "no", mrt_feasible, noan_feasible, max_bench)};
    }

    // 10. Monte-Carlo MAP error against the exact bound.
    Outcome mc_sanity(const design::BeamformingSolution &sol)
    {
        const auto t0 = Clock::now();
        const ScenarioConfig cfg = presets::paper_sec6(30.0);
        const eval::MseResult r =
            eval::mc_mse_oracle(sol.w, sol.an_beams, cfg, echo_gain(cfg), 2000, 64, 20261014);
        const double t = seconds_since(t0);
        const double ratio = r.empirical_mse / r.pcrb_exact;
        return {ratio >= 0.9 && t < 600.0,
                fmt::format("empirical MSE {:.4g}, exact bound {:.4g}, ratio {:.3f}, {:.1f} s", r.empirical_mse,
                            r.pcrb_exact, ratio, t)};
    }

    // 11. Two runs of the same configs produce identical bytes.
    Outcome determinism()
    {
        const fs::path base = fs::temp_directory_path() / "isacbeam_acceptance";
        fs::remove_all(base);
        std::string detail;
        bool same = true;
        for (const char *name : {"pcrb_validate.json", "beampattern.json"})
        {
            std::string bytes[2];
            for (int run = 0; run < 2; ++run)
            {
                cli::LoadOptions opt;
                opt.output_override = base / fmt::format("run{}", run);
                const cli::ExperimentConfig cfg = cli::load_config(fs::path(ISACBEAM_CONFIG_DIR) / name, opt);
                bytes[run] = slurp(cli::run_experiment(cfg).csv_path);
            }
            const bool eq = !bytes[0].empty() && bytes[0] == bytes[1];
            same = same && eq;
            detail += fmt::format("{}: {} bytes, {}; ", name, bytes[0].size(), eq ? "identical" : "different");
        }
        fs::remove_all(base);
        return {same, detail};
    }

    int failures = 0;

    void report(int id, const std::function<Outcome()> &f)
    {
        Outcome o;
        try
        {
            o = f();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass)
            ++failures;
        std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
}

int main()
{
    report(1, bound_chain);
    report(2, closed_form);
    report(3, component_check);
    report(4, solver_suite);
    SweepChecks sweep;
    try
    {
        sweep = sweep_checks();
    }
    catch (const std::exception &e)
    {
        sweep.certificates = sweep.reconstruction = {false, std::string("exception: ") + e.what()};
    }
    report(5, [&] { return sweep.certificates; });
    report(6, [&] { return sweep.reconstruction; });
    design::BeamformingSolution reference;
    report(7, [&] { return gamma_trend(reference); });
    report(8, beampattern_trend);
    report(9, tradeoff_trend);
    report(10, [&] {
        if (reference.w.size() == 0)
            return Outcome{false, "no optimized beams from criterion 7"};
        return mc_sanity(reference);
    });
    report(11, determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
