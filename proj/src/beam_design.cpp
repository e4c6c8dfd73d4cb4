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


#include "isacbeam/beam_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "isacbeam/evaluation.hpp"

namespace isacbeam::design
{
    namespace
    {
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();

        double secrecy_objective(double f, double gamma) { return std::log2((1.0 + f) / (1.0 + gamma)); }

        void fix_phase(cvec &v)
        {
            if (v.size() == 0)
                return;
            Eigen::Index idx = 0;
            v.cwiseAbs().maxCoeff(&idx);
            const double mag = std::abs(v(idx));
            if (mag > 0.0)
                v *= std::conj(v(idx)) / mag;
        }

        double rel_violation(double excess, double scale)
        {
            if (excess <= 0.0)
                return 0.0;
            return scale > 0.0 ? excess / scale : excess;
        }

        struct Evaluated
        {
            GammaPoint point;
            InnerSolveResult result;
        };

        Evaluated evaluate_one(double gamma, const DesignScenario &sc, const InnerOptions &opt)
        {
            Evaluated e;
            e.point.gamma = gamma;
            e.point.g = neg_inf;
            try
            {
                e.result = solve_inner(gamma, sc, opt);
                e.point.status = e.result.status;
                if (e.result.status == sdp::Status::Optimal)
                {
                    e.point.f_gamma = e.result.f_gamma;
                    e.point.g = secrecy_objective(e.result.f_gamma, gamma);
                }
            }
            catch (const NumericalError &)
            {
                e.point.status = sdp::Status::NumericalFailure;
            }
            return e;
        }

        std::vector<Evaluated> evaluate_many(const std::vector<double> &gammas, const DesignScenario &sc,
                                             const GammaSearchConfig &cfg)
        {
            std::vector<Evaluated> out(gammas.size());
            const long n = static_cast<long>(gammas.size());
            if (cfg.policy == ExecutionPolicy::Parallel)
            {
#pragma omp parallel for schedule(dynamic, 1)
                for (long i = 0; i < n; ++i)
                    out[i] = evaluate_one(gammas[i], sc, cfg.inner);
            }
            else
            {
                for (long i = 0; i < n; ++i)
                    out[i] = evaluate_one(gammas[i], sc, cfg.inner);
            }
            return out;
        }

        // Grid evaluation followed by golden-section refinement in log(gamma) around the grid argmax.
        std::vector<Evaluated> run_search(const DesignScenario &sc, const GammaSearchConfig &cfg)
        {
            const std::vector<double> grid = gamma_grid(sc, cfg);
            std::vector<Evaluated> all = evaluate_many(grid, sc, cfg);

            int best = -1;
            for (int i = 0; i < static_cast<int>(all.size()); ++i)
                if (all[i].point.status == sdp::Status::Optimal && (best < 0 || all[i].point.g > all[best].point.g))
                    best = i;
            if (best < 0)
            {
                const FeasibilityProbe probe = feasibility_probe(sc);
                std::ostringstream os;
                os << "no gamma grid point admits a solution (sensing probe: available " << probe.max_lhs
                   << ", required " << probe.required_rhs << ")";
                throw InfeasibleScenario(os.str());
            }
            if (cfg.golden_iterations <= 0 || grid.size() < 2)
                return all;

            const int last = static_cast<int>(grid.size()) - 1;
            double lo = std::log(grid[std::max(0, best - 1)]);
            double hi = std::log(grid[std::min(last, best + 1)]);
            auto probe_at = [&](double lg) {
                Evaluated e = evaluate_one(std::exp(lg), sc, cfg.inner);
                e.point.refined = true;
                all.push_back(e);
                return all.back().point.g;
            };
            const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - inv_phi * (hi - lo);
            double x2 = lo + inv_phi * (hi - lo);
            double f1 = probe_at(x1);
            double f2 = probe_at(x2);
            for (int it = 2; it < cfg.golden_iterations; ++it)
            {
                if (f1 >= f2)
                {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = probe_at(x1);
                }
                else
                {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = probe_at(x2);
                }
            }
            return all;
        }

        std::size_t best_index(const std::vector<Evaluated> &all)
        {
            std::size_t best = 0;
            bool found = false;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (all[i].point.status == sdp::Status::Optimal && (!found || all[i].point.g > all[best].point.g))
                {
                    best = i;
                    found = true;
                }
            return best;
        }

        void finish_solution(BeamformingSolution &out, const DesignScenario &sc)
        {
            const eval::SecrecyReport rep = eval::secrecy_report(out.w, out.an_beams, sc.config);
            out.realized_rate = rep.worst_case_rate;
            out.pcrb_value = pcrb::pcrb_closed_form(out.w, out.an_beams, sc.config.channels.beta_min_abs(), sc.qbar,
                                                    sc.config.prior, sc.config.channels);
            out.power_used = out.w.squaredNorm();
            for (const cvec &v : out.an_beams)
                out.power_used += v.squaredNorm();
        }
    }

    DesignScenario make_design_scenario(const ScenarioConfig &config, double pcrb_threshold, pcrb::QbarScale scale)
    {
        config.validate();
        if (!(pcrb_threshold > 0.0) || !std::isfinite(pcrb_threshold))
            throw InvalidInput("design: the sensing threshold Gamma must be positive");
        DesignScenario sc;
        sc.config = config;
        sc.pcrb_threshold = pcrb_threshold;
        sc.qbar = pcrb::q_bar(config.prior, config.array, scale);
        const cvec &h = config.channels.user_channel;
        sc.h_outer = h * h.adjoint();
        for (double th : config.prior.angles_rad)
        {
            const cvec a = steering_tx(th, config.array);
            sc.a_outer.push_back(a * a.adjoint());
        }
        const double inv_prior = 1.0 / (config.prior.sigma_theta * config.prior.sigma_theta);
        const double bb = config.channels.beta_min_abs();
        sc.sensing_coefficient =
            config.channels.noise_radar_w / (2.0 * bb * bb) * (1.0 / pcrb_threshold - inv_prior);
        sc.sensing_vacuous = !(1.0 / pcrb_threshold > inv_prior);
        return sc;
    }

    AssembledInner assemble_inner(double gamma, const DesignScenario &sc, bool with_an)
    {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw InvalidInput("assemble_inner: gamma must be positive");
        const ChannelParams &ch = sc.config.channels;
        const int n = sc.n_tx();
        const cmat eye = cmat::Identity(n, n);

        AssembledInner out;
        out.t0 = 1.0 / ch.noise_user_w;
        out.s = out.t0 * ch.power_budget_w;
        out.sensing_vacuous = sc.sensing_vacuous;
        const double t0 = out.t0, s = out.s;
        const double e = ch.eve_noise_referred();

        sdp::SdpProblem &p = out.problem;
        p.psd_blocks = with_an ? std::vector<int>{n, n} : std::vector<int>{n};
        p.scalar_count = 1;
        p.objective_blocks.push_back(s * sc.h_outer);
        if (with_an)
            p.objective_blocks.push_back(cmat::Zero(n, n));
        p.objective_scalars = rvec::Zero(1);

        auto row = [&](const cmat &cw, const cmat &cv, double ct, double rhs, sdp::Sense sense) {
            sdp::Constraint c;
            c.blocks.push_back(cw);
            if (with_an)
                c.blocks.push_back(cv);
            c.scalars = rvec::Constant(1, ct);
            c.rhs = rhs;
            c.sense = sense;
            p.constraints.push_back(std::move(c));
        };
        const cmat zero = cmat::Zero(n, n);
        for (const cmat &a : sc.a_outer)
            row(s * a, -gamma * s * a, -gamma * t0 * e, 0.0, sdp::Sense::LE);
        row(zero, s * sc.h_outer, t0 * ch.noise_user_w, 1.0, sdp::Sense::EQ);
        row(s * eye, s * eye, -t0 * ch.power_budget_w, 0.0, sdp::Sense::LE);
        row(s * sc.qbar.matrix, s * sc.qbar.matrix, -t0 * std::max(0.0, sc.sensing_coefficient), 0.0,
            sdp::Sense::GE);
        if (!with_an)
        {
            // Without the V block the normalisation only involves t.
            sdp::Constraint &norm_row = p.constraints[sc.k()];
            norm_row.blocks[0] = cmat();
        }
        return out;
    }

    InnerSolveResult solve_inner(double gamma, const DesignScenario &sc, const InnerOptions &opt)
    {
        const AssembledInner as = assemble_inner(gamma, sc, opt.with_an);
        InnerSolveResult r;
        r.gamma = gamma;
        r.with_an = opt.with_an;
        r.sensing_vacuous = as.sensing_vacuous;
        r.raw = sdp::solve(as.problem, opt.tol);
        r.status = r.raw.status;
        const int n = sc.n_tx();
        if (r.status != sdp::Status::Optimal)
        {
            r.w_mat = cmat::Zero(n, n);
            r.v_mat = cmat::Zero(n, n);
            return r;
        }
        r.w_mat = as.s * r.raw.blocks[0];
        r.v_mat = opt.with_an ? cmat(as.s * r.raw.blocks[1]) : cmat::Zero(n, n);
        r.t = as.t0 * r.raw.scalars(0);
        if (!(r.t >= 1e-12))
            throw NumericalError("solve_inner: the Charnes-Cooper scale t collapsed to zero");
        r.f_gamma = trace_product(sc.h_outer, r.w_mat);
        const std::size_t k = sc.k();
        for (std::size_t i = 0; i < k; ++i)
            r.beta.push_back(r.raw.duals(i));
        r.lambda = r.raw.duals(k);
        r.rho = r.raw.duals(k + 1);
        r.psi = r.raw.duals(k + 2);
        r.dual_positive = r.lambda > 1e-10 && r.rho > 1e-10;
        return r;
    }

    double ReconstructionReport::max_constraint_rel() const
    {
        return std::max({eve_rel, norm_rel, power_rel, sensing_rel, psd_rel});
    }

    Reconstruction reconstruct_rank_one(const InnerSolveResult &result, const DesignScenario &sc)
    {
        if (result.status != sdp::Status::Optimal)
            throw InvalidInput("reconstruct_rank_one: inner solve is not optimal");
        const int n = sc.n_tx();
        const ChannelParams &ch = sc.config.channels;

        cmat d = -result.lambda * sc.h_outer + result.psi * sc.qbar.matrix - result.rho * cmat::Identity(n, n);
        for (std::size_t k = 0; k < sc.k(); ++k)
            d -= result.beta[k] * sc.a_outer[k];
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(d));
        const rvec ev = es.eigenvalues();
        const double scale = ev.cwiseAbs().maxCoeff();
        std::vector<Eigen::Index> null_idx;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (std::abs(ev(i)) <= rank_threshold * scale)
                null_idx.push_back(i);

        cmat proj = cmat::Identity(n, n);
        for (Eigen::Index i : null_idx)
            proj -= es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();

        Reconstruction out;
        out.w_bar = hermitian_part(proj * result.w_mat * proj);
        out.v_bar = hermitian_part(result.v_mat + result.w_mat - out.w_bar);
        out.t_bar = result.t;

        ReconstructionReport &rep = out.report;
        rep.null_dim = static_cast<int>(null_idx.size());
        Eigen::SelfAdjointEigenSolver<cmat> ew(out.w_bar, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<cmat> evb(out.v_bar, Eigen::EigenvaluesOnly);
        const rvec lw = ew.eigenvalues();
        const rvec lv = evb.eigenvalues();
        const double w1 = lw(n - 1);
        rep.second_over_first = w1 > 0.0 ? std::max(0.0, lw(n - 2)) / w1 : std::numeric_limits<double>::infinity();

        const double f_new = trace_product(sc.h_outer, out.w_bar);
        rep.objective_rel_error =
            std::abs(f_new - result.f_gamma) / std::max(std::abs(result.f_gamma), std::numeric_limits<double>::min());

        const double t = out.t_bar;
        const double e = ch.eve_noise_referred();
        for (std::size_t k = 0; k < sc.k(); ++k)
        {
            const double lhs = trace_product(sc.a_outer[k], out.w_bar);
            const double rhs = result.gamma * (trace_product(sc.a_outer[k], out.v_bar) + t * e);
            rep.eve_rel = std::max(rep.eve_rel, rel_violation(lhs - rhs, std::max(std::abs(lhs), std::abs(rhs))));
        }
        const double nrm = result.with_an ? trace_product(sc.h_outer, out.v_bar) + t * ch.noise_user_w : 1.0;
        rep.norm_rel = std::abs(nrm - 1.0);
        const double tw = out.w_bar.trace().real(), tv = out.v_bar.trace().real();
        rep.power_rel = rel_violation(tw + tv - t * ch.power_budget_w, t * ch.power_budget_w);
        if (!sc.sensing_vacuous)
        {
            const double lhs = trace_product(sc.qbar.matrix, out.w_bar + out.v_bar);
            const double rhs = t * sc.sensing_coefficient;
            rep.sensing_rel = rel_violation(rhs - lhs, std::max(lhs, rhs));
        }
        const double top = std::max(w1, lv(n - 1));
        rep.psd_rel = std::max(rel_violation(-lw(0), top), rel_violation(-lv(0), top));
        const double total = result.w_mat.trace().real() + result.v_mat.trace().real();
        rep.trace_total_error = std::abs(tw + tv - total) / total;

        // Numerical rank relative to the total primal scale tr(W_bar) + tr(V_bar), the level at which
        // the solver tolerances bound the interior-point residue.
        rep.v_rank = 0;
        for (Eigen::Index i = 0; i < lv.size(); ++i)
            rep.v_rank += lv(i) > reconstruction_tol * (tw + tv) ? 1 : 0;

        std::ostringstream why;
        if (!(rep.second_over_first <= reconstruction_tol))
            why << "W_bar is not rank one (ratio " << rep.second_over_first << "); ";
        if (!(rep.objective_rel_error <= reconstruction_tol))
            why << "objective changed by " << rep.objective_rel_error << "; ";
        if (!(rep.max_constraint_rel() <= reconstruction_tol))
            why << "constraint violation " << rep.max_constraint_rel() << "; ";
        if (rep.v_rank > sc.max_an_beams())
            why << "rank(V_bar) = " << rep.v_rank << "; ";
        rep.failure = why.str();
        rep.ok = rep.failure.empty();
        if (!rep.ok)
            throw CertificateFailure("reconstruct_rank_one: " + rep.failure, rep);
        return out;
    }

    Beams extract_beams(const cmat &w_bar, const cmat &v_bar, double t_bar, int max_an_beams)
    {
        if (!(t_bar > 0.0))
            throw InvalidInput("extract_beams: t must be positive");
        Beams out;
        Eigen::SelfAdjointEigenSolver<cmat> ew(hermitian_part(w_bar / t_bar));
        const Eigen::Index n = w_bar.rows();
        const double lw = std::max(0.0, ew.eigenvalues()(n - 1));
        out.w = std::sqrt(lw) * ew.eigenvectors().col(n - 1);
        fix_phase(out.w);

        Eigen::SelfAdjointEigenSolver<cmat> evs(hermitian_part(v_bar / t_bar));
        const double vmax = evs.eigenvalues()(n - 1);
        if (vmax > rank_threshold * lw)
            for (Eigen::Index i = n - 1; i >= 0 && static_cast<int>(out.an.size()) < max_an_beams; --i)
            {
                const double lam = evs.eigenvalues()(i);
                if (!(lam > rank_threshold * vmax))
                    break;
                cvec v = std::sqrt(lam) * evs.eigenvectors().col(i);
                fix_phase(v);
                out.an.push_back(v);
            }
        return out;
    }

    double default_gamma_max(const DesignScenario &sc)
    {
        const ChannelParams &ch = sc.config.channels;
        return ch.power_budget_w * sc.n_tx() / ch.eve_noise_referred();
    }

    std::vector<double> gamma_grid(const DesignScenario &sc, const GammaSearchConfig &cfg)
    {
        const double hi = cfg.gamma_max > 0.0 ? cfg.gamma_max : default_gamma_max(sc);
        const double lo = cfg.gamma_min;
        if (!(lo > 0.0) || !(hi > lo) || cfg.grid_points < 2)
            throw InvalidInput("gamma grid: need 0 < gamma_min < gamma_max and at least two points");
        std::vector<double> g(cfg.grid_points);
        const double l0 = std::log(lo), l1 = std::log(hi);
        for (int i = 0; i < cfg.grid_points; ++i)
            g[i] = std::exp(l0 + (l1 - l0) * i / (cfg.grid_points - 1));
        return g;
    }

    std::vector<GammaPoint> evaluate_gamma_points(const std::vector<double> &gammas, const DesignScenario &sc,
                                                  const GammaSearchConfig &cfg)
    {
        std::vector<GammaPoint> out;
        for (const Evaluated &e : evaluate_many(gammas, sc, cfg))
            out.push_back(e.point);
        return out;
    }

    BeamformingSolution search_gamma(const DesignScenario &sc, const GammaSearchConfig &cfg)
    {
        GammaSearchConfig local = cfg;
        local.inner.with_an = true;
        const std::vector<Evaluated> all = run_search(sc, local);
        const std::size_t best = best_index(all);

        BeamformingSolution out;
        for (const Evaluated &e : all)
            out.evaluated.push_back(e.point);
        out.gamma_star = all[best].point.gamma;
        out.secrecy_rate = std::max(0.0, all[best].point.g);

        InnerSolveResult inner = all[best].result;
        Reconstruction rec;
        try
        {
            rec = reconstruct_rank_one(inner, sc);
        }
        catch (const CertificateFailure &)
        {
            InnerOptions tight = local.inner;
            tight.tol.gap_tol *= 1e-2;
            tight.tol.feas_tol *= 1e-2;
            inner = solve_inner(out.gamma_star, sc, tight);
            if (inner.status != sdp::Status::Optimal)
                throw;
            rec = reconstruct_rank_one(inner, sc);
        }
        const Beams beams = extract_beams(rec.w_bar, rec.v_bar, rec.t_bar, sc.max_an_beams());
        out.w = beams.w;
        out.an_beams = beams.an;
        out.reconstruction = rec.report;
        out.kkt = eval::kkt_report(inner, sc);
        out.feasible = true;
        finish_solution(out, sc);
        return out;
    }

    FeasibilityProbe feasibility_probe(const DesignScenario &sc)
    {
        FeasibilityProbe p;
        Eigen::SelfAdjointEigenSolver<cmat> es(sc.qbar.matrix, Eigen::EigenvaluesOnly);
        p.max_lhs = sc.config.channels.power_budget_w * es.eigenvalues().maxCoeff();
        p.required_rhs = sc.sensing_coefficient;
        p.feasible = sc.sensing_vacuous || p.max_lhs >= p.required_rhs;
        return p;
    }

    BeamformingSolution benchmark_mrt(const DesignScenario &sc)
    {
        const cvec &h = sc.config.channels.user_channel;
        BeamformingSolution out;
        out.w = std::sqrt(sc.config.channels.power_budget_w) * h / h.norm();
        finish_solution(out, sc);
        out.secrecy_rate = out.realized_rate;
        out.feasible = out.pcrb_value <= sc.pcrb_threshold;
        return out;
    }

    BeamformingSolution benchmark_no_an(const DesignScenario &sc, GammaSearchConfig cfg)
    {
        cfg.inner.with_an = false;
        const std::vector<Evaluated> all = run_search(sc, cfg);
        const std::size_t best = best_index(all);
        BeamformingSolution out;
        for (const Evaluated &e : all)
            out.evaluated.push_back(e.point);
        out.gamma_star = all[best].point.gamma;

        const InnerSolveResult &inner = all[best].result;
        const cmat r = hermitian_part(inner.w_mat / inner.t);
        Eigen::SelfAdjointEigenSolver<cmat> es(r);
        const Eigen::Index n = r.rows();
        const double l1 = es.eigenvalues()(n - 1);
        const double l2 = std::max(0.0, es.eigenvalues()(n - 2));
        out.suboptimal_fallback = !(l2 <= reconstruction_tol * l1);
        out.w = std::sqrt(std::max(0.0, l1)) * es.eigenvectors().col(n - 1);
        fix_phase(out.w);
        finish_solution(out, sc);
        out.secrecy_rate = out.realized_rate;
        out.feasible = out.pcrb_value <= sc.pcrb_threshold * (1.0 + 1e-6);
        return out;
    }
}
