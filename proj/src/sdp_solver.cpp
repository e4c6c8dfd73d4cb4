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


#include "isacbeam/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace isacbeam::sdp
{
    const char *to_string(Status s)
    {
        switch (s)
        {
        case Status::Optimal: return "OPTIMAL";
        case Status::Infeasible: return "INFEASIBLE";
        case Status::Unbounded: return "UNBOUNDED";
        case Status::NumericalFailure: return "NUMERICAL_FAILURE";
        }
        return "UNKNOWN";
    }

    namespace
    {
        bool is_hermitian(const cmat &h)
        {
            if (h.rows() != h.cols())
                return false;
            const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
            return (h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
        }

        double min_eig(const cmat &h)
        {
            if (h.size() == 0)
                return 0.0;
            Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
            return es.eigenvalues()(0);
        }

        using real = long double;
        using xmat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
        using xvec = Eigen::Matrix<real, Eigen::Dynamic, 1>;

        int sign_of(Sense s) { return s == Sense::GE ? -1 : 1; }

        // Element of the internal cone: real symmetric blocks plus a nonnegative orthant.
        struct Cone
        {
            std::vector<xmat> s;
            xvec l;

            Cone &operator+=(const Cone &o)
            {
                for (std::size_t i = 0; i < s.size(); ++i)
                    s[i] += o.s[i];
                l += o.l;
                return *this;
            }
            Cone &operator*=(real a)
            {
                for (auto &m : s)
                    m *= a;
                l *= a;
                return *this;
            }
        };

        Cone operator+(Cone a, const Cone &b) { return a += b; }
        Cone operator-(Cone a, const Cone &b)
        {
            for (std::size_t i = 0; i < a.s.size(); ++i)
                a.s[i] -= b.s[i];
            a.l -= b.l;
            return a;
        }
        Cone operator*(real x, Cone a) { return a *= x; }

        real dot(const Cone &a, const Cone &b)
        {
            real acc = a.l.dot(b.l);
            for (std::size_t i = 0; i < a.s.size(); ++i)
                acc += (a.s[i].array() * b.s[i].array()).sum();
            return acc;
        }

        real norm(const Cone &a) { return std::sqrt(dot(a, a)); }

        Cone zeros(const std::vector<int> &dims, int nl)
        {
            Cone c;
            for (int d : dims)
                c.s.push_back(xmat::Zero(d, d));
            c.l = xvec::Zero(nl);
            return c;
        }

        Cone identity(const std::vector<int> &dims, int nl)
        {
            Cone c;
            for (int d : dims)
                c.s.push_back(xmat::Identity(d, d));
            c.l = xvec::Ones(nl);
            return c;
        }

        // min_x <c, x>  s.t.  A x = b,  x in K  (rows and objective equilibrated).
        struct Internal
        {
            std::vector<int> dims;
            int nl = 0;
            int ns = 0;
            std::vector<Cone> a;
            Cone c;
            xvec b;
            xvec row_scale;
            real obj_scale = 1.0;
            real b_scale = 1.0; // primal variables are stored multiplied by this factor
            // Optional per-block congruence X = T X' T^H applied to the data before realification.
            std::vector<cmat> congruence;

            cmat to_original(const cmat &xp, std::size_t i) const
            {
                if (congruence.empty())
                    return xp;
                return congruence[i] * xp * congruence[i].adjoint();
            }
            std::vector<int> sgn;

            int m() const { return static_cast<int>(a.size()); }

            xvec apply(const Cone &x) const
            {
                xvec r(m());
                for (int j = 0; j < m(); ++j)
                    r(j) = dot(a[j], x);
                return r;
            }

            Cone adjoint(const xvec &y) const
            {
                Cone r = zeros(dims, nl);
                for (int j = 0; j < m(); ++j)
                    if (y(j) != 0.0)
                        r += y(j) * a[j];
                return r;
            }
        };

        Internal build_internal(const SdpProblem &p)
        {
            Internal in;
            for (int d : p.psd_blocks)
                in.dims.push_back(2 * d);
            int n_ineq = 0;
            for (const auto &con : p.constraints)
                n_ineq += con.sense == Sense::EQ ? 0 : 1;
            in.ns = p.scalar_count;
            in.nl = p.scalar_count + n_ineq;

            in.c = zeros(in.dims, in.nl);
            for (std::size_t i = 0; i < p.psd_blocks.size(); ++i)
                in.c.s[i] = real(-0.5) * embed_hermitian(p.objective_blocks[i]).cast<real>();
            for (int k = 0; k < p.scalar_count && k < p.objective_scalars.size(); ++k)
                in.c.l(k) = -p.objective_scalars(k);
            const real cn = norm(in.c);
            in.obj_scale = cn > 0.0 ? 1.0 / cn : 1.0;
            in.c *= in.obj_scale;

            const int m = static_cast<int>(p.constraints.size());
            in.b = xvec::Zero(m);
            in.row_scale = xvec::Ones(m);
            int slack = p.scalar_count;
            for (int j = 0; j < m; ++j)
            {
                const Constraint &con = p.constraints[j];
                Cone row = zeros(in.dims, in.nl);
                for (std::size_t i = 0; i < p.psd_blocks.size(); ++i)
                    if (i < con.blocks.size() && con.blocks[i].size() > 0)
                        row.s[i] = real(0.5) * embed_hermitian(con.blocks[i]).cast<real>();
                for (int k = 0; k < p.scalar_count && k < con.scalars.size(); ++k)
                    row.l(k) = con.scalars(k);
                if (con.sense == Sense::LE)
                    row.l(slack++) = 1.0;
                else if (con.sense == Sense::GE)
                    row.l(slack++) = -1.0;
                const real rn = norm(row);
                in.row_scale(j) = 1.0 / rn;
                row *= in.row_scale(j);
                in.a.push_back(std::move(row));
                in.b(j) = con.rhs * in.row_scale(j);
                in.sgn.push_back(sign_of(con.sense));
            }
            return in;
        }

        struct Measures
        {
            double objective = 0.0;
            double dual_objective = 0.0;
            double gap = 0.0;
            double primal_residual = 0.0;
            double dual_residual = 0.0;
            std::vector<double> complementarity;
            double max_complementarity = 0.0;
            double min_primal_eig = 0.0;
            double min_dual_eig = 0.0;
            bool multiplier_signs_ok = true;
            std::vector<cmat> dual_blocks;
            rvec dual_scalars;
        };

        double block_norm2(const cmat &m) { return m.size() ? m.squaredNorm() : 0.0; }

        Measures measure(const SdpProblem &p, const std::vector<cmat> &x, const rvec &s, const rvec &mu)
        {
            Measures r;
            const std::size_t nb = p.psd_blocks.size();
            const int ns = p.scalar_count;

            double xnorm2 = s.squaredNorm();
            r.min_primal_eig = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < nb; ++i)
            {
                xnorm2 += x[i].squaredNorm();
                r.min_primal_eig = std::min(r.min_primal_eig, min_eig(x[i]));
                r.objective += trace_product(p.objective_blocks[i], x[i]);
            }
            for (int k = 0; k < ns; ++k)
            {
                r.min_primal_eig = std::min(r.min_primal_eig, s(k));
                if (k < p.objective_scalars.size())
                    r.objective += p.objective_scalars(k) * s(k);
            }
            if (!std::isfinite(r.min_primal_eig))
                r.min_primal_eig = 0.0;
            const double xnorm = std::sqrt(xnorm2);

            // Primal: constraint violations and cone membership.
            double pres = 0.0;
            for (std::size_t j = 0; j < p.constraints.size(); ++j)
            {
                const Constraint &con = p.constraints[j];
                // Violations are relative to the magnitude of the row's own terms, so rows whose
                // terms nearly cancel are still resolved to the requested accuracy.
                double ax = 0.0, terms = 0.0;
                for (std::size_t i = 0; i < nb && i < con.blocks.size(); ++i)
                    if (con.blocks[i].size())
                    {
                        const double v = trace_product(con.blocks[i], x[i]);
                        ax += v;
                        terms += std::abs(v);
                    }
                for (int k = 0; k < ns && k < con.scalars.size(); ++k)
                {
                    ax += con.scalars(k) * s(k);
                    terms += std::abs(con.scalars(k) * s(k));
                }
                double viol = 0.0;
                if (con.sense == Sense::EQ)
                    viol = std::abs(ax - con.rhs);
                else if (con.sense == Sense::LE)
                    viol = std::max(0.0, ax - con.rhs);
                else
                    viol = std::max(0.0, con.rhs - ax);
                const double den = terms + std::abs(con.rhs);
                pres = std::max(pres, den > 0.0 ? viol / den : viol);
            }
            if (r.min_primal_eig < 0.0)
                pres = std::max(pres, -r.min_primal_eig / std::max(1.0, xnorm));
            r.primal_residual = pres;

            // Dual slack Z_i = sum_j sgn_j mu_j A_ji - C_i.
            double cscale = 0.0;
            for (std::size_t i = 0; i < nb; ++i)
            {
                cmat z = -p.objective_blocks[i];
                cmat agg = cmat::Zero(p.psd_blocks[i], p.psd_blocks[i]);
                for (std::size_t j = 0; j < p.constraints.size(); ++j)
                {
                    const Constraint &con = p.constraints[j];
                    if (i < con.blocks.size() && con.blocks[i].size())
                        agg += (sign_of(con.sense) * mu(j)) * con.blocks[i];
                }
                z += agg;
                cscale = std::max({cscale, p.objective_blocks[i].norm(), agg.norm()});
                r.dual_blocks.push_back(hermitian_part(z));
            }
            r.dual_scalars = rvec::Zero(ns);
            for (int k = 0; k < ns; ++k)
            {
                double agg = 0.0;
                for (std::size_t j = 0; j < p.constraints.size(); ++j)
                {
                    const Constraint &con = p.constraints[j];
                    if (k < con.scalars.size())
                        agg += sign_of(con.sense) * mu(j) * con.scalars(k);
                }
                const double ck = k < p.objective_scalars.size() ? p.objective_scalars(k) : 0.0;
                r.dual_scalars(k) = agg - ck;
                cscale = std::max({cscale, std::abs(ck), std::abs(agg)});
            }
            if (cscale == 0.0)
                cscale = 1.0;

            double dres = 0.0;
            r.min_dual_eig = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < nb; ++i)
            {
                const double e = min_eig(r.dual_blocks[i]);
                r.min_dual_eig = std::min(r.min_dual_eig, e);
                dres = std::max(dres, std::max(0.0, -e) / cscale);
            }
            for (int k = 0; k < ns; ++k)
            {
                r.min_dual_eig = std::min(r.min_dual_eig, r.dual_scalars(k));
                dres = std::max(dres, std::max(0.0, -r.dual_scalars(k)) / cscale);
            }
            if (!std::isfinite(r.min_dual_eig))
                r.min_dual_eig = 0.0;
            for (std::size_t j = 0; j < p.constraints.size(); ++j)
            {
                const Constraint &con = p.constraints[j];
                if (con.sense == Sense::EQ || mu(j) >= 0.0)
                    continue;
                r.multiplier_signs_ok = false;
                double an2 = 1.0;
                for (std::size_t i = 0; i < nb && i < con.blocks.size(); ++i)
                    an2 += block_norm2(con.blocks[i]);
                dres = std::max(dres, -mu(j) * std::sqrt(an2) / cscale);
            }
            r.dual_residual = dres;

            for (std::size_t j = 0; j < p.constraints.size(); ++j)
                r.dual_objective += sign_of(p.constraints[j].sense) * mu(j) * p.constraints[j].rhs;
            r.gap = std::abs(r.objective - r.dual_objective) / (1.0 + std::abs(r.objective));

            for (std::size_t i = 0; i < nb; ++i)
            {
                r.complementarity.push_back(trace_product(x[i], r.dual_blocks[i]));
                r.max_complementarity = std::max(r.max_complementarity, std::abs(r.complementarity.back()));
            }
            if (ns > 0)
            {
                r.complementarity.push_back(s.dot(r.dual_scalars));
                r.max_complementarity = std::max(r.max_complementarity, std::abs(r.complementarity.back()));
            }
            return r;
        }

        bool meets(const Measures &m, const Tolerances &tol)
        {
            return m.gap <= tol.gap_tol && m.primal_residual <= tol.feas_tol && m.dual_residual <= tol.feas_tol &&
                   m.max_complementarity <= tol.gap_tol * (1.0 + std::abs(m.objective));
        }

        // Worst ratio of a measure to its tolerance; below 1 exactly when meets() holds.
        double merit(const Measures &m, const Tolerances &tol)
        {
            return std::max({m.gap / tol.gap_tol, m.primal_residual / tol.feas_tol, m.dual_residual / tol.feas_tol,
                             m.max_complementarity / (tol.gap_tol * (1.0 + std::abs(m.objective)))});
        }

        // User-level view of an internal iterate divided by tau.
        void to_user(const SdpProblem &p, const Internal &in, const Cone &x, const xvec &y, real tau,
                     std::vector<cmat> &blocks, rvec &scalars, rvec &mu)
        {
            blocks.clear();
            for (std::size_t i = 0; i < p.psd_blocks.size(); ++i)
                blocks.push_back(hermitian_part(
                    in.to_original(extract_hermitian((x.s[i] / (tau * in.b_scale)).cast<double>()), i)));
            scalars = (x.l.head(in.ns) / (tau * in.b_scale)).cast<double>();
            mu.resize(in.m());
            for (int j = 0; j < in.m(); ++j)
                mu(j) = static_cast<double>(-in.sgn[j] * y(j) * in.row_scale(j) / (in.obj_scale * tau));
        }

        // Nesterov-Todd scaling of one PSD block: R^{-1} x R^{-T} = R^T z R = diag(lambda).
        struct BlockScaling
        {
            xmat r, rinv, w;
            xvec lambda;
        };

        bool nt_scaling(const xmat &x, const xmat &z, BlockScaling &out)
        {
            Eigen::LLT<xmat> lx(x), lz(z);
            if (lx.info() != Eigen::Success || lz.info() != Eigen::Success)
                return false;
            const xmat Lx = lx.matrixL();
            const xmat Lz = lz.matrixL();
            Eigen::JacobiSVD<xmat> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
            out.lambda = svd.singularValues();
            if (out.lambda.minCoeff() <= 0.0)
                return false;
            const xvec is = out.lambda.cwiseSqrt().cwiseInverse();
            out.r = Lx * svd.matrixV() * is.asDiagonal();
            out.rinv = is.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
            out.w = out.r * out.r.transpose();
            return true;
        }

        struct Scaling
        {
            std::vector<BlockScaling> blocks;
            xvec lw, llam;

            Cone apply_w(const Cone &d) const
            {
                Cone r = d;
                for (std::size_t i = 0; i < blocks.size(); ++i)
                {
                    r.s[i] = blocks[i].w * d.s[i] * blocks[i].w;
                    r.s[i] = 0.5 * (r.s[i] + r.s[i].transpose()).eval();
                }
                r.l = lw.cwiseProduct(lw).cwiseProduct(d.l);
                return r;
            }
        };

        // Complementarity right-hand side for target sigma*mu with optional second-order correction.
        Cone complementarity_rhs(const Scaling &sc, real target, const Cone *dx_a, const Cone *dz_a)
        {
            Cone rc;
            for (std::size_t i = 0; i < sc.blocks.size(); ++i)
            {
                const BlockScaling &b = sc.blocks[i];
                const int n = static_cast<int>(b.lambda.size());
                xmat t = xmat(b.lambda.cwiseProduct(b.lambda).asDiagonal());
                t = -t;
                t.diagonal().array() += target;
                if (dx_a)
                {
                    const xmat xs = b.rinv * dx_a->s[i] * b.rinv.transpose();
                    const xmat zs = b.r.transpose() * dz_a->s[i] * b.r;
                    t -= 0.5 * (xs * zs + zs * xs);
                }
                xmat u(n, n);
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        u(p, q) = 2.0 * t(p, q) / (b.lambda(p) + b.lambda(q));
                xmat out = b.r * u * b.r.transpose();
                rc.s.push_back(0.5 * (out + out.transpose()));
            }
            const int nl = static_cast<int>(sc.lw.size());
            rc.l.resize(nl);
            for (int k = 0; k < nl; ++k)
            {
                real t = target - sc.llam(k) * sc.llam(k);
                if (dx_a)
                    t -= (dx_a->l(k) / sc.lw(k)) * (dz_a->l(k) * sc.lw(k));
                rc.l(k) = sc.lw(k) * t / sc.llam(k);
            }
            return rc;
        }

        real max_step_psd(const xmat &x, const xmat &dx)
        {
            Eigen::LLT<xmat> l(x);
            if (l.info() != Eigen::Success)
                return 0.0;
            const xmat L = l.matrixL();
            const xmat m = L.triangularView<Eigen::Lower>().solve(
                L.triangularView<Eigen::Lower>().solve(dx).transpose());
            Eigen::SelfAdjointEigenSolver<xmat> es(real(0.5) * (m + m.transpose()), Eigen::EigenvaluesOnly);
            const real e = es.eigenvalues()(0);
            return e >= 0.0 ? std::numeric_limits<real>::infinity() : -1.0 / e;
        }

        real max_step(const Cone &x, const Cone &dx)
        {
            real a = std::numeric_limits<real>::infinity();
            for (std::size_t i = 0; i < x.s.size(); ++i)
                a = std::min(a, max_step_psd(x.s[i], dx.s[i]));
            for (int k = 0; k < x.l.size(); ++k)
                if (dx.l(k) < 0.0)
                    a = std::min(a, -x.l(k) / dx.l(k));
            return a;
        }

        bool interior(const Cone &x)
        {
            for (const auto &m : x.s)
            {
                Eigen::LLT<xmat> l(m);
                if (l.info() != Eigen::Success)
                    return false;
            }
            return x.l.size() == 0 || x.l.minCoeff() > 0.0;
        }
    }

    void SdpProblem::validate() const
    {
        if (scalar_count < 0)
            throw InvalidInput("sdp: negative scalar count");
        if (objective_blocks.size() != psd_blocks.size())
            throw InvalidInput("sdp: one objective matrix per PSD block is required");
        if (objective_scalars.size() != 0 && objective_scalars.size() != scalar_count)
            throw InvalidInput("sdp: objective scalar length mismatch");
        if (psd_blocks.empty() && scalar_count == 0)
            throw InvalidInput("sdp: problem has no variables");
        for (std::size_t i = 0; i < psd_blocks.size(); ++i)
        {
            if (psd_blocks[i] <= 0)
                throw InvalidInput("sdp: block dimensions must be positive");
            if (objective_blocks[i].rows() != psd_blocks[i] || !is_hermitian(objective_blocks[i]))
                throw InvalidInput("sdp: objective block " + std::to_string(i) + " is not Hermitian of matching size");
        }
        if (constraints.empty())
            throw InvalidInput("sdp: at least one constraint is required");
        for (std::size_t j = 0; j < constraints.size(); ++j)
        {
            const Constraint &con = constraints[j];
            if (con.blocks.size() > psd_blocks.size())
                throw InvalidInput("sdp: constraint " + std::to_string(j) + " has too many blocks");
            bool nonzero = false;
            for (std::size_t i = 0; i < con.blocks.size(); ++i)
            {
                if (con.blocks[i].size() == 0)
                    continue;
                if (con.blocks[i].rows() != psd_blocks[i] || !is_hermitian(con.blocks[i]))
                    throw InvalidInput("sdp: constraint " + std::to_string(j) + " block " + std::to_string(i) +
                                       " is not Hermitian of matching size");
                nonzero = nonzero || con.blocks[i].cwiseAbs().maxCoeff() > 0.0;
            }
            if (con.scalars.size() != 0 && con.scalars.size() != scalar_count)
                throw InvalidInput("sdp: constraint " + std::to_string(j) + " scalar length mismatch");
            nonzero = nonzero || (con.scalars.size() && con.scalars.cwiseAbs().maxCoeff() > 0.0);
            if (!nonzero)
                throw InvalidInput("sdp: constraint " + std::to_string(j) + " has no nonzero coefficient");
            if (!std::isfinite(con.rhs))
                throw InvalidInput("sdp: nonfinite right-hand side");
        }
    }

    rmat embed_hermitian(const cmat &h)
    {
        if (!is_hermitian(h))
            throw InvalidInput("embed_hermitian: input is not Hermitian");
        const Eigen::Index n = h.rows();
        rmat e(2 * n, 2 * n);
        e.topLeftCorner(n, n) = h.real();
        e.topRightCorner(n, n) = -h.imag();
        e.bottomLeftCorner(n, n) = h.imag();
        e.bottomRightCorner(n, n) = h.real();
        return e;
    }

    cmat extract_hermitian(const rmat &x)
    {
        if (x.rows() != x.cols() || x.rows() % 2 != 0)
            throw InvalidInput("extract_hermitian: expected a square matrix of even size");
        const Eigen::Index n = x.rows() / 2;
        const rmat re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
        const rmat im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
        cmat h(n, n);
        h.real() = re;
        h.imag() = im;
        return h;
    }

    namespace
    {
        constexpr double congruence_floor = 1e-6;
        constexpr int precondition_rounds = 3;

        // Homogeneous self-dual iteration. On failure, x_size and z_size receive the norms of the
        // last primal and dual-slack iterates per unit tau.
        SdpSolution hsd(const SdpProblem &problem, const Internal &in, const Tolerances &tol, double &x_size,
                        double &z_size)
        {
        const int m = in.m();
        const int n_cone = std::accumulate(in.dims.begin(), in.dims.end(), 0) + in.nl;

        Cone x = identity(in.dims, in.nl);
        Cone z = identity(in.dims, in.nl);
        xvec y = xvec::Zero(m);
        real tau = 1.0, kappa = 1.0;

        // Per-iteration trace on stderr for debugging.
        const bool trace = std::getenv("ISACBEAM_SDP_TRACE") != nullptr;
        SdpSolution sol;
        auto fill = [&](const Measures &ms, const std::vector<cmat> &xb, const rvec &xs, const rvec &mu) {
            sol.blocks = xb;
            sol.scalars = xs;
            sol.duals = mu;
            sol.dual_blocks = ms.dual_blocks;
            sol.dual_scalars = ms.dual_scalars;
            sol.objective = ms.objective;
            sol.dual_objective = ms.dual_objective;
            sol.gap = ms.gap;
            sol.primal_residual = ms.primal_residual;
            sol.dual_residual = ms.dual_residual;
        };

        SdpSolution converged;
        bool have_converged = false;
        double converged_excess = 0.0;
        int polish_steps = 0;
        constexpr int max_polish = 5;
        constexpr double polish_gap = 1e-2;
        // Inequality multipliers that are negative only within the dual tolerance are set to zero
        // when the pair still meets every tolerance and no dual slack eigenvalue turns more negative.
        auto finish_optimal = [&](SdpSolution s) {
            rvec mu = s.duals;
            bool changed = false;
            for (int j = 0; j < mu.size(); ++j)
                if (problem.constraints[j].sense != Sense::EQ && mu(j) < 0.0)
                {
                    mu(j) = 0.0;
                    changed = true;
                }
            if (changed)
            {
                const Measures m0 = measure(problem, s.blocks, s.scalars, s.duals);
                const Measures mc = measure(problem, s.blocks, s.scalars, mu);
                if (meets(mc, tol) && mc.min_dual_eig >= std::min(0.0, m0.min_dual_eig))
                {
                    s.duals = mu;
                    s.dual_blocks = mc.dual_blocks;
                    s.dual_scalars = mc.dual_scalars;
                    s.dual_objective = mc.dual_objective;
                    s.gap = mc.gap;
                    s.primal_residual = mc.primal_residual;
                    s.dual_residual = mc.dual_residual;
                }
            }
            s.status = Status::Optimal;
            s.message = "converged";
            return s;
        };

        // Best iterate by a normalised merit, returned when the iteration stalls or fails.
        SdpSolution best;
        real best_merit = std::numeric_limits<real>::infinity();
        int best_iter = 0;
        real best_x_size = 0.0, best_z_size = 0.0;
        constexpr int stall_window = 25;

        for (int iter = 0; iter <= tol.max_iter; ++iter)
        {
            sol.iterations = iter;
            const xvec r_p = in.apply(x) - in.b * tau;
            const Cone r_d = tau * in.c - in.adjoint(y) - z;
            const real r_g = in.b.dot(y) - dot(in.c, x) - kappa;
            const real mu = (dot(x, z) + tau * kappa) / (n_cone + 1);

            std::vector<cmat> xb;
            rvec xs, duals;
            to_user(problem, in, x, y, tau, xb, xs, duals);
            const Measures ms = measure(problem, xb, xs, duals);
            fill(ms, xb, xs, duals);
            if (trace)
                std::fprintf(stderr, "sdp %3d mu %.3e tau %.3e kappa %.3e gap %.2e pres %.2e dres %.2e comp %.2e\n",
                             iter, static_cast<double>(mu), static_cast<double>(tau), static_cast<double>(kappa), ms.gap, ms.primal_residual, ms.dual_residual,
                             ms.max_complementarity);
            if (meets(ms, tol))
            {
                // A few polishing steps until the objectives agree more tightly than gap_tol asks;
                // the converged pair with the smallest primal excess is kept.
                const double excess = ms.objective - ms.dual_objective;
                if (!have_converged || excess < converged_excess)
                {
                    converged = sol;
                    converged_excess = excess;
                    have_converged = true;
                }
                if (excess <= polish_gap * tol.gap_tol * (1.0 + std::abs(ms.objective)) || polish_steps >= max_polish)
                    return finish_optimal(converged);
                ++polish_steps;
            }
            else if (have_converged)
                return finish_optimal(converged);
            const real score = merit(ms, tol);
            if (std::isfinite(score) && score < 0.5 * best_merit)
                best_iter = iter;
            if (std::isfinite(score) && score < best_merit)
            {
                best_merit = score;
                best = sol;
                best_x_size = norm(x) / tau;
                best_z_size = norm(z) / tau;
            }
            if (iter - best_iter > stall_window)
            {
                sol.message = "progress stalled";
                break;
            }

            // Certificates of infeasibility from the homogeneous embedding.
            const real by = in.b.dot(y);
            const real cx = dot(in.c, x);
            if (by > 0.0 && kappa > tau)
            {
                const Cone aty = in.adjoint(y) + z;
                if (norm(aty) <= tol.feas_tol * by)
                {
                    sol.status = Status::Infeasible;
                    sol.message = "primal infeasible (Farkas certificate)";
                    sol.certificate_duals.resize(m);
                    for (int j = 0; j < m; ++j)
                        sol.certificate_duals(j) = -in.sgn[j] * y(j) * in.row_scale(j) / by;
                    return sol;
                }
            }
            if (cx < 0.0 && kappa > tau)
            {
                if (in.apply(x).norm() <= tol.feas_tol * (-cx))
                {
                    sol.status = Status::Unbounded;
                    sol.message = "dual infeasible (recession direction)";
                    const real nx = norm(x);
                    sol.certificate_blocks.clear();
                    for (std::size_t i = 0; i < problem.psd_blocks.size(); ++i)
                        sol.certificate_blocks.push_back(hermitian_part(in.to_original(extract_hermitian((x.s[i] / nx).cast<double>()), i)));
                    sol.certificate_scalars = (x.l.head(in.ns) / nx).cast<double>();
                    return sol;
                }
            }
            if (iter == tol.max_iter)
                break;

            Scaling sc;
            bool ok = true;
            for (std::size_t i = 0; i < in.dims.size() && ok; ++i)
            {
                BlockScaling b;
                ok = nt_scaling(x.s[i], z.s[i], b);
                sc.blocks.push_back(std::move(b));
            }
            if (!ok)
            {
                sol.message = "loss of positive definiteness in scaling";
                break;
            }
            sc.lw = (x.l.array() / z.l.array()).sqrt();
            sc.llam = (x.l.array() * z.l.array()).sqrt();

            // Reduced Newton system in (dy, dtau).
            std::vector<Cone> wa;
            wa.reserve(m);
            for (int j = 0; j < m; ++j)
                wa.push_back(sc.apply_w(in.a[j]));
            const Cone wc = sc.apply_w(in.c);
            xmat M(m, m);
            for (int j = 0; j < m; ++j)
                for (int l = j; l < m; ++l)
                    M(j, l) = M(l, j) = dot(in.a[j], wa[l]);
            if (!M.allFinite())
            {
                sol.message = "non-finite Newton system";
                break;
            }
            const Eigen::LDLT<xmat> ldlt(M);
            const real rcond = ldlt.rcond();
            sol.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<real>::infinity();
            auto msolve = [&](const xvec &r) {
                xvec v = ldlt.solve(r);
                v += ldlt.solve(r - M * v);
                return v;
            };
            // dtau is eliminated through a Schur complement written as a sum of nonnegative terms,
            // <e, W e> with e = c - A^* M^{-1} A W c, plus b^T M^{-1} b and kappa/tau, so it stays
            // accurate when the individual entries of the Newton system are O(1/mu).
            const xvec awc = in.apply(wc);
            const xvec u = msolve(awc);
            const xvec v = msolve(in.b);
            const Cone e = in.c - in.adjoint(u);
            const real den = dot(e, sc.apply_w(e)) + in.b.dot(v) + kappa / tau;
            if (!(den > 0.0) || !std::isfinite(den) || !u.allFinite() || !v.allFinite())
            {
                std::ostringstream os;
                os << "ill-conditioned Newton system (condition estimate " << sol.condition_estimate << ")";
                sol.message = os.str();
                break;
            }
            const Cone wrd = sc.apply_w(r_d);
            const xvec awrd = in.apply(wrd);
            const real cwrd = dot(in.c, wrd);

            struct Direction
            {
                Cone dx, dz;
                xvec dy;
                real dtau = 0.0, dkappa = 0.0;
            };
            auto direction = [&](real eta, const Cone &rc, real rtau) {
                const xvec r1 = -eta * r_p - in.apply(rc) + eta * awrd;
                const real r2 = -eta * r_g + dot(in.c, rc) - eta * cwrd + rtau / tau;
                const xvec q = msolve(r1);
                Direction d;
                d.dtau = (r2 - (in.b - awc).dot(q)) / den;
                d.dy = q + (u + v) * d.dtau;
                d.dz = d.dtau * in.c - in.adjoint(d.dy) + eta * r_d;
                d.dx = rc - sc.apply_w(d.dz);
                d.dkappa = (rtau - kappa * d.dtau) / tau;
                return d;
            };
            auto step_limit = [&](const Direction &d) {
                real a = std::min(max_step(x, d.dx), max_step(z, d.dz));
                if (d.dtau < 0.0)
                    a = std::min(a, -tau / d.dtau);
                if (d.dkappa < 0.0)
                    a = std::min(a, -kappa / d.dkappa);
                return a;
            };

            // Predictor.
            const Cone rc_a = complementarity_rhs(sc, 0.0, nullptr, nullptr);
            const Direction pred = direction(1.0, rc_a, -tau * kappa);
            const real alpha_a = std::min(real(1), step_limit(pred));

            // Corrector.
            const real sigma = std::pow(1.0 - alpha_a, 3);
            const real eta = 1.0 - sigma;
            const Cone rc = complementarity_rhs(sc, sigma * mu, &pred.dx, &pred.dz);
            const Direction d = direction(eta, rc, sigma * mu - tau * kappa - pred.dtau * pred.dkappa);
            real alpha = std::min(real(1), real(0.99) * step_limit(d));

            bool stepped = false;
            for (int bt = 0; bt < 60 && alpha > 1e-14; ++bt, alpha *= 0.8)
            {
                Cone xn = x + alpha * d.dx;
                Cone zn = z + alpha * d.dz;
                const real tn = tau + alpha * d.dtau;
                const real kn = kappa + alpha * d.dkappa;
                if (tn <= 0.0 || kn <= 0.0 || !interior(xn) || !interior(zn))
                    continue;
                for (auto &s : xn.s)
                    s = 0.5 * (s + s.transpose()).eval();
                for (auto &s : zn.s)
                    s = 0.5 * (s + s.transpose()).eval();
                x = std::move(xn);
                z = std::move(zn);
                y += alpha * d.dy;
                tau = tn;
                kappa = kn;
                stepped = true;
                break;
            }
            if (!stepped)
            {
                sol.message = "step length collapsed";
                break;
            }
        }
        if (have_converged)
            return finish_optimal(converged);
        const std::string reason = sol.message.empty() ? "iteration limit reached" : sol.message;
        const int iterations = sol.iterations;
        if (std::isfinite(best_merit))
        {
            sol = std::move(best);
            x_size = best_x_size;
            z_size = best_z_size;
        }
        else
        {
            x_size = norm(x) / tau;
            z_size = norm(z) / tau;
        }
        sol.status = Status::NumericalFailure;
        sol.message = reason;
        sol.iterations = iterations;
        return sol;
        }
    }

    namespace
    {
        double solution_merit(const SdpProblem &problem, const SdpSolution &s, const Tolerances &tol)
        {
            if (s.blocks.size() != problem.psd_blocks.size() || s.duals.size() != static_cast<Eigen::Index>(problem.constraints.size()))
                return std::numeric_limits<double>::infinity();
            const double score = merit(measure(problem, s.blocks, s.scalars, s.duals), tol);
            return std::isfinite(score) ? score : std::numeric_limits<double>::infinity();
        }
    }

    SdpSolution solve(const SdpProblem &problem, const Tolerances &tol)
    {
        problem.validate();
        const Internal in = build_internal(problem);
        double x_size = 0.0, z_size = 0.0;
        SdpSolution sol = hsd(problem, in, tol, x_size, z_size);
        if (sol.status != Status::NumericalFailure || !(x_size > 0.0) || !(z_size > 0.0) ||
            !std::isfinite(x_size) || !std::isfinite(z_size))
            return sol;

        // Restart from a problem preconditioned by the best solution so far: every PSD block is
        // substituted as X = T X' T^H with T = (X_1 / ||X_1|| + delta I)^{1/2}, which magnifies the
        // directions in which that solution is small. Multipliers are unchanged.
        int total_iterations = sol.iterations;
        for (int round = 0; round < precondition_rounds; ++round)
        {
            SdpProblem pre = problem;
            std::vector<cmat> ts;
            for (std::size_t i = 0; i < problem.psd_blocks.size(); ++i)
            {
                const cmat &x1 = sol.blocks[i];
                const double scale = std::max(x1.norm(), std::numeric_limits<double>::min());
                Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(x1 / scale));
                const rvec d = (es.eigenvalues().cwiseMax(0.0).array() + congruence_floor).sqrt();
                const cmat t = hermitian_part(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint());
                ts.push_back(t);
                pre.objective_blocks[i] = hermitian_part(t.adjoint() * problem.objective_blocks[i] * t);
                for (auto &con : pre.constraints)
                    if (i < con.blocks.size() && con.blocks[i].size())
                        con.blocks[i] = hermitian_part(t.adjoint() * con.blocks[i] * t);
            }
            Internal pin = build_internal(pre);
            pin.congruence = ts;
            double xs2 = 0.0, zs2 = 0.0;
            SdpSolution next = hsd(problem, pin, tol, xs2, zs2);
            total_iterations += next.iterations;
            const bool better = next.status != Status::NumericalFailure || solution_merit(problem, next, tol) <
                                                                                solution_merit(problem, sol, tol);
            if (better)
                sol = std::move(next);
            sol.iterations = total_iterations;
            if (sol.status != Status::NumericalFailure || !better)
                break;
        }
        return sol;
    }

    CertificateReport check_certificate(const SdpProblem &problem, const SdpSolution &solution, const Tolerances &tol)
    {
        problem.validate();
        CertificateReport rep;
        if (solution.blocks.size() != problem.psd_blocks.size() || solution.scalars.size() != problem.scalar_count ||
            solution.duals.size() != static_cast<Eigen::Index>(problem.constraints.size()))
            return rep;
        const Measures ms = measure(problem, solution.blocks, solution.scalars, solution.duals);
        rep.gap = ms.gap;
        rep.primal_residual = ms.primal_residual;
        rep.dual_residual = ms.dual_residual;
        rep.complementarity = ms.complementarity;
        rep.max_complementarity = ms.max_complementarity;
        rep.min_primal_eig = ms.min_primal_eig;
        rep.min_dual_eig = ms.min_dual_eig;
        rep.multiplier_signs_ok = ms.multiplier_signs_ok;
        rep.ok = meets(ms, tol) && ms.multiplier_signs_ok;
        return rep;
    }

    void write_triplets(const SdpProblem &problem, std::ostream &os)
    {
        problem.validate();
        const std::size_t nb = problem.psd_blocks.size();
        os << "sdp " << nb;
        for (int d : problem.psd_blocks)
            os << ' ' << d;
        os << ' ' << problem.scalar_count << ' ' << problem.constraints.size() << '\n';
        os.precision(17);
        auto emit = [&](std::size_t row, const std::vector<cmat> &blocks, const rvec &scalars) {
            for (std::size_t i = 0; i < nb && i < blocks.size(); ++i)
                for (Eigen::Index r = 0; r < blocks[i].rows(); ++r)
                    for (Eigen::Index c = r; c < blocks[i].cols(); ++c)
                        if (blocks[i](r, c) != cdouble(0.0))
                            os << row << ' ' << i << ' ' << r << ' ' << c << ' ' << blocks[i](r, c).real() << ' '
                               << blocks[i](r, c).imag() << '\n';
            for (Eigen::Index k = 0; k < scalars.size(); ++k)
                if (scalars(k) != 0.0)
                    os << row << ' ' << nb << ' ' << k << ' ' << k << ' ' << scalars(k) << " 0\n";
        };
        emit(0, problem.objective_blocks, problem.objective_scalars);
        for (std::size_t j = 0; j < problem.constraints.size(); ++j)
            emit(j + 1, problem.constraints[j].blocks, problem.constraints[j].scalars);
        for (std::size_t j = 0; j < problem.constraints.size(); ++j)
        {
            const Sense s = problem.constraints[j].sense;
            os << "rhs " << j + 1 << ' ' << (s == Sense::EQ ? "EQ" : s == Sense::LE ? "LE" : "GE") << ' '
               << problem.constraints[j].rhs << '\n';
        }
    }
}
