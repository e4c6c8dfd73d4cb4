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

#include <iosfwd>
#include <string>
#include <vector>

#include "isacbeam/core.hpp"

namespace isacbeam::sdp
{
    enum class Sense
    {
        EQ,
        LE,
        GE
    };

    enum class Status
    {
        Optimal,
        Infeasible,
        Unbounded,
        NumericalFailure
    };

    const char *to_string(Status s);

    // One linear constraint. An empty (0x0) block matrix or an empty scalar vector stands for zero.
    struct Constraint
    {
        std::vector<cmat> blocks;
        rvec scalars;
        double rhs = 0.0;
        Sense sense = Sense::EQ;
    };

    /*
     * maximize   sum_i Re tr(C_i X_i) + c_s^T s
     * subject to sum_i Re tr(A_ji X_i) + a_j^T s  (sense_j)  b_j,   X_i Hermitian PSD, s >= 0.
     */
    struct SdpProblem
    {
        std::vector<int> psd_blocks;
        int scalar_count = 0;
        std::vector<cmat> objective_blocks;
        rvec objective_scalars;
        std::vector<Constraint> constraints;

        void validate() const;
    };

    struct Tolerances
    {
        double gap_tol = 1e-8;
        double feas_tol = 1e-8;
        int max_iter = 200;
    };

    struct SdpSolution
    {
        Status status = Status::NumericalFailure;
        std::vector<cmat> blocks;
        rvec scalars;
        // Lagrange multipliers in the convention of the constraint as written: nonnegative for LE
        // and GE rows, free for EQ rows.
        rvec duals;
        // Dual slack sum_j sgn_j y_j A_ji - C_i (PSD at a dual feasible point), sgn = -1 on GE rows.
        std::vector<cmat> dual_blocks;
        rvec dual_scalars;
        double objective = 0.0;
        double dual_objective = 0.0;
        double gap = 0.0;             // |primal - dual| / (1 + |primal|)
        double primal_residual = 0.0; // relative, see check_certificate
        double dual_residual = 0.0;
        int iterations = 0;
        double condition_estimate = 0.0; // of the last reduced Newton system
        std::string message;

        // Farkas multipliers (INFEASIBLE) or a recession direction (UNBOUNDED).
        rvec certificate_duals;
        std::vector<cmat> certificate_blocks;
        rvec certificate_scalars;
    };

    struct CertificateReport
    {
        double gap = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        std::vector<double> complementarity; // <X_i, Z_i> per PSD block, then the scalar block
        double max_complementarity = 0.0;
        double min_primal_eig = 0.0;
        double min_dual_eig = 0.0;
        bool multiplier_signs_ok = true;
        bool ok = false; // every quantity within tol
    };

    SdpSolution solve(const SdpProblem &problem, const Tolerances &tol = {});

    // Recomputes every check from the problem data and the reported primal/dual pair.
    CertificateReport check_certificate(const SdpProblem &problem, const SdpSolution &solution,
                                        const Tolerances &tol = {});

    // [Re H, -Im H; Im H, Re H]
    rmat embed_hermitian(const cmat &h);
    // Inverse of embed_hermitian after projecting onto the embedded structure.
    cmat extract_hermitian(const rmat &x);

    /*
     * Plain-text sparse dump. Header "sdp <n_blocks> <dims...> <n_scalars> <n_constraints>", then one
     * "<row> <block> <i> <j> <real> <imag>" line per nonzero upper-triangle entry, where row 0 is the
     * objective and row j >= 1 is constraint j-1. Scalars use block index n_blocks with i = j.
     * Right-hand sides follow as "rhs <row> <EQ|LE|GE> <value>".
     */
    void write_triplets(const SdpProblem &problem, std::ostream &os);
}
