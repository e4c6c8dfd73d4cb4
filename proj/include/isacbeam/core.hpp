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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isacbeam
{
    using cdouble = std::complex<double>;
    using cvec = Eigen::VectorXcd;
    using crow = Eigen::RowVectorXcd;
    using cmat = Eigen::MatrixXcd;
    using rvec = Eigen::VectorXd;
    using rmat = Eigen::MatrixXd;

    inline constexpr double pi = 3.14159265358979323846;

    // Bad arguments or inputs violating a documented invariant.
    class InvalidInput : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Quadrature non-convergence, singular systems, solver breakdown.
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // The scenario admits no feasible beamformer (e.g. sensing threshold unreachable).
    class InfeasibleScenario : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Serial paths are the reference implementation; parallel paths must match them bit for bit.
    enum class ExecutionPolicy
    {
        Serial,
        Parallel
    };

    inline double deg_to_rad(double deg) { return deg * (pi / 180.0); }
    inline double rad_to_deg(double rad) { return rad * (180.0 / pi); }
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

    // Hermitian part, used to remove roundoff asymmetry.
    inline cmat hermitian_part(const cmat &m) { return 0.5 * (m + m.adjoint()); }

    // Real trace of a product of two Hermitian matrices, tr(A B).
    inline double trace_product(const cmat &a, const cmat &b)
    {
        return (a.cwiseProduct(b.transpose())).sum().real();
    }
}
