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



// Independent reference computations shared by the unit tests. Nothing here calls into the
// library beyond its data types.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "isacbeam/array_model.hpp"

namespace oracle
{
    using isacbeam::cdouble;
    using isacbeam::cmat;
    using isacbeam::cvec;
    using ldc = std::complex<long double>;

    inline constexpr long double lpi = 3.141592653589793238462643383279502884L;

    // Element n (1-based) carries exp(j pi Delta (2n - 1 - N) sin theta), evaluated in long double.
    inline std::vector<ldc> steering(long double theta, int n, long double spacing)
    {
        std::vector<ldc> a(n);
        for (int k = 1; k <= n; ++k)
        {
            const long double ph = lpi * spacing * static_cast<long double>(2 * k - 1 - n) * std::sin(theta);
            a[k - 1] = ldc(std::cos(ph), std::sin(ph));
        }
        return a;
    }

    inline cvec to_cvec(const std::vector<ldc> &v)
    {
        cvec out(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = cdouble(static_cast<double>(v[i].real()), static_cast<double>(v[i].imag()));
        return out;
    }

    // Hermitian Gaussian matrix G + G^H.
    inline cmat random_hermitian(int n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> nd(0.0, 1.0);
        cmat g(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                const double re = nd(rng);
                g(i, j) = cdouble(re, nd(rng));
            }
        return 0.5 * (g + g.adjoint());
    }

    // Random PSD matrix G G^H of the given rank, scaled to trace `power`.
    inline cmat random_psd(int n, int rank, double power, std::mt19937_64 &rng)
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

    inline cvec random_vector(int n, double norm, std::mt19937_64 &rng)
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

    inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}
