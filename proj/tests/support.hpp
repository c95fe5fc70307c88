// SPDX-License-Identifier: Apache-2.0
//
// afdm-sim: link-level simulation library for affine frequency division multiplexing
// Copyright (C) 2026 The afdm-sim authors
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

#ifndef AFDM_TESTS_SUPPORT_HPP
#define AFDM_TESTS_SUPPORT_HPP

#include <cmath>
#include <vector>

#include "afdm/channel.hpp"
#include "afdm/daft.hpp"
#include "afdm/rng.hpp"

namespace testing_support
{
    using afdm::cplx;
    using afdm::CMatrix;
    using afdm::CVector;

    inline CVector random_vector(int n, afdm::SeededRng &rng)
    {
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v[i] = rng.complex_normal(1.0);
        return v;
    }

    inline double max_abs(const CMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

    // e^{-j 2 pi x} straight from std::polar, no phase reduction.
    inline cplx ph(double x) { return std::polar(1.0, -2.0 * M_PI * x); }

    // Direct double sum, O(N^2). Phases are reduced with fmod before evaluation so that large
    // quadratic arguments keep their precision.
    inline CVector naive_daft(const CVector &x, double c1, double c2)
    {
        const int n = static_cast<int>(x.size());
        CVector out = CVector::Zero(n);
        for (int m = 0; m < n; ++m)
        {
            cplx acc = 0.0;
            for (int k = 0; k < n; ++k)
            {
                const double phase = std::fmod(c2 * m * double(m), 1.0) + std::fmod(double(m) * k / n, 1.0) +
                                     std::fmod(c1 * k * double(k), 1.0);
                acc += ph(phase) * x[k];
            }
            out[m] = acc / std::sqrt(double(n));
        }
        return out;
    }

    // Dense Gamma Delta Pi for one path written element by element:
    // r[n] = h e^{-j 2 pi nu n / N} s[n - l] with the chirp-periodic wrap for n < l.
    inline CMatrix naive_path_matrix(const afdm::ChannelPath &path, int n, double c1)
    {
        CMatrix m = CMatrix::Zero(n, n);
        for (int row = 0; row < n; ++row)
        {
            int src = row - path.delay;
            cplx g = 1.0;
            if (src < 0)
            {
                src += n;
                // s[-k] = s[N-k] e^{-j 2 pi c1 (N^2 - 2 N k)}, k = n - src
                const double k = n - src;
                g = ph(std::fmod(c1 * (double(n) * n - 2.0 * n * k), 1.0));
            }
            m(row, src) = path.gain * g * ph(path.doppler * row / n);
        }
        return m;
    }

    inline CMatrix naive_time_channel(const afdm::LtvChannel &ch, int n, double c1)
    {
        CMatrix h = CMatrix::Zero(n, n);
        for (const auto &p : ch.paths)
            h += naive_path_matrix(p, n, c1);
        return h;
    }
}

#endif
