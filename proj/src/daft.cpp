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

#include "afdm/daft.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace afdm
{
    DaftParams::DaftParams(int n_, double c1_, double c2_) : n(n_), c1(c1_), c2(c2_)
    {
        if (n < 1)
            throw config_error("DaftParams: n must be >= 1, got " + std::to_string(n));
        if (!std::isfinite(c1) || !std::isfinite(c2))
            throw config_error("DaftParams: chirp rates must be finite");
    }

    CVector chirp_vector(double c, int n)
    {
        if (n < 1)
            throw config_error("chirp_vector: n must be >= 1");
        CVector v(n);
        for (int k = 0; k < n; ++k)
        {
            const double kk = static_cast<double>(k) * static_cast<double>(k);
            v[k] = unit_phasor(cycles_mod1(c, kk));
        }
        return v;
    }

    CMatrix chirp_diag(double c, int n)
    {
        return chirp_vector(c, n).asDiagonal();
    }

    namespace
    {
        void check_length(const CVector &x, const DaftParams &p, const char *who)
        {
            if (x.size() != p.n)
                throw dimension_error(std::string(who) + ": input length " + std::to_string(x.size()) +
                                      " does not match n = " + std::to_string(p.n));
        }

        // One FFT object per thread; Eigen caches twiddles per length inside it.
        Eigen::FFT<double> &thread_fft()
        {
            thread_local Eigen::FFT<double> fft;
            return fft;
        }

        // kissfft does not handle length 1; the transform there is the identity.
        void fwd(std::vector<cplx> &out, const std::vector<cplx> &in)
        {
            if (in.size() == 1)
                out = in;
            else
                thread_fft().fwd(out, in);
        }

        void inv(std::vector<cplx> &out, const std::vector<cplx> &in)
        {
            if (in.size() == 1)
                out = in;
            else
                thread_fft().inv(out, in);
        }
    }

    CVector daft(const CVector &x, const DaftParams &p)
    {
        check_length(x, p, "daft");
        const int n = p.n;
        const CVector l1 = chirp_vector(p.c1, n);
        const CVector l2 = chirp_vector(p.c2, n);

        std::vector<cplx> in(n), out(n);
        for (int k = 0; k < n; ++k)
            in[k] = l1[k] * x[k];
        fwd(out, in);

        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        CVector y(n);
        for (int m = 0; m < n; ++m)
            y[m] = scale * l2[m] * out[m];
        return y;
    }

    CVector idaft(const CVector &X, const DaftParams &p)
    {
        check_length(X, p, "idaft");
        const int n = p.n;
        const CVector l1 = chirp_vector(p.c1, n);
        const CVector l2 = chirp_vector(p.c2, n);

        std::vector<cplx> in(n), out(n);
        for (int m = 0; m < n; ++m)
            in[m] = std::conj(l2[m]) * X[m];
        inv(out, in); // includes the 1/N factor

        const double scale = std::sqrt(static_cast<double>(n));
        CVector s(n);
        for (int k = 0; k < n; ++k)
            s[k] = scale * std::conj(l1[k]) * out[k];
        return s;
    }

    CMatrix daft_matrix(const DaftParams &p)
    {
        const int n = p.n;
        const double nn = static_cast<double>(n);
        const double scale = 1.0 / std::sqrt(nn);
        CMatrix a(n, n);
        for (int m = 0; m < n; ++m)
        {
            const double md = static_cast<double>(m);
            for (int k = 0; k < n; ++k)
            {
                const double kd = static_cast<double>(k);
                // (m*k mod N)/N keeps the DFT phase exact for large N
                const double dft = static_cast<double>((static_cast<long long>(m) * k) % n) / nn;
                a(m, k) = scale * unit_phasor(cycles_mod1(p.c2, md * md) + dft + cycles_mod1(p.c1, kd * kd));
            }
        }
        return a;
    }
}
