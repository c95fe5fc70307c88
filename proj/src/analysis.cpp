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

#include "afdm/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "afdm/effective.hpp"
#include "afdm/rng.hpp"

namespace afdm
{
    namespace
    {
        CVector apply_band(const PathBand &b, const CVector &x)
        {
            CVector y = CVector::Zero(b.n);
            for (int row = 0; row < b.n; ++row)
                for (int m = -b.lo; m <= b.hi; ++m)
                    y[row] += b.at(row, m) * x[b.column(row, m)];
            return y;
        }

        std::vector<CMatrix> unit_paths(const LtvChannel &ch, const DaftParams &p)
        {
            std::vector<CMatrix> out;
            for (auto path : ch.paths)
            {
                path.gain = 1.0;
                out.push_back(heff_entries(path, p).dense());
            }
            return out;
        }

        int rank_of(const std::vector<CMatrix> &hs, const CVector &delta, CMatrix &phi)
        {
            for (std::size_t i = 0; i < hs.size(); ++i)
                phi.col(static_cast<Eigen::Index>(i)) = hs[i] * delta;
            return numerical_rank(phi);
        }
    }

    CMatrix phi_matrix(const CVector &delta, const LtvChannel &ch, const DaftParams &p)
    {
        if (delta.size() != p.n)
            throw dimension_error("phi_matrix: difference vector length must equal n");
        CMatrix phi(p.n, static_cast<Eigen::Index>(ch.paths.size()));
        for (std::size_t i = 0; i < ch.paths.size(); ++i)
        {
            ChannelPath path = ch.paths[i];
            path.gain = 1.0;
            phi.col(static_cast<Eigen::Index>(i)) = apply_band(heff_entries(path, p), delta);
        }
        return phi;
    }

    int numerical_rank(const CMatrix &m, double rel_tol)
    {
        if (m.size() == 0)
            return 0;
        const Eigen::JacobiSVD<CMatrix> svd(m);
        const auto &s = svd.singularValues();
        if (s.size() == 0 || s[0] == 0.0)
            return 0;
        int r = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s[i] > rel_tol * s[0])
                ++r;
        return r;
    }

    RankSearch min_rank_over_deltas(const LtvChannel &ch, const DaftParams &p, const Alphabet &a,
                                    std::uint64_t budget, std::uint64_t seed)
    {
        const int n = p.n;
        const std::vector<cplx> diffs = a.difference_set();
        const auto hs = unit_paths(ch, p);
        CMatrix phi(n, static_cast<Eigen::Index>(hs.size()));

        RankSearch res;
        res.min_rank = static_cast<int>(hs.size());

        // |D|^n - 1 non-zero vectors; the overflow guard stops once the budget is passed.
        std::uint64_t total = 1;
        bool fits = true;
        for (int i = 0; i < n && fits; ++i)
        {
            if (total > (budget + 1) / diffs.size())
                fits = false;
            else
                total *= diffs.size();
        }
        fits = fits && total - 1 <= budget;

        auto consider = [&](const CVector &delta) {
            ++res.evaluated;
            const int r = rank_of(hs, delta, phi);
            if (r < res.min_rank || res.worst_delta.size() == 0)
            {
                res.worst_delta = delta;
                res.min_rank = std::min(res.min_rank, r);
            }
        };

        if (fits)
        {
            res.exhaustive = true;
            const auto zero = std::find(diffs.begin(), diffs.end(), cplx(0.0, 0.0)) - diffs.begin();
            std::vector<std::size_t> digit(n, static_cast<std::size_t>(zero));
            CVector delta = CVector::Zero(n);
            for (std::uint64_t k = 1; k < total; ++k)
            {
                // odometer step over the difference set, starting from the all-zero vector
                for (int i = 0; i < n; ++i)
                {
                    digit[i] = (digit[i] + 1) % diffs.size();
                    delta[i] = diffs[digit[i]];
                    if (digit[i] != static_cast<std::size_t>(zero))
                        break;
                }
                consider(delta);
            }
        }
        else
        {
            SeededRng rng(seed);
            const auto &pts = a.points();
            CVector delta(n);
            for (std::uint64_t k = 0; k < budget; ++k)
            {
                bool nonzero = false;
                while (!nonzero)
                {
                    for (int i = 0; i < n; ++i)
                    {
                        delta[i] = pts[rng.uniform_int(0, a.size() - 1)] - pts[rng.uniform_int(0, a.size() - 1)];
                        nonzero = nonzero || delta[i] != cplx(0.0, 0.0);
                    }
                }
                consider(delta);
            }
        }
        return res;
    }

    PepBound pep_bound(const CVector &delta, const LtvChannel &ch, const DaftParams &p, double n0)
    {
        if (!(n0 > 0.0))
            throw config_error("pep_bound: n0 must be positive");
        const CMatrix phi = phi_matrix(delta, ch, p);
        const double paths = static_cast<double>(ch.paths.size());
        const Eigen::JacobiSVD<CMatrix> svd(phi);
        const auto &s = svd.singularValues();

        PepBound out;
        out.rank = numerical_rank(phi);
        double prod = 1.0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
        {
            out.singular_values.push_back(s[i]);
            if (i < out.rank)
            {
                out.bound /= 1.0 + s[i] * s[i] / (4.0 * paths * n0);
                prod *= s[i] * s[i] / (4.0 * paths * n0);
            }
        }
        out.high_snr = out.rank > 0 ? 1.0 / prod : 1.0;
        return out;
    }
}
