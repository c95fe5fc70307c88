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

#include "afdm/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "afdm/rng.hpp"

namespace afdm
{
    void DfeConfig::validate() const
    {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw config_error("DfeConfig: gamma must be a positive finite number");
        if (n_iter < 1)
            throw config_error("DfeConfig: n_iter must be >= 1");
    }

    namespace
    {
        double residual_energy(const CVector &y, const SparseColumns &h, const std::vector<cplx> &x)
        {
            CVector r = y;
            for (int c = 0; c < h.cols; ++c)
                for (int k = h.col_start[c]; k < h.col_start[c + 1]; ++k)
                    r[h.row[k]] -= h.value[k] * x[c];
            return r.squaredNorm();
        }
    }

    namespace
    {
        // Depth-first search over columns 0..cols-1. Row r enters the metric once its last
        // non-zero column is fixed; `base` is the energy of rows that depend on no column.
        void tree_search(const CVector &y, const SparseColumns &h, const std::vector<cplx> &pts, double base,
                         std::vector<cplx> &best_x, double &best)
        {
            const int cols = h.cols;
            const int m = static_cast<int>(pts.size());
            std::vector<int> last(h.rows, -1);
            for (int c = 0; c < cols; ++c)
                for (int k = h.col_start[c]; k < h.col_start[c + 1]; ++k)
                    last[h.row[k]] = std::max(last[h.row[k]], c);
            std::vector<std::vector<int>> closes(cols);
            for (int r = 0; r < h.rows; ++r)
            {
                if (last[r] < 0)
                    base += std::norm(y[r]);
                else
                    closes[last[r]].push_back(r);
            }

            CVector r = y;
            std::vector<int> idx(cols, -1);
            std::vector<double> metric(cols + 1, base);
            auto apply = [&](int c, cplx s) {
                for (int k = h.col_start[c]; k < h.col_start[c + 1]; ++k)
                    r[h.row[k]] -= h.value[k] * s;
            };

            int depth = 0;
            while (depth >= 0)
            {
                if (idx[depth] >= 0)
                    apply(depth, -pts[idx[depth]]);
                if (++idx[depth] == m)
                {
                    idx[depth] = -1;
                    --depth;
                    continue;
                }
                apply(depth, pts[idx[depth]]);
                double mtr = metric[depth];
                for (int row : closes[depth])
                    mtr += std::norm(r[row]);
                if (mtr >= best)
                    continue;
                if (depth == cols - 1)
                {
                    best = mtr;
                    for (int c = 0; c < cols; ++c)
                        best_x[c] = pts[idx[c]];
                    continue;
                }
                metric[depth + 1] = mtr;
                ++depth;
            }
        }
    }

    std::vector<cplx> ml_detect(const CVector &y, const SparseColumns &h, const Alphabet &a, std::uint64_t budget)
    {
        if (y.size() != h.rows)
            throw dimension_error("ml_detect: observation length does not match the channel rows");
        const int cols = h.cols;
        const int m = a.size();

        std::uint64_t count = 1;
        for (int c = 0; c < cols; ++c)
        {
            if (count > budget / static_cast<std::uint64_t>(m))
                throw capacity_error("ml_detect: " + std::to_string(m) + "^" + std::to_string(cols) +
                                     " candidates exceed the enumeration budget of " + std::to_string(budget));
            count *= static_cast<std::uint64_t>(m);
        }
        if (cols == 0)
            return {};

        // Incumbent: sliced regularised least squares.
        std::vector<cplx> inc(cols);
        {
            const CVector soft = lmmse_detect(y, h, 1e4);
            for (int c = 0; c < cols; ++c)
                inc[c] = a.slice(soft[c]);
        }

        if (h.rows < cols)
        {
            double best = residual_energy(y, h, inc);
            tree_search(y, h, a.points(), 0.0, inc, best);
            return inc;
        }

        // ||y - Hx||^2 = ||Q^H y - R x||^2 + const. Reversing the order of R's rows and columns
        // makes row r depend on columns 0..r only, so every level of the search closes a row.
        const CMatrix hd = h.dense();
        const Eigen::HouseholderQR<CMatrix> qr(hd);
        const CVector qy = qr.householderQ().adjoint() * y;
        const CMatrix rr = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        const double tail = std::max(0.0, y.squaredNorm() - qy.head(cols).squaredNorm());

        SparseColumns tri;
        tri.rows = tri.cols = cols;
        tri.col_start.assign(1, 0);
        for (int c = 0; c < cols; ++c)
        {
            const int src = cols - 1 - c;
            for (int r = c; r < cols; ++r)
            {
                // row r of the reversed system is row cols-1-r of R
                const cplx v = rr(cols - 1 - r, src);
                if (v != cplx(0.0, 0.0))
                {
                    tri.row.push_back(r);
                    tri.value.push_back(v);
                }
            }
            tri.col_start.push_back(static_cast<int>(tri.row.size()));
        }
        CVector ty(cols);
        for (int r = 0; r < cols; ++r)
            ty[r] = qy[cols - 1 - r];

        std::vector<cplx> rev(inc.rbegin(), inc.rend());
        double best = residual_energy(ty, tri, rev) + tail;
        tree_search(ty, tri, a.points(), tail, rev, best);
        return std::vector<cplx>(rev.rbegin(), rev.rend());
    }

    std::vector<cplx> ml_detect(const CVector &y, const EffectiveChannel &heff, const Alphabet &a,
                                const FrameLayout &layout, std::uint64_t budget)
    {
        const int n = heff.params.n;
        if (y.size() != n || layout.n != n)
            throw dimension_error("ml_detect: frame length mismatch");
        SparseColumns h;
        h.rows = n;
        h.col_start.assign(1, 0);
        const CMatrix dense = heff.dense.size() ? heff.dense : CMatrix();
        for (int q : layout.data_indices())
        {
            for (int p = 0; p < n; ++p)
            {
                const cplx v = dense.size() ? dense(p, q) : heff.entry(p, q);
                if (v != cplx(0.0, 0.0))
                {
                    h.row.push_back(p);
                    h.value.push_back(v);
                }
            }
            h.col_start.push_back(static_cast<int>(h.row.size()));
            ++h.cols;
        }
        return ml_detect(y, h, a, budget);
    }

    LmmseSystem::LmmseSystem(const SparseColumns &h) : h_(&h)
    {
        banded_ = h.cols > 0 && 4 * HermitianBand::gram_bandwidth(h) <= h.cols;
        if (banded_)
            band_ = HermitianBand::gram(h, 0.0);
        else
        {
            const CMatrix hd = h.dense();
            gram_ = hd.adjoint() * hd;
        }
    }

    CVector LmmseSystem::solve(const CVector &y, double gamma) const
    {
        if (!(gamma > 0.0))
            throw config_error("lmmse_detect: gamma must be positive");
        if (y.size() != h_->rows)
            throw dimension_error("lmmse_detect: observation length does not match the channel rows");
        const CVector rhs = h_->adjoint_multiply(y);
        if (h_->cols == 0)
            return rhs;
        if (banded_)
        {
            HermitianBand g = band_;
            for (int k = 0; k < g.size(); ++k)
                g.add(k, k, 1.0 / gamma);
            if (g.factorize())
                return g.solve(rhs);
        }
        CMatrix r = banded_ ? band_.dense() : gram_;
        r.diagonal().array() += 1.0 / gamma;
        return r.llt().solve(rhs);
    }

    CVector lmmse_detect(const CVector &y, const SparseColumns &h, double gamma)
    {
        return LmmseSystem(h).solve(y, gamma);
    }

    std::vector<double> column_energy(const SparseColumns &h)
    {
        std::vector<double> d(h.cols, 0.0);
        for (int c = 0; c < h.cols; ++c)
            for (int k = h.col_start[c]; k < h.col_start[c + 1]; ++k)
                d[c] += std::norm(h.value[k]);
        return d;
    }

    DetectionResult mrc_dfe_detect(const CVector &y, const SparseColumns &h, const DfeConfig &cfg)
    {
        cfg.validate();
        if (y.size() != h.rows)
            throw dimension_error("mrc_dfe_detect: observation length does not match the channel rows");
        const int cols = h.cols;
        const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-6 * std::sqrt(static_cast<double>(cols));
        const double reg = 1.0 / cfg.gamma;
        const std::vector<double> d = column_energy(h);
        // orthogonal columns: the first sweep is already the exact solution
        const bool diagonal = HermitianBand::gram_bandwidth(h) == 0;

        DetectionResult res;
        res.symbols = CVector::Zero(cols);
        res.residual = y;
        CVector &x = res.symbols;
        CVector &dy = res.residual;

        for (int it = 1; it <= cfg.n_iter; ++it)
        {
            double delta2 = 0.0;
            for (int c = 0; c < cols; ++c)
            {
                const int b = h.col_start[c], e = h.col_start[c + 1];
                cplx g = d[c] * x[c];
                for (int k = b; k < e; ++k)
                    g += std::conj(h.value[k]) * dy[h.row[k]];
                const cplx est = g / (d[c] + reg);
                const cplx diff = est - x[c];
                for (int k = b; k < e; ++k)
                    dy[h.row[k]] -= h.value[k] * diff;
                x[c] = est;
                delta2 += std::norm(diff);
                // L multiplies and 3L + 1 additions for combining, weighting and feedback
                res.op_count += 5 * static_cast<std::int64_t>(e - b) + 1;
            }
            res.iterations_used = it;
            res.final_delta = std::sqrt(delta2);
            if (res.final_delta < eps || diagonal)
                break;
        }
        return res;
    }

    DetectionResult mrc_dfe_detect(const CVector &y, const SparseColumns &h, const DfeConfig &cfg, const Alphabet &a)
    {
        DetectionResult res = mrc_dfe_detect(y, h, cfg);
        res.hard.resize(res.symbols.size());
        for (Eigen::Index c = 0; c < res.symbols.size(); ++c)
            res.hard[c] = a.slice(res.symbols[c]);
        return res;
    }

    CMatrix gauss_seidel_operator(const SparseColumns &h, double gamma)
    {
        const CMatrix hd = h.dense();
        CMatrix r = hd.adjoint() * hd;
        r.diagonal().array() += 1.0 / gamma;
        const CMatrix s = r.triangularView<Eigen::Lower>();
        const CMatrix u = r.triangularView<Eigen::StrictlyUpper>();
        return -s.triangularView<Eigen::Lower>().solve(u);
    }

    double spectral_radius(const SparseColumns &h, double gamma)
    {
        if (!(gamma > 0.0))
            throw config_error("spectral_radius: gamma must be positive");
        const int n = h.cols;
        if (n <= 1)
            return 0.0;
        const HermitianBand r = HermitianBand::gram(h, 1.0 / gamma);
        if (r.bandwidth() == 0)
            return 0.0;
        auto op = [&](const CVector &v) -> CVector { return -r.lower_solve(r.strict_upper_multiply(v)); };

        SeededRng rng(0x5eed);
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v[i] = rng.complex_normal(1.0);
        v.normalize();

        double rho = 0.0;
        for (int it = 0; it < 50; ++it)
        {
            CVector w = op(v);
            const double nw = w.norm();
            if (nw == 0.0)
                return 0.0;
            rho = nw;
            v = w / nw;
        }

        // Restarted Arnoldi: the largest-modulus Ritz value of the Krylov space seeded by v.
        const int m = std::min(n, 40);
        double prev = -1.0;
        for (int restart = 0; restart < 100; ++restart)
        {
            CMatrix basis = CMatrix::Zero(n, m + 1);
            CMatrix hess = CMatrix::Zero(m + 1, m);
            basis.col(0) = v;
            int k = 0;
            for (; k < m; ++k)
            {
                CVector w = op(basis.col(k));
                for (int pass = 0; pass < 2; ++pass)
                    for (int i = 0; i <= k; ++i)
                    {
                        const cplx c = basis.col(i).dot(w);
                        hess(i, k) += c;
                        w -= c * basis.col(i);
                    }
                const double nw = w.norm();
                hess(k + 1, k) = nw;
                if (nw < 1e-13 * std::max(1.0, hess.col(k).head(k + 1).norm()))
                {
                    ++k;
                    break;
                }
                basis.col(k + 1) = w / nw;
            }
            const Eigen::ComplexEigenSolver<CMatrix> es(hess.topLeftCorner(k, k));
            Eigen::Index best = 0;
            es.eigenvalues().cwiseAbs().maxCoeff(&best);
            rho = std::abs(es.eigenvalues()[best]);
            if (k < m || std::abs(rho - prev) <= 1e-14 * std::max(1.0, rho))
                break;
            prev = rho;
            v = (basis.leftCols(k) * es.eigenvectors().col(best)).normalized();
        }
        return rho;
    }
}
