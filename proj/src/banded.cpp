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

#include "afdm/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afdm
{
    int SparseColumns::max_column_nnz() const
    {
        int m = 0;
        for (int c = 0; c < cols; ++c)
            m = std::max(m, nnz(c));
        return m;
    }

    CMatrix SparseColumns::dense() const
    {
        CMatrix m = CMatrix::Zero(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int k = col_start[c]; k < col_start[c + 1]; ++k)
                m(row[k], c) += value[k];
        return m;
    }

    CVector SparseColumns::multiply(const CVector &x) const
    {
        if (x.size() != cols)
            throw dimension_error("SparseColumns::multiply: length mismatch");
        CVector y = CVector::Zero(rows);
        for (int c = 0; c < cols; ++c)
            for (int k = col_start[c]; k < col_start[c + 1]; ++k)
                y[row[k]] += value[k] * x[c];
        return y;
    }

    CVector SparseColumns::adjoint_multiply(const CVector &y) const
    {
        if (y.size() != rows)
            throw dimension_error("SparseColumns::adjoint_multiply: length mismatch");
        CVector x(cols);
        for (int c = 0; c < cols; ++c)
        {
            cplx acc = 0.0;
            for (int k = col_start[c]; k < col_start[c + 1]; ++k)
                acc += std::conj(value[k]) * y[row[k]];
            x[c] = acc;
        }
        return x;
    }

    SparseColumns SparseColumns::from_dense(const CMatrix &m, double drop_below)
    {
        SparseColumns s;
        s.rows = static_cast<int>(m.rows());
        s.cols = static_cast<int>(m.cols());
        s.col_start.assign(1, 0);
        for (int c = 0; c < s.cols; ++c)
        {
            for (int r = 0; r < s.rows; ++r)
                if (std::abs(m(r, c)) > drop_below)
                {
                    s.row.push_back(r);
                    s.value.push_back(m(r, c));
                }
            s.col_start.push_back(static_cast<int>(s.row.size()));
        }
        return s;
    }

    HermitianBand::HermitianBand(int n, int bandwidth) : n_(n), kd_(std::clamp(bandwidth, 0, std::max(n - 1, 0)))
    {
        lower_.resize(kd_ + 1);
        for (int d = 0; d <= kd_; ++d)
            lower_[d].assign(n_ - d, cplx(0.0, 0.0));
    }

    int HermitianBand::gram_bandwidth(const SparseColumns &h)
    {
        // Columns j < k interact only if their row supports overlap.
        std::vector<int> first(h.cols, h.rows), last(h.cols, -1);
        for (int c = 0; c < h.cols; ++c)
            if (h.nnz(c) > 0)
            {
                first[c] = h.row[h.col_start[c]];
                last[c] = h.row[h.col_start[c + 1] - 1];
            }

        int bw = 0;
        for (int j = 0; j < h.cols; ++j)
            for (int k = h.cols - 1; k > j + bw; --k)
                if (first[k] <= last[j] && first[j] <= last[k])
                {
                    bw = k - j;
                    break;
                }
        return bw;
    }

    HermitianBand HermitianBand::gram(const SparseColumns &h, double shift)
    {
        const int bw = gram_bandwidth(h);
        HermitianBand g(h.cols, bw);
        for (int j = 0; j < h.cols; ++j)
        {
            for (int k = j; k <= std::min(h.cols - 1, j + bw); ++k)
            {
                // (H^H H)(k, j) = sum_r conj(H(r,k)) H(r,j); merge the sorted row lists
                cplx acc = 0.0;
                int a = h.col_start[k], b = h.col_start[j];
                while (a < h.col_start[k + 1] && b < h.col_start[j + 1])
                {
                    if (h.row[a] == h.row[b])
                        acc += std::conj(h.value[a]) * h.value[b], ++a, ++b;
                    else if (h.row[a] < h.row[b])
                        ++a;
                    else
                        ++b;
                }
                if (k == j)
                    acc += shift;
                g.lower_[k - j][j] = acc;
            }
        }
        return g;
    }

    cplx HermitianBand::at(int i, int j) const
    {
        if (i >= j)
            return (i - j <= kd_) ? lower_[i - j][j] : cplx(0.0, 0.0);
        return (j - i <= kd_) ? std::conj(lower_[j - i][i]) : cplx(0.0, 0.0);
    }

    void HermitianBand::add(int i, int j, cplx v)
    {
        if (i < j || i - j > kd_)
            throw dimension_error("HermitianBand::add: entry outside the stored lower band");
        lower_[i - j][j] += v;
    }

    CMatrix HermitianBand::dense() const
    {
        CMatrix m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                m(i, j) = at(i, j);
        return m;
    }

    CVector HermitianBand::strict_upper_multiply(const CVector &x) const
    {
        CVector y = CVector::Zero(n_);
        for (int d = 1; d <= kd_; ++d)
            for (int j = 0; j + d < n_; ++j)
                y[j] += std::conj(lower_[d][j]) * x[j + d]; // A(j, j+d)
        return y;
    }

    CVector HermitianBand::lower_solve(const CVector &b) const
    {
        CVector y(n_);
        for (int i = 0; i < n_; ++i)
        {
            cplx acc = b[i];
            for (int d = 1; d <= std::min(kd_, i); ++d)
                acc -= lower_[d][i - d] * y[i - d]; // A(i, i-d)
            y[i] = acc / lower_[0][i];
        }
        return y;
    }

    bool HermitianBand::factorize()
    {
        // Column-oriented banded Cholesky; G overwrites the lower band.
        for (int j = 0; j < n_; ++j)
        {
            double djj = lower_[0][j].real();
            for (int d = 1; d <= std::min(kd_, j); ++d)
                djj -= std::norm(lower_[d][j - d]);
            if (!(djj > 0.0))
                return false;
            const double gjj = std::sqrt(djj);
            lower_[0][j] = gjj;
            for (int i = j + 1; i <= std::min(n_ - 1, j + kd_); ++i)
            {
                cplx acc = lower_[i - j][j];
                // subtract sum_k G(i,k) conj(G(j,k)) over k < j inside both bands
                for (int k = std::max(0, i - kd_); k < j; ++k)
                    acc -= lower_[i - k][k] * std::conj(lower_[j - k][k]);
                lower_[i - j][j] = acc / gjj;
            }
        }
        factored_ = true;
        return true;
    }

    CVector HermitianBand::solve(const CVector &b) const
    {
        if (!factored_)
            throw std::logic_error("HermitianBand::solve called before factorize()");
        if (b.size() != n_)
            throw dimension_error("HermitianBand::solve: length mismatch");
        // G z = b
        CVector z = lower_solve(b);
        // G^H x = z
        CVector x(n_);
        for (int i = n_ - 1; i >= 0; --i)
        {
            cplx acc = z[i];
            for (int d = 1; d <= std::min(kd_, n_ - 1 - i); ++d)
                acc -= std::conj(lower_[d][i]) * x[i + d]; // G^H(i, i+d) = conj(G(i+d, i))
            x[i] = acc / lower_[0][i].real();
        }
        return x;
    }
}
