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

#ifndef AFDM_BANDED_HPP
#define AFDM_BANDED_HPP

#include <vector>

#include "afdm/types.hpp"

namespace afdm
{
    // Column-compressed complex matrix. Row indices inside a column are strictly increasing.
    struct SparseColumns
    {
        int rows = 0;
        int cols = 0;
        std::vector<int> col_start{0}; // cols + 1 entries
        std::vector<int> row;
        std::vector<cplx> value;

        int nnz(int col) const { return col_start[col + 1] - col_start[col]; }
        int max_column_nnz() const;

        CMatrix dense() const;
        CVector multiply(const CVector &x) const;         // H x
        CVector adjoint_multiply(const CVector &y) const; // H^H y

        static SparseColumns from_dense(const CMatrix &m, double drop_below = 0.0);
    };

    // Hermitian matrix with `bandwidth` sub-diagonals, stored by diagonals of the lower
    // triangle: lower[d][j] = A(j + d, j).
    class HermitianBand
    {
    public:
        HermitianBand() = default;
        HermitianBand(int n, int bandwidth);

        // H^H H + shift * I for a column-sparse H.
        static HermitianBand gram(const SparseColumns &h, double shift);
        // Number of sub-diagonals gram(h, .) would need.
        static int gram_bandwidth(const SparseColumns &h);

        int size() const { return n_; }
        int bandwidth() const { return kd_; }

        cplx at(int i, int j) const; // any (i, j); zero outside the band
        void add(int i, int j, cplx v); // i >= j, inside the band

        CMatrix dense() const;

        // y = (strict upper part) * x
        CVector strict_upper_multiply(const CVector &x) const;
        // Solves (lower part incl. diagonal) * y = b by forward substitution.
        CVector lower_solve(const CVector &b) const;

        // In-place banded Cholesky (A = G G^H); returns false if A is not positive definite.
        bool factorize();
        CVector solve(const CVector &b) const; // after factorize()

    private:
        int n_ = 0;
        int kd_ = 0;
        std::vector<std::vector<cplx>> lower_;
        bool factored_ = false;
    };
}

#endif
