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

#ifndef AFDM_DETECT_HPP
#define AFDM_DETECT_HPP

#include <cstdint>
#include <vector>

#include "afdm/banded.hpp"
#include "afdm/effective.hpp"
#include "afdm/modem.hpp"

namespace afdm
{
    struct DfeConfig
    {
        double gamma = 1.0;   // linear SNR
        int n_iter = 20;
        double epsilon = 0.0; // <= 0 selects 1e-6 * sqrt(number of unknowns)

        void validate() const;
    };

    struct DetectionResult
    {
        CVector symbols;        // soft estimates
        std::vector<cplx> hard; // symbols sliced to the alphabet (empty when none was given)
        int iterations_used = 0;
        std::int64_t op_count = 0;
        double final_delta = 0.0; // ||x(n) - x(n-1)|| of the last iteration
        CVector residual;         // y - H x maintained incrementally
    };

    inline constexpr std::uint64_t default_ml_budget = std::uint64_t{1} << 24;

    // argmin_x ||y - H x||^2 over x in A^cols. Depth-first over the columns in index order;
    // a branch is abandoned once the residual energy of the rows it has already fixed reaches
    // the best complete metric. Throws capacity_error when |A|^cols exceeds the budget.
    std::vector<cplx> ml_detect(const CVector &y, const SparseColumns &h, const Alphabet &a,
                                std::uint64_t budget = default_ml_budget);

    // Convenience form on the full effective channel: columns are the data positions of the
    // layout, rows are all n DAFT indices. Any pilot contribution must already be removed from y.
    std::vector<cplx> ml_detect(const CVector &y, const EffectiveChannel &heff, const Alphabet &a,
                                const FrameLayout &layout, std::uint64_t budget = default_ml_budget);

    // Exact solution of (H^H H + I/gamma) x = H^H y. Banded Cholesky when the Gram matrix is
    // narrow, dense Cholesky otherwise.
    CVector lmmse_detect(const CVector &y, const SparseColumns &h, double gamma);

    // Keeps H^H H so several SNR points of one channel share the Gram product.
    class LmmseSystem
    {
    public:
        explicit LmmseSystem(const SparseColumns &h);
        CVector solve(const CVector &y, double gamma) const;
        bool banded() const { return banded_; }

    private:
        const SparseColumns *h_;
        bool banded_ = false;
        HermitianBand band_;
        CMatrix gram_;
    };

    // Weighted MRC decision-feedback iteration (Gauss-Seidel on the regularised normal equations).
    DetectionResult mrc_dfe_detect(const CVector &y, const SparseColumns &h, const DfeConfig &cfg);
    DetectionResult mrc_dfe_detect(const CVector &y, const SparseColumns &h, const DfeConfig &cfg, const Alphabet &a);

    // Per-column combining weights d_k = sum_q |H[q,k]|^2.
    std::vector<double> column_energy(const SparseColumns &h);

    // rho(-S^{-1} U) for R = H^H H + I/gamma = S + U, S lower triangular incl. diagonal.
    // Power iteration on the Gauss-Seidel operator, refined by restarted Arnoldi steps.
    double spectral_radius(const SparseColumns &h, double gamma);

    // Dense reference: largest eigenvalue modulus of the same operator.
    CMatrix gauss_seidel_operator(const SparseColumns &h, double gamma);
}

#endif
