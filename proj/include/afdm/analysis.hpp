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

#ifndef AFDM_ANALYSIS_HPP
#define AFDM_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "afdm/channel.hpp"
#include "afdm/modem.hpp"

namespace afdm
{
    // N x P matrix whose column i is H_i delta, H_i the unit-gain DAFT-domain matrix of path i.
    CMatrix phi_matrix(const CVector &delta, const LtvChannel &ch, const DaftParams &p);

    // Singular values above rel_tol * sigma_max.
    int numerical_rank(const CMatrix &m, double rel_tol = 1e-8);

    struct RankSearch
    {
        int min_rank = 0;
        std::uint64_t evaluated = 0;
        bool exhaustive = false;
        CVector worst_delta; // a difference vector attaining min_rank
    };

    // Minimum rank of phi_matrix over non-zero difference vectors. Every vector over the
    // difference set is enumerated when that takes at most `budget` evaluations; otherwise
    // `budget` random pairs of distinct frames are drawn from the seed.
    RankSearch min_rank_over_deltas(const LtvChannel &ch, const DaftParams &p, const Alphabet &a,
                                    std::uint64_t budget, std::uint64_t seed = 1);

    struct PepBound
    {
        double bound = 1.0;    // prod_l 1 / (1 + lambda_l^2 / (4 P N0))
        double high_snr = 0.0; // N0^r / prod_l (lambda_l^2 / (4 P)), r = numerical rank
        int rank = 0;
        std::vector<double> singular_values;
    };

    PepBound pep_bound(const CVector &delta, const LtvChannel &ch, const DaftParams &p, double n0);
}

#endif
