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

#ifndef AFDM_ESTIMATE_HPP
#define AFDM_ESTIMATE_HPP

#include <vector>

#include "afdm/channel.hpp"
#include "afdm/effective.hpp"
#include "afdm/modem.hpp"

namespace afdm
{
    struct PathEstimate
    {
        int delay = 0;
        int doppler_int = 0;
        double doppler_frac = 0.0; // in (-1/2, 1/2]
        cplx gain{0.0, 0.0};

        double doppler() const { return doppler_int + doppler_frac; }
    };

    // Received samples carrying the pilot response: rows [0, alpha_max + xi] and
    // [n - q + alpha_max + xi, n - 1] of an embedded-pilot frame.
    struct EstimationWindow
    {
        DaftParams params;
        FrameLayout layout;
        int alpha_max = 0;
        int xi_nu = 0;
        cplx pilot{1.0, 0.0};
        std::vector<int> rows; // window position -> DAFT index
        CVector y;
    };

    EstimationWindow extract_window(const CVector &y, const FrameLayout &layout, const DaftParams &p, int alpha_max,
                                    int xi_nu, cplx pilot);

    // First column of the unit-gain path matrix restricted to the window rows.
    CVector pilot_column(int delay, double doppler, const DaftParams &p, const EstimationWindow &w);

    // Peak picking over the admissible (delay, integer Doppler) grid. Throws estimation_error
    // when two grid points share a DAFT position.
    std::vector<PathEstimate> estimate_integer(const EstimationWindow &w, int paths, int l_max, int alpha_max);

    // Greedy per-delay matched filter for (delay, integer Doppler), per-path grid search of the
    // fractional part with the given step, then the joint least-squares gains. Paths are
    // assumed to have distinct delays. Throws estimation_error on a singular gain system.
    // Each refinement pass re-searches every path's Doppler within one bin of its current
    // value after cancelling the other paths, then re-solves the gains; passes stop early
    // once no Doppler moves. refine_passes = 0 gives the plain three-step estimate.
    std::vector<PathEstimate> estimate_fractional(const EstimationWindow &w, int paths, int l_max, int alpha_max,
                                                  double grid_resolution = 1.0 / 64.0, int refine_passes = 8);

    // Least-squares gains for fixed (delay, Doppler) pairs.
    std::vector<cplx> solve_gains(const EstimationWindow &w, const std::vector<PathEstimate> &paths);

    LtvChannel to_channel(const std::vector<PathEstimate> &paths, int n);

    // Normalised matched-filter score |c^H y|^2 / ||c||^2 of one candidate path.
    double path_score(const CVector &column, const CVector &y);
}

#endif
