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

#ifndef AFDM_EFFECTIVE_HPP
#define AFDM_EFFECTIVE_HPP

#include <optional>
#include <vector>

#include "afdm/banded.hpp"
#include "afdm/channel.hpp"
#include "afdm/daft.hpp"
#include "afdm/modem.hpp"

namespace afdm
{
    // DAFT-domain matrix H_i = A Gamma_i Delta_i Pi^l A^H of one unit-gain path, kept as a
    // circular band: row p holds columns q = (p + center + m) mod N for m in [-lo, hi].
    //
    // With integer Doppler and integer 2Nc1 the band collapses to lo = hi = 0 and center is
    // loc = (alpha + 2Nc1 l) mod N. Otherwise the row is a Dirichlet kernel peaking near
    // q = p + nu + 2Nc1 l, and the band keeps the requested half-width around it.
    struct PathBand
    {
        int n = 0;
        int center = 0;
        int lo = 0;
        int hi = 0;
        std::vector<cplx> coeff; // n * width(), row-major

        int width() const { return lo + hi + 1; }
        int column(int p, int m) const { return ((p + center + m) % n + n) % n; }
        cplx at(int p, int m) const { return coeff[static_cast<std::size_t>(p) * width() + (m + lo)]; }
        bool is_single_tap() const { return width() == 1; }

        CMatrix dense() const;
    };

    // Closed-form entry H_i[p, q] of a unit-gain path (no band truncation).
    cplx heff_entry(const ChannelPath &path, const DaftParams &p, int row, int col);

    // Per-path sparse description. half_width = nullopt keeps every column (exact);
    // an integer truncates fractional paths to |q - (p + center)|_N <= half_width.
    PathBand heff_entries(const ChannelPath &path, const DaftParams &p, std::optional<int> half_width = std::nullopt);

    // A H A^H for any N x N time-domain matrix.
    CMatrix heff_from_time(const CMatrix &h, const DaftParams &p);

    struct EffectiveChannel
    {
        DaftParams params;
        std::vector<ChannelPath> paths;
        std::vector<PathBand> per_path; // exact (untruncated) bands
        CMatrix dense;                  // sum_i h_i H_i; empty when not requested
        int k_nu = 0;
        int xi_nu = 0;

        bool integer_structure() const;
        cplx entry(int row, int col) const; // sum over paths, from the closed form
    };

    EffectiveChannel build_effective(const LtvChannel &ch, const DaftParams &p, int k_nu = 0, int xi_nu = 0,
                                     bool with_dense = true);

    // loc = (alpha + 2Nc1 l) mod N. 2Nc1 must be within 1e-9 of an integer.
    int path_loc(int alpha, int l, const DaftParams &p);
    // 2Nc1 rounded to the nearest integer, after checking integrality.
    int chirp_step(const DaftParams &p);

    // (2 alpha_max + 1)/(2N) for integer Doppler, (2(alpha_max + xi) + 1)/(2N) for fractional.
    double choose_c1(int alpha_max, int xi_nu, int n, bool fractional);

    enum class C2Mode
    {
        irrational,    // nearest double to 1/(2 N pi)
        small_rational // 1/(4 N^2)
    };
    double choose_c2(int n, C2Mode mode = C2Mode::irrational);

    // Non-overlap condition for the DAFT-domain paths (k_nu = 0 for integer Doppler).
    bool check_separability(int l_max, int alpha_max, int k_nu, int n);

    // Q = (l_max + 1)(2(alpha_max + xi) + 1) - 1
    int guard_count(int l_max, int alpha_max, int xi_nu);

    // Smallest k such that the worst-case (over the fractional part) Dirichlet-kernel
    // magnitude at offset k + 1 is below threshold.
    int default_k_nu(int n, double threshold = 0.02);

    // Upper envelope (N-1)/N |cos theta| + 1/N on |H_i[p,q]| with theta = pi/N (p - q + loc + a).
    double envelope_bound(int n, double theta);

    // Truncated system: columns = data positions of the layout, rows = every
    // DAFT index except the pilot's estimation window. Each path contributes the entries
    // with |q - (p + center)|_N <= half_width; nullopt keeps the exact rows.
    struct BandedSystem
    {
        SparseColumns h;
        std::vector<int> x_index; // column -> DAFT index
        std::vector<int> y_index; // row -> DAFT index
        int half_width = 0;
    };

    // Rows carrying the pilot response for an embedded-pilot layout.
    std::vector<int> estimation_rows(const FrameLayout &layout, int alpha_max, int xi_nu);

    BandedSystem band_truncate(const EffectiveChannel &heff, const FrameLayout &layout, std::optional<int> half_width,
                               int alpha_max);
    // Uses half_width = xi_nu for fractional channels and 0 for integer ones.
    BandedSystem band_truncate(const EffectiveChannel &heff, const FrameLayout &layout, int alpha_max);
}

#endif
