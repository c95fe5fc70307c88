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

#ifndef AFDM_CHANNEL_HPP
#define AFDM_CHANNEL_HPP

#include <vector>

#include "afdm/daft.hpp"
#include "afdm/rng.hpp"

namespace afdm
{
    // One propagation path: complex gain, integer delay in samples, and Doppler normalised to
    // the subcarrier spacing (nu = N f = alpha + a with -1/2 < a <= 1/2).
    struct ChannelPath
    {
        cplx gain{1.0, 0.0};
        int delay = 0;
        double doppler = 0.0;

        int doppler_int() const;     // alpha
        double doppler_frac() const; // a
    };

    struct LtvChannel
    {
        std::vector<ChannelPath> paths;
        int n = 0; // frame length the channel was drawn for

        int max_delay() const;
        double max_abs_doppler() const;
    };

    enum class DopplerMode
    {
        integer_uniform, // alpha uniform on {-alpha_max..alpha_max}
        jakes,           // alpha_max * cos(theta), theta ~ U[-pi, pi]
        fixed            // caller-supplied
    };

    // Policy for random_channel(). Delays are 0..P-1 unless `delays` is given.
    struct ChannelSpec
    {
        int paths = 1;
        int l_max = 0;
        int alpha_max = 0;
        DopplerMode doppler_mode = DopplerMode::integer_uniform;
        std::vector<int> delays;      // optional fixed taps (length == paths)
        std::vector<double> dopplers; // required for DopplerMode::fixed
        std::vector<cplx> gains;      // optional fixed gains; otherwise CN(0, 1/P)
    };

    LtvChannel random_channel(const ChannelSpec &spec, int n, SeededRng &rng);

    // Streams a CPP-extended block through the channel. Sample m of `s` is time index
    // m - l_cp; samples before the block start are taken as zero. Noise CN(0, noise_var)
    // is drawn per output sample when noise_var > 0.
    CVector apply_channel(const CVector &s, int l_cp, const LtvChannel &ch, double noise_var, SeededRng &rng);
    CVector apply_channel(const CVector &s, int l_cp, const LtvChannel &ch);

    // H = sum_i h_i Gamma_CPP_i Delta_f_i Pi^{l_i}, acting on the prefix-stripped block.
    CMatrix time_channel_matrix(const LtvChannel &ch, const DaftParams &p);

    // Diagonal of Gamma_CPP for a path with the given delay.
    CVector cpp_gamma(int delay, const DaftParams &p);

    CVector awgn(int length, double noise_var, SeededRng &rng);
}

#endif
