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

#ifndef AFDM_CONFIG_HPP
#define AFDM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afdm/channel.hpp"
#include "afdm/effective.hpp"
#include "afdm/modem.hpp"

namespace afdm
{
    enum class Waveform
    {
        afdm,
        ofdm,
        ocdm
    };

    enum class DetectorKind
    {
        ml,
        lmmse,
        mrc_dfe
    };

    enum class EstimationMode
    {
        ideal_csi,
        integer,
        fractional
    };

    enum class LayoutChoice
    {
        automatic,
        data_only,
        zero_padded,
        embedded_pilot
    };

    inline constexpr int band_auto = -2;  // exact for ml/lmmse, xi for mrc-dfe
    inline constexpr int band_exact = -1; // keep every non-zero

    // One experiment. Text form: `key = value` lines, `#` comments, lists comma-separated.
    struct SimConfig
    {
        int schema_version = 1;
        Waveform waveform = Waveform::afdm;
        int n = 16;
        AlphabetKind alphabet = AlphabetKind::bpsk;
        DetectorKind detector = DetectorKind::ml;

        int paths = 2;
        int l_max = 1;
        int alpha_max = 1;
        DopplerMode doppler = DopplerMode::integer_uniform;
        std::vector<int> delays;      // empty: 0..paths-1
        std::vector<double> dopplers; // doppler = fixed only
        std::vector<cplx> gains;      // empty: CN(0, 1/paths); values like 1, 0.5-0.2j
        std::optional<bool> fractional; // unset: true for jakes or non-integer fixed Dopplers

        std::vector<double> snr_db{0.0, 5.0, 10.0};
        double snr_p_db = 35.0;
        std::uint64_t trials = 1000;
        std::uint64_t seed = 1;

        std::optional<int> xi_nu; // unset: 1 for fractional runs, 0 otherwise
        std::optional<int> k_nu;  // unset: default_k_nu(n)
        EstimationMode estimation = EstimationMode::ideal_csi;
        double grid_resolution = 1.0 / 64.0;
        int refine_passes = 8; // fractional estimator only

        int n_iter = 20;
        double epsilon = 0.0; // <= 0: 1e-6 sqrt(data symbols)
        C2Mode c2_mode = C2Mode::irrational;
        LayoutChoice layout = LayoutChoice::automatic;
        int band_width = band_auto;

        std::uint64_t ml_budget = std::uint64_t{1} << 24;
        std::uint64_t rank_budget = std::uint64_t{1} << 20;

        bool is_fractional() const;
        int xi() const;
        int kv() const;
        double c1() const;
        double c2() const;
        DaftParams params() const;
        int guards() const; // guard_count(l_max, alpha_max, xi)
        FrameLayout frame_layout() const;
        ChannelSpec channel_spec() const;
        Alphabet constellation() const { return Alphabet(alphabet); }
        // Band half-width handed to band_truncate; nullopt keeps the exact columns.
        std::optional<int> detection_band() const;

        // Cross-field checks; throws config_error.
        void validate() const;

        // Stable text form: every key in a fixed order, doubles at round-trip precision.
        std::string canonical() const;
        std::uint64_t hash() const;
        std::string hash_hex() const;
    };

    SimConfig parse_config(const std::string &text);
    SimConfig load_config(const std::string &path);

    std::string to_string(Waveform w);
    std::string to_string(DetectorKind d);
    std::string to_string(EstimationMode e);
    std::string to_string(DopplerMode d);

    // 64-bit FNV-1a.
    std::uint64_t fnv1a64(const std::string &bytes);
}

#endif
