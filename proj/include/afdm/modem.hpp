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

#ifndef AFDM_MODEM_HPP
#define AFDM_MODEM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "afdm/daft.hpp"

namespace afdm
{
    enum class AlphabetKind
    {
        bpsk,
        qpsk,
        qam16
    };

    // Unit-average-energy constellation with Gray labelling. points[i] carries the label i,
    // bits written MSB first.
    class Alphabet
    {
    public:
        explicit Alphabet(AlphabetKind kind);

        AlphabetKind kind() const { return kind_; }
        int bits_per_symbol() const { return bits_; }
        int size() const { return static_cast<int>(points_.size()); }
        const std::vector<cplx> &points() const { return points_; }
        const std::string &name() const { return name_; }

        // Index of the nearest point (ties go to the lower index).
        int nearest(cplx z) const;
        cplx slice(cplx z) const { return points_[nearest(z)]; }

        // Distinct differences a - b over all point pairs, zero included.
        std::vector<cplx> difference_set() const;

    private:
        AlphabetKind kind_;
        int bits_ = 1;
        std::string name_;
        std::vector<cplx> points_;
    };

    AlphabetKind parse_alphabet(const std::string &name);

    std::vector<cplx> map_bits(std::span<const std::uint8_t> bits, const Alphabet &a);
    std::vector<std::uint8_t> demap_bits(std::span<const cplx> symbols, const Alphabet &a);

    enum class LayoutKind
    {
        data_only,
        zero_padded,
        embedded_pilot
    };

    // Where data, guards and the pilot sit inside one DAFT-domain frame of length n.
    //   data_only:      data on 0..n-1
    //   zero_padded:    q nulls; data on [q - shift, n - shift - 1] with shift = alpha_max + xi
    //   embedded_pilot: pilot at 0, nulls at 1..q and n-q..n-1, data on q+1..n-q-1
    struct FrameLayout
    {
        LayoutKind kind = LayoutKind::data_only;
        int n = 0;
        int q = 0;
        int shift = 0;

        static FrameLayout data_only(int n);
        static FrameLayout zero_padded(int n, int q, int shift);
        static FrameLayout embedded_pilot(int n, int q);

        bool has_pilot() const { return kind == LayoutKind::embedded_pilot; }
        int pilot_index() const { return 0; }
        int first_data() const;
        int data_capacity() const;
        std::vector<int> data_indices() const;
    };

    std::string to_string(LayoutKind kind);

    // Places data (and the pilot when the layout has one) into an n-long frame.
    CVector build_frame(std::span<const cplx> data, const FrameLayout &layout, cplx pilot = {0.0, 0.0});
    std::vector<cplx> extract_data(const CVector &frame, const FrameLayout &layout);

    // s = A^H x
    CVector modulate(const CVector &x, const DaftParams &p);
    // y = A r, r prefix-free
    CVector demodulate(const CVector &r, const DaftParams &p);

    // Chirp-periodic prefix: s[-k] = s[N-k] e^{-j2pi c1 (N^2 - 2Nk)} for k = 1..l_cp.
    CVector add_cpp(const CVector &s, int l_cp, double c1);
    CVector strip_cpp(const CVector &r, int l_cp);
}

#endif
