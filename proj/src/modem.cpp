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

#include "afdm/modem.hpp"

#include <algorithm>
#include <cmath>

namespace afdm
{
    namespace
    {
        // Gray-labelled 4-PAM levels indexed by the 2-bit label.
        constexpr double pam4[4] = {-3.0, -1.0, 3.0, 1.0}; // 00, 01, 10, 11
    }

    Alphabet::Alphabet(AlphabetKind kind) : kind_(kind)
    {
        switch (kind)
        {
        case AlphabetKind::bpsk:
            bits_ = 1;
            name_ = "bpsk";
            points_ = {{1.0, 0.0}, {-1.0, 0.0}};
            break;
        case AlphabetKind::qpsk:
        {
            bits_ = 2;
            name_ = "qpsk";
            const double s = 1.0 / std::sqrt(2.0);
            for (int label = 0; label < 4; ++label)
            {
                const double re = (label & 2) ? -s : s;
                const double im = (label & 1) ? -s : s;
                points_.emplace_back(re, im);
            }
            break;
        }
        case AlphabetKind::qam16:
        {
            bits_ = 4;
            name_ = "16qam";
            const double s = 1.0 / std::sqrt(10.0);
            for (int label = 0; label < 16; ++label)
                points_.emplace_back(s * pam4[label >> 2], s * pam4[label & 3]);
            break;
        }
        }
    }

    int Alphabet::nearest(cplx z) const
    {
        int best = 0;
        double best_d = std::norm(z - points_[0]);
        for (int i = 1; i < size(); ++i)
        {
            const double d = std::norm(z - points_[i]);
            if (d < best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::vector<cplx> Alphabet::difference_set() const
    {
        std::vector<cplx> diffs;
        for (const auto &a : points_)
            for (const auto &b : points_)
            {
                const cplx d = a - b;
                const bool seen = std::any_of(diffs.begin(), diffs.end(),
                                              [&](const cplx &e) { return std::abs(e - d) < 1e-12; });
                if (!seen)
                    diffs.push_back(d);
            }
        return diffs;
    }

    AlphabetKind parse_alphabet(const std::string &name)
    {
        if (name == "bpsk" || name == "BPSK")
            return AlphabetKind::bpsk;
        if (name == "qpsk" || name == "QPSK")
            return AlphabetKind::qpsk;
        if (name == "16qam" || name == "16QAM" || name == "qam16")
            return AlphabetKind::qam16;
        throw config_error("unknown alphabet '" + name + "'");
    }

    std::vector<cplx> map_bits(std::span<const std::uint8_t> bits, const Alphabet &a)
    {
        const int b = a.bits_per_symbol();
        if (bits.size() % static_cast<std::size_t>(b) != 0)
            throw dimension_error("map_bits: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                                  std::to_string(b));
        std::vector<cplx> out(bits.size() / b);
        for (std::size_t k = 0; k < out.size(); ++k)
        {
            int label = 0;
            for (int j = 0; j < b; ++j)
                label = (label << 1) | (bits[k * b + j] & 1);
            out[k] = a.points()[label];
        }
        return out;
    }

    std::vector<std::uint8_t> demap_bits(std::span<const cplx> symbols, const Alphabet &a)
    {
        const int b = a.bits_per_symbol();
        std::vector<std::uint8_t> bits(symbols.size() * b);
        for (std::size_t k = 0; k < symbols.size(); ++k)
        {
            const int label = a.nearest(symbols[k]);
            for (int j = 0; j < b; ++j)
                bits[k * b + j] = static_cast<std::uint8_t>((label >> (b - 1 - j)) & 1);
        }
        return bits;
    }

    FrameLayout FrameLayout::data_only(int n)
    {
        if (n < 1)
            throw config_error("FrameLayout: n must be >= 1");
        return {LayoutKind::data_only, n, 0, 0};
    }

    FrameLayout FrameLayout::zero_padded(int n, int q, int shift)
    {
        if (q < 0 || shift < 0 || shift > q || q >= n)
            throw config_error("FrameLayout: zero-padded layout needs 0 <= shift <= q < n");
        return {LayoutKind::zero_padded, n, q, shift};
    }

    FrameLayout FrameLayout::embedded_pilot(int n, int q)
    {
        if (q < 0 || 2 * q + 1 >= n)
            throw config_error("FrameLayout: embedded-pilot layout needs 2q + 1 < n (n = " + std::to_string(n) +
                               ", q = " + std::to_string(q) + ")");
        return {LayoutKind::embedded_pilot, n, q, 0};
    }

    int FrameLayout::first_data() const
    {
        switch (kind)
        {
        case LayoutKind::data_only:
            return 0;
        case LayoutKind::zero_padded:
            return q - shift;
        case LayoutKind::embedded_pilot:
            return q + 1;
        }
        return 0;
    }

    int FrameLayout::data_capacity() const
    {
        switch (kind)
        {
        case LayoutKind::data_only:
            return n;
        case LayoutKind::zero_padded:
            return n - q;
        case LayoutKind::embedded_pilot:
            return n - 2 * q - 1;
        }
        return 0;
    }

    std::vector<int> FrameLayout::data_indices() const
    {
        std::vector<int> idx(data_capacity());
        for (int k = 0; k < data_capacity(); ++k)
            idx[k] = first_data() + k;
        return idx;
    }

    std::string to_string(LayoutKind kind)
    {
        switch (kind)
        {
        case LayoutKind::data_only:
            return "data-only";
        case LayoutKind::zero_padded:
            return "zero-padded";
        case LayoutKind::embedded_pilot:
            return "embedded-pilot";
        }
        return "?";
    }

    CVector build_frame(std::span<const cplx> data, const FrameLayout &layout, cplx pilot)
    {
        if (static_cast<int>(data.size()) != layout.data_capacity())
            throw dimension_error("build_frame: expected " + std::to_string(layout.data_capacity()) +
                                  " data symbols, got " + std::to_string(data.size()));
        CVector x = CVector::Zero(layout.n);
        const int first = layout.first_data();
        for (std::size_t k = 0; k < data.size(); ++k)
            x[first + static_cast<int>(k)] = data[k];
        if (layout.has_pilot())
            x[layout.pilot_index()] = pilot;
        return x;
    }

    std::vector<cplx> extract_data(const CVector &frame, const FrameLayout &layout)
    {
        if (frame.size() != layout.n)
            throw dimension_error("extract_data: frame length does not match layout");
        std::vector<cplx> data(layout.data_capacity());
        for (int k = 0; k < layout.data_capacity(); ++k)
            data[k] = frame[layout.first_data() + k];
        return data;
    }

    CVector modulate(const CVector &x, const DaftParams &p)
    {
        return idaft(x, p);
    }

    CVector demodulate(const CVector &r, const DaftParams &p)
    {
        return daft(r, p);
    }

    CVector add_cpp(const CVector &s, int l_cp, double c1)
    {
        const int n = static_cast<int>(s.size());
        if (l_cp < 0 || l_cp >= n)
            throw config_error("add_cpp: prefix length must lie in [0, n)");
        const double nd = static_cast<double>(n);
        CVector out(n + l_cp);
        for (int k = 1; k <= l_cp; ++k)
        {
            // time index -k
            const double t = -static_cast<double>(k);
            out[l_cp - k] = s[n - k] * unit_phasor(cycles_mod1(c1, nd * nd + 2.0 * nd * t));
        }
        out.tail(n) = s;
        return out;
    }

    CVector strip_cpp(const CVector &r, int l_cp)
    {
        if (l_cp < 0 || l_cp > r.size())
            throw dimension_error("strip_cpp: prefix longer than the block");
        return r.tail(r.size() - l_cp);
    }
}
