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

#include <catch2/catch_amalgamated.hpp>

#include <bit>

#include "afdm/modem.hpp"
#include "support.hpp"

using namespace afdm;
using namespace testing_support;

TEST_CASE("modulation round trip and OFDM reduction", "[modem]")
{
    SeededRng rng(31);
    for (int n : {8, 16, 64})
    {
        const DaftParams p(n, 3.0 / (2.0 * n), 1.0 / (2.0 * n * M_PI));
        const CVector x = random_vector(n, rng);
        CHECK(max_abs(demodulate(modulate(x, p), p) - x) < 1e-12);

        const DaftParams ofdm(n, 0.0, 0.0);
        const CVector s = modulate(x, ofdm);
        CVector idft(n);
        for (int k = 0; k < n; ++k)
        {
            cplx acc = 0.0;
            for (int m = 0; m < n; ++m)
                acc += std::conj(ph(double((m * k) % n) / n)) * x[m];
            idft[k] = acc / std::sqrt(double(n));
        }
        CHECK(max_abs(s - idft) < 1e-12);
        CHECK(max_abs(demodulate(idft, ofdm) - x) < 1e-12);
    }
}

TEST_CASE("single subcarrier is a unit-modulus chirp", "[modem]")
{
    const int n = 16;
    const double c1 = 3.0 / 32.0, c2 = 0.0123;
    const DaftParams p(n, c1, c2);
    for (int m : {0, 5, 15})
    {
        CVector e = CVector::Zero(n);
        e[m] = 1.0;
        const CVector s = modulate(e, p);
        for (int k = 0; k < n; ++k)
        {
            CHECK(std::abs(std::abs(s[k]) * std::sqrt(double(n)) - 1.0) < 1e-12);
            const cplx want = std::conj(ph(c1 * k * k + c2 * m * m + double(m * k) / n)) / std::sqrt(double(n));
            CHECK(std::abs(s[k] - want) < 1e-12);
        }
    }
}

TEST_CASE("chirp-periodic prefix", "[modem]")
{
    SeededRng rng(32);
    SECTION("cyclic prefix for even N and integer 2Nc1")
    {
        const int n = 16;
        const CVector s = random_vector(n, rng);
        for (int step : {0, 1, 3})
        {
            const CVector ext = add_cpp(s, 5, step / (2.0 * n));
            REQUIRE(ext.size() == n + 5);
            for (int k = 0; k < 5; ++k)
                CHECK(std::abs(ext[k] - s[n - 5 + k]) < 1e-12);
            CHECK(max_abs(strip_cpp(ext, 5) - s) == 0.0);
        }
    }
    SECTION("empty prefix")
    {
        const CVector s = random_vector(9, rng);
        CHECK(max_abs(add_cpp(s, 0, 0.3) - s) == 0.0);
        CHECK(max_abs(strip_cpp(s, 0) - s) == 0.0);
    }
    SECTION("phases for c1 = 1/(4N)")
    {
        const int n = 8;
        const double c1 = 1.0 / 32.0;
        const CVector s = random_vector(n, rng);
        const CVector ext = add_cpp(s, 2, c1);
        // ext[0] is s[-2], ext[1] is s[-1]
        for (int k = 1; k <= 2; ++k)
        {
            const cplx want = s[n - k] * ph(c1 * (n * n - 2.0 * n * k));
            CHECK(std::abs(ext[2 - k] - want) < 1e-13);
        }
        // hand values: k = 1 -> c1 (64 - 16) = 1.5 cycles, k = 2 -> c1 (64 - 32) = 1 cycle
        CHECK(std::abs(ext[1] + s[7]) < 1e-13);
        CHECK(std::abs(ext[0] - s[6]) < 1e-13);
    }
    SECTION("bad lengths")
    {
        CHECK_THROWS_AS(add_cpp(CVector::Zero(4), 4, 0.0), config_error);
        CHECK_THROWS_AS(strip_cpp(CVector::Zero(3), 4), dimension_error);
    }
}

TEST_CASE("frame layouts", "[modem]")
{
    SECTION("embedded pilot, N = 16, Q = 4")
    {
        const FrameLayout lay = FrameLayout::embedded_pilot(16, 4);
        CHECK(lay.data_capacity() == 7);
        std::vector<cplx> data(7);
        for (int k = 0; k < 7; ++k)
            data[k] = cplx(k + 1.0, 0.0);
        const CVector x = build_frame(data, lay, cplx(2.0, 1.0));
        CHECK(x[0] == cplx(2.0, 1.0));
        for (int i : {1, 2, 3, 4, 12, 13, 14, 15})
            CHECK(x[i] == cplx(0.0, 0.0));
        for (int i = 5; i <= 11; ++i)
            CHECK(x[i] == cplx(i - 4.0, 0.0));
        CHECK(extract_data(x, lay) == data);
    }
    SECTION("no guards, no pilot")
    {
        SeededRng rng(33);
        const CVector v = random_vector(8, rng);
        std::vector<cplx> data(v.data(), v.data() + 8);
        CHECK(max_abs(build_frame(data, FrameLayout::data_only(8)) - v) == 0.0);
        CHECK(max_abs(build_frame(data, FrameLayout::zero_padded(8, 0, 0)) - v) == 0.0);
    }
    SECTION("zero data leaves only the pilot energy")
    {
        const FrameLayout lay = FrameLayout::embedded_pilot(64, 13);
        const std::vector<cplx> zeros(lay.data_capacity());
        const cplx pilot(3.0, -4.0);
        CHECK(build_frame(zeros, lay, pilot).squaredNorm() == Catch::Approx(25.0));
    }
    SECTION("zero padding shifts the data block")
    {
        const FrameLayout lay = FrameLayout::zero_padded(16, 8, 2);
        CHECK(lay.data_capacity() == 8);
        CHECK(lay.first_data() == 6);
        const std::vector<int> idx = lay.data_indices();
        CHECK(idx.front() == 6);
        CHECK(idx.back() == 13);
    }
    SECTION("invalid layouts")
    {
        CHECK_THROWS_AS(FrameLayout::embedded_pilot(16, 8), config_error);
        CHECK_THROWS_AS(FrameLayout::zero_padded(16, 3, 4), config_error);
        CHECK_THROWS_AS(build_frame(std::vector<cplx>(3), FrameLayout::data_only(4)), dimension_error);
    }
}

TEST_CASE("constellations", "[modem]")
{
    SECTION("BPSK")
    {
        const Alphabet a(AlphabetKind::bpsk);
        const std::vector<std::uint8_t> bits{0, 1, 1, 0};
        const std::vector<cplx> s = map_bits(bits, a);
        CHECK(s == std::vector<cplx>{1.0, -1.0, -1.0, 1.0});
        CHECK(demap_bits(s, a) == bits);
    }
    for (AlphabetKind kind : {AlphabetKind::bpsk, AlphabetKind::qpsk, AlphabetKind::qam16})
    {
        const Alphabet a(kind);
        CAPTURE(a.name());
        double power = 0.0;
        for (const cplx &z : a.points())
            power += std::norm(z);
        CHECK(power / a.size() == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(a.size() == (1 << a.bits_per_symbol()));
        // every label round-trips, and Gray neighbours differ in one bit
        for (int i = 0; i < a.size(); ++i)
        {
            std::vector<std::uint8_t> bits(a.bits_per_symbol());
            for (int b = 0; b < a.bits_per_symbol(); ++b)
                bits[b] = (i >> (a.bits_per_symbol() - 1 - b)) & 1;
            const std::vector<cplx> s = map_bits(bits, a);
            CHECK(s[0] == a.points()[i]);
            CHECK(demap_bits(s, a) == bits);
            CHECK(a.nearest(a.points()[i] * 1.01) == i);
        }
        double dmin = 1e9;
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < i; ++j)
                dmin = std::min(dmin, std::abs(a.points()[i] - a.points()[j]));
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(std::abs(a.points()[i] - a.points()[j]) - dmin) < 1e-12)
                    CHECK(std::popcount(static_cast<unsigned>(i ^ j)) == 1);
    }
    SECTION("QPSK corner")
    {
        const Alphabet a(AlphabetKind::qpsk);
        for (int i = 0; i < 4; ++i)
        {
            const std::vector<cplx> s{a.points()[i]};
            const auto bits = demap_bits(s, a);
            CHECK(((bits[0] << 1) | bits[1]) == i);
            CHECK(std::abs(std::abs(s[0].real()) - std::sqrt(0.5)) < 1e-15);
        }
    }
    SECTION("difference set")
    {
        CHECK(Alphabet(AlphabetKind::bpsk).difference_set().size() == 3);
        CHECK(Alphabet(AlphabetKind::qpsk).difference_set().size() == 9);
        CHECK(Alphabet(AlphabetKind::qam16).difference_set().size() == 49);
    }
    SECTION("names")
    {
        CHECK(parse_alphabet("qpsk") == AlphabetKind::qpsk);
        CHECK(parse_alphabet("16qam") == AlphabetKind::qam16);
        CHECK_THROWS_AS(parse_alphabet("8psk"), config_error);
        CHECK_THROWS_AS(map_bits(std::vector<std::uint8_t>{1, 0, 1}, Alphabet(AlphabetKind::qpsk)), dimension_error);
    }
}
