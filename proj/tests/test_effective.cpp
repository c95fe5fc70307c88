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

#include "afdm/effective.hpp"
#include "support.hpp"

using namespace afdm;
using namespace testing_support;

namespace
{
    CMatrix dense_oracle(const LtvChannel &ch, const DaftParams &p)
    {
        const CMatrix a = daft_matrix(p);
        return a * naive_time_channel(ch, p.n, p.c1) * a.adjoint();
    }

    LtvChannel integer_channel(int paths, int l_max, int alpha_max, int n, SeededRng &rng)
    {
        LtvChannel ch;
        ch.n = n;
        for (int i = 0; i < paths; ++i)
            ch.paths.push_back({rng.complex_normal(1.0 / paths), i % (l_max + 1),
                                double(rng.uniform_int(-alpha_max, alpha_max))});
        return ch;
    }

    LtvChannel fractional_channel(int paths, int l_max, int alpha_max, int n, SeededRng &rng)
    {
        LtvChannel ch = integer_channel(paths, l_max, alpha_max, n, rng);
        for (auto &p : ch.paths)
            p.doppler = alpha_max * std::cos(rng.uniform(-M_PI, M_PI));
        return ch;
    }

    int dist(int a, int b, int n)
    {
        const int d = ((a - b) % n + n) % n;
        return std::min(d, n - d);
    }
}

TEST_CASE("conjugating the identity", "[effective]")
{
    for (int n : {8, 16})
    {
        const DaftParams p(n, 0.3, 0.17);
        CHECK(max_abs(heff_from_time(CMatrix::Identity(n, n), p) - CMatrix::Identity(n, n)) < 1e-12);
        const PathBand b = heff_entries(ChannelPath{1.0, 0, 0.0}, p);
        CHECK(b.is_single_tap());
        CHECK(max_abs(b.dense() - CMatrix::Identity(n, n)) < 1e-12);
    }
}

TEST_CASE("closed form equals dense conjugation", "[effective]")
{
    SeededRng rng(41);
    SECTION("integer Doppler")
    {
        for (int rep = 0; rep < 20; ++rep)
        {
            const int n = 16 << (rep % 3);
            const DaftParams p(n, choose_c1(2, 0, n, false), choose_c2(n));
            const LtvChannel ch = integer_channel(3, 2, 2, n, rng);
            const EffectiveChannel e = build_effective(ch, p);
            const CMatrix ref = dense_oracle(ch, p);
            CHECK(max_abs(e.dense - ref) < 1e-9);
            CHECK(max_abs(heff_from_time(time_channel_matrix(ch, p), p) - ref) < 1e-9);
            CHECK(e.integer_structure());
            for (std::size_t i = 0; i < ch.paths.size(); ++i)
            {
                const PathBand &b = e.per_path[i];
                REQUIRE(b.is_single_tap());
                const int loc = path_loc(ch.paths[i].doppler_int(), ch.paths[i].delay, p);
                const CMatrix hi = b.dense();
                for (int row = 0; row < n; ++row)
                {
                    CHECK(b.column(row, 0) == (row + loc) % n);
                    int nonzero = 0;
                    for (int col = 0; col < n; ++col)
                        nonzero += std::abs(hi(row, col)) > 1e-12;
                    CHECK(nonzero == 1);
                }
            }
        }
    }
    SECTION("fractional Doppler")
    {
        for (int rep = 0; rep < 20; ++rep)
        {
            const int n = 16 << (rep % 3);
            const DaftParams p(n, choose_c1(2, 1, n, true), rng.uniform(0.0, 0.1));
            const LtvChannel ch = fractional_channel(3, 2, 2, n, rng);
            const EffectiveChannel e = build_effective(ch, p, default_k_nu(n), 1);
            CHECK(max_abs(e.dense - dense_oracle(ch, p)) < 1e-9);
            for (int k = 0; k < 20; ++k)
            {
                const int r = rng.uniform_int(0, n - 1), c = rng.uniform_int(0, n - 1);
                CHECK(std::abs(e.entry(r, c) - e.dense(r, c)) < 1e-12);
            }
        }
    }
    SECTION("arbitrary chirp rates")
    {
        for (int rep = 0; rep < 20; ++rep)
        {
            const int n = 12 + rep;
            const DaftParams p(n, rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            const LtvChannel ch = fractional_channel(2, 3, 2, n, rng);
            CHECK(max_abs(build_effective(ch, p).dense - dense_oracle(ch, p)) < 1e-9);
        }
    }
}

TEST_CASE("fractional path: band and off-band envelope", "[effective]")
{
    const int n = 64;
    const DaftParams p(n, choose_c1(1, 1, n, true), choose_c2(n));
    const ChannelPath path{1.0, 1, 0.3};
    LtvChannel ch;
    ch.n = n;
    ch.paths.push_back(path);
    const CMatrix ref = dense_oracle(ch, p);
    const PathBand b = heff_entries(path, p, 4);
    REQUIRE(b.width() == 9);
    for (int row = 0; row < n; ++row)
        for (int m = -b.lo; m <= b.hi; ++m)
            CHECK(std::abs(b.at(row, m) - ref(row, b.column(row, m))) < 1e-9);
    // |H[p,q]| <= |sin(N theta)/(N sin theta)| with theta = pi (p - q + loc + a) / N
    const double loc = 0 + 2.0 * n * p.c1 * path.delay;
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col)
        {
            const double theta = M_PI * (row - col + loc + path.doppler) / n;
            const double dirichlet = std::abs(std::sin(n * theta) / (n * std::sin(theta)));
            CHECK(std::abs(ref(row, col)) <= dirichlet + 1e-12);
        }
    // the row peak sits within one column of p + loc + nu
    for (int row = 0; row < n; ++row)
    {
        Eigen::Index arg;
        ref.row(row).cwiseAbs().maxCoeff(&arg);
        CHECK(dist(static_cast<int>(arg), row + static_cast<int>(loc), n) <= 1);
    }
    CHECK(envelope_bound(n, 0.0) == Catch::Approx(1.0));
    CHECK(envelope_bound(n, M_PI / 2) == Catch::Approx(1.0 / n));
}

TEST_CASE("integer case magnitude is circulant", "[effective]")
{
    SeededRng rng(42);
    const int n = 32;
    const DaftParams p(n, choose_c1(1, 0, n, false), choose_c2(n));
    const LtvChannel ch = integer_channel(3, 2, 1, n, rng);
    const CMatrix h = build_effective(ch, p).dense;
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < n; ++c)
            CHECK(std::abs(std::abs(h(r, c)) - std::abs(h(0, (c - r + n) % n))) < 1e-12);
}

TEST_CASE("parameter rules", "[effective]")
{
    SECTION("path location")
    {
        CHECK(path_loc(0, 0, DaftParams(16, 3.0 / 32.0, 0.0)) == 0);
        CHECK(path_loc(1, 1, DaftParams(16, 3.0 / 32.0, 0.0)) == 4);
        CHECK(path_loc(-1, 0, DaftParams(16, 3.0 / 32.0, 0.0)) == 15);
        CHECK_THROWS_AS(path_loc(0, 1, DaftParams(16, 0.1, 0.0)), config_error);
    }
    SECTION("first chirp rate")
    {
        CHECK(choose_c1(1, 0, 16, false) == 3.0 / 32.0);
        CHECK(choose_c1(0, 0, 16, false) == 1.0 / 32.0);
        CHECK(choose_c1(2, 1, 256, true) == 7.0 / 512.0);
        CHECK(choose_c1(2, 1, 256, false) == 5.0 / 512.0);
    }
    SECTION("second chirp rate")
    {
        CHECK(choose_c2(16) == Catch::Approx(0.009947).margin(1e-6));
        CHECK(choose_c2(16, C2Mode::small_rational) == 1.0 / 1024.0);
    }
    SECTION("separability")
    {
        CHECK(check_separability(3, 1, 0, 16));
        CHECK_FALSE(check_separability(3, 2, 0, 16));
        for (int a = 0; a < 8; ++a)
            CHECK(check_separability(0, a, 0, 16));
    }
    SECTION("guards")
    {
        CHECK(guard_count(2, 1, 0) == 8);
        CHECK(guard_count(0, 0, 0) == 0);
        CHECK(guard_count(3, 2, 1) == 27);
    }
    SECTION("kernel spread")
    {
        // worst-case Dirichlet magnitude at k + 1 drops below the threshold and not at k
        for (int n : {16, 64, 256})
        {
            const int k = default_k_nu(n);
            auto worst = [n](int m) {
                double w = 0.0;
                for (int s = 0; s <= 200; ++s)
                {
                    const double x = -0.5 + s / 200.0 - m;
                    w = std::max(w, std::abs(std::sin(M_PI * x) / (n * std::sin(M_PI * x / n))));
                }
                return w;
            };
            if (k < (n - 1) / 2)
                CHECK(worst(k + 1) < 0.02);
            CHECK(worst(k) >= 0.02);
        }
        CHECK(default_k_nu(256) == 16);
        CHECK(default_k_nu(16) == 7); // never reaches the threshold; capped at (N - 1) / 2
    }
}

TEST_CASE("band truncation", "[effective]")
{
    SeededRng rng(43);
    SECTION("integer channel: P entries per column, no loss")
    {
        for (int rep = 0; rep < 10; ++rep)
        {
            const int n = 64, l_max = 2, alpha_max = 2;
            const DaftParams p(n, choose_c1(alpha_max, 0, n, false), choose_c2(n));
            const LtvChannel ch = integer_channel(3, l_max, alpha_max, n, rng);
            const EffectiveChannel e = build_effective(ch, p);
            const int q = guard_count(l_max, alpha_max, 0);
            for (const FrameLayout &lay : {FrameLayout::zero_padded(n, q, alpha_max), FrameLayout::embedded_pilot(n, q)})
            {
                const BandedSystem sys = band_truncate(e, lay, alpha_max);
                for (int c = 0; c < sys.h.cols; ++c)
                    CHECK(sys.h.nnz(c) == 3);
                const CMatrix d = sys.h.dense();
                for (int r = 0; r < sys.h.rows; ++r)
                    for (int c = 0; c < sys.h.cols; ++c)
                        CHECK(std::abs(d(r, c) - e.dense(sys.y_index[r], sys.x_index[c])) < 1e-12);
            }
        }
    }
    SECTION("zero channel")
    {
        const int n = 16;
        const DaftParams p(n, 3.0 / 32.0, choose_c2(n));
        LtvChannel ch;
        ch.n = n;
        ch.paths.push_back({0.0, 0, 1.0});
        ch.paths.push_back({0.0, 1, -1.0});
        const BandedSystem sys = band_truncate(build_effective(ch, p), FrameLayout::zero_padded(n, 5, 1), 1);
        CHECK(max_abs(sys.h.dense()) == 0.0);
    }
    SECTION("N = 16, Q = 8, P = 3: banded solve equals the dense solve on data indices")
    {
        const int n = 16, l_max = 2, alpha_max = 1, q = 8;
        const DaftParams p(n, choose_c1(alpha_max, 0, n, false), choose_c2(n));
        for (int rep = 0; rep < 10; ++rep)
        {
            const LtvChannel ch = integer_channel(3, l_max, alpha_max, n, rng);
            const EffectiveChannel e = build_effective(ch, p);
            const FrameLayout lay = FrameLayout::zero_padded(n, q, alpha_max);
            const BandedSystem sys = band_truncate(e, lay, alpha_max);
            CMatrix sub(n, sys.h.cols);
            for (int c = 0; c < sys.h.cols; ++c)
                sub.col(c) = e.dense.col(sys.x_index[c]);
            const CVector y = random_vector(n, rng);
            const double gamma = 10.0;
            const CMatrix gram = sub.adjoint() * sub + CMatrix::Identity(sub.cols(), sub.cols()) / gamma;
            const CVector ref = gram.lu().solve(sub.adjoint() * y);
            const CMatrix hd = sys.h.dense();
            CVector yy(sys.h.rows);
            for (int r = 0; r < sys.h.rows; ++r)
                yy[r] = y[sys.y_index[r]];
            const CVector got = (hd.adjoint() * hd + CMatrix::Identity(hd.cols(), hd.cols()) / gamma).lu().solve(hd.adjoint() * yy);
            CHECK(max_abs(got - ref) < 1e-10);
        }
    }
    SECTION("fractional truncation keeps 2 xi + 1 taps per path")
    {
        const int n = 64, l_max = 1, alpha_max = 1, xi = 2;
        const DaftParams p(n, choose_c1(alpha_max, xi, n, true), choose_c2(n));
        const LtvChannel ch = fractional_channel(2, l_max, alpha_max, n, rng);
        const EffectiveChannel e = build_effective(ch, p, default_k_nu(n), xi);
        const int q = guard_count(l_max, alpha_max, xi);
        const BandedSystem sys = band_truncate(e, FrameLayout::zero_padded(n, q, alpha_max + xi), alpha_max);
        CHECK(sys.half_width == xi);
        for (int c = 0; c < sys.h.cols; ++c)
            CHECK(sys.h.nnz(c) == 2 * (2 * xi + 1));
    }
    SECTION("guard checks")
    {
        const int n = 16;
        const DaftParams p(n, 3.0 / 32.0, choose_c2(n));
        const LtvChannel ch = integer_channel(2, 1, 1, n, rng);
        const EffectiveChannel e = build_effective(ch, p);
        CHECK_THROWS_AS(band_truncate(e, FrameLayout::data_only(n), 0, 1), config_error);
        CHECK_THROWS_AS(band_truncate(e, FrameLayout::zero_padded(n, 4, 1), 0, 1), config_error);
        CHECK_THROWS_AS(band_truncate(e, FrameLayout::zero_padded(n, 5, 0), 0, 1), config_error);
        CHECK_NOTHROW(band_truncate(e, FrameLayout::data_only(n), std::nullopt, 1));
    }
}

TEST_CASE("estimation rows", "[effective]")
{
    // Q = 8 at N = 16 leaves no data slot, so the factory refuses it; the window arithmetic
    // itself is still well defined.
    const FrameLayout lay{LayoutKind::embedded_pilot, 16, 8, 0};
    const std::vector<int> rows = estimation_rows(lay, 1, 0);
    CHECK(rows == std::vector<int>{0, 1, 9, 10, 11, 12, 13, 14, 15});
    CHECK_THROWS_AS(estimation_rows(FrameLayout::zero_padded(16, 8, 1), 1, 0), config_error);
}
