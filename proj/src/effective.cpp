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

#include "afdm/effective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afdm
{
    namespace
    {
        constexpr double integrality_tol = 1e-9;

        // Peak position x0 = nu + 2 N c1 l of a path's Dirichlet kernel.
        double kernel_peak(const ChannelPath &path, const DaftParams &p)
        {
            return path.doppler + 2.0 * static_cast<double>(p.n) * p.c1 * static_cast<double>(path.delay);
        }

        // Same rounding convention as ChannelPath::doppler_int(): fractional part in (-1/2, 1/2].
        int kernel_center(double x0)
        {
            return static_cast<int>(std::ceil(x0 - 0.5));
        }

        bool near_integer(double x)
        {
            return std::abs(x - std::round(x)) < integrality_tol;
        }

        int wrap(long long v, int n)
        {
            const long long r = v % n;
            return static_cast<int>(r < 0 ? r + n : r);
        }

        // sum_{k=0}^{N-1} exp(-j 2 pi k x / N)
        cplx dirichlet(double x, int n)
        {
            const double nd = static_cast<double>(n);
            const double xr = x - nd * std::round(x / nd);
            if (std::abs(xr) < 1e-12)
                return {nd, 0.0};
            const double ratio = std::sin(std::numbers::pi * xr) / std::sin(std::numbers::pi * xr / nd);
            return std::polar(ratio, -std::numbers::pi * xr * (nd - 1.0) / nd);
        }

        // Row/column phase factors of H_i[p,q] = scale * rowf[p] * colf[q] * F(p - q + x0).
        struct PathFactors
        {
            cplx scale;
            std::vector<cplx> rowf;
            std::vector<cplx> colf;
        };

        PathFactors path_factors(const ChannelPath &path, const DaftParams &p)
        {
            const int n = p.n;
            const double nd = static_cast<double>(n);
            const double l = static_cast<double>(path.delay);
            PathFactors f;
            f.scale = std::conj(unit_phasor(cycles_mod1(p.c1, l * l))) / nd;
            f.rowf.resize(n);
            f.colf.resize(n);
            for (int k = 0; k < n; ++k)
            {
                const double kd = static_cast<double>(k);
                const double ql = static_cast<double>(wrap(static_cast<long long>(k) * path.delay, n)) / nd;
                f.rowf[k] = unit_phasor(cycles_mod1(p.c2, kd * kd));           // e^{-j2pi c2 p^2}
                f.colf[k] = std::conj(unit_phasor(cycles_mod1(p.c2, kd * kd) - ql)); // e^{j2pi(c2 q^2 - q l / N)}
            }
            return f;
        }
    }

    CMatrix PathBand::dense() const
    {
        CMatrix m = CMatrix::Zero(n, n);
        for (int p = 0; p < n; ++p)
            for (int o = -lo; o <= hi; ++o)
                m(p, column(p, o)) += at(p, o);
        return m;
    }

    cplx heff_entry(const ChannelPath &path, const DaftParams &p, int row, int col)
    {
        const double nd = static_cast<double>(p.n);
        const double l = static_cast<double>(path.delay);
        const double q = static_cast<double>(col);
        const double pp = static_cast<double>(row);
        const double ql = static_cast<double>(wrap(static_cast<long long>(col) * path.delay, p.n)) / nd;
        const double phase = cycles_mod1(p.c1, l * l) - ql + cycles_mod1(p.c2, q * q) - cycles_mod1(p.c2, pp * pp);
        const cplx f = dirichlet(pp - q + kernel_peak(path, p), p.n);
        return std::conj(unit_phasor(phase)) * f / nd;
    }

    PathBand heff_entries(const ChannelPath &path, const DaftParams &p, std::optional<int> half_width)
    {
        if (path.delay < 0 || path.delay >= p.n)
            throw config_error("heff_entries: delay must lie in [0, n)");
        const int n = p.n;
        const double x0 = kernel_peak(path, p);

        PathBand band;
        band.n = n;
        band.center = wrap(kernel_center(x0), n);
        if (near_integer(x0))
        {
            band.lo = band.hi = 0;
        }
        else
        {
            const int full_lo = (n - 1) / 2;
            const int full_hi = n - 1 - full_lo;
            const int w = half_width.value_or(n);
            band.lo = std::min(std::max(w, 0), full_lo);
            band.hi = std::min(std::max(w, 0), full_hi);
        }

        const PathFactors f = path_factors(path, p);
        const int width = band.width();
        band.coeff.resize(static_cast<std::size_t>(n) * width);

        // The kernel depends only on the offset m = q - p - center.
        std::vector<cplx> kernel(width);
        for (int m = -band.lo; m <= band.hi; ++m)
        {
            const double x = -static_cast<double>(m) - static_cast<double>(kernel_center(x0)) + x0;
            kernel[m + band.lo] = near_integer(x0) ? cplx(static_cast<double>(n), 0.0) : dirichlet(x, n);
        }

        for (int row = 0; row < n; ++row)
        {
            const cplx rs = f.scale * f.rowf[row];
            for (int m = -band.lo; m <= band.hi; ++m)
            {
                const int col = band.column(row, m);
                band.coeff[static_cast<std::size_t>(row) * width + (m + band.lo)] = rs * f.colf[col] * kernel[m + band.lo];
            }
        }
        return band;
    }

    CMatrix heff_from_time(const CMatrix &h, const DaftParams &p)
    {
        if (h.rows() != p.n || h.cols() != p.n)
            throw dimension_error("heff_from_time: matrix must be n x n");
        const CMatrix a = daft_matrix(p);
        return a * h * a.adjoint();
    }

    bool EffectiveChannel::integer_structure() const
    {
        return std::all_of(per_path.begin(), per_path.end(), [](const PathBand &b) { return b.is_single_tap(); });
    }

    cplx EffectiveChannel::entry(int row, int col) const
    {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            const PathBand &b = per_path[i];
            const int m0 = ((col - row - b.center) % b.n + b.n) % b.n;
            // offset m in [-lo, hi] congruent to m0 mod n
            for (int m : {m0, m0 - b.n})
                if (m >= -b.lo && m <= b.hi)
                {
                    acc += paths[i].gain * b.at(row, m);
                    break;
                }
        }
        return acc;
    }

    EffectiveChannel build_effective(const LtvChannel &ch, const DaftParams &p, int k_nu, int xi_nu, bool with_dense)
    {
        EffectiveChannel e;
        e.params = p;
        e.paths = ch.paths;
        e.k_nu = k_nu;
        e.xi_nu = xi_nu;
        e.per_path.reserve(ch.paths.size());
        for (const auto &path : ch.paths)
            e.per_path.push_back(heff_entries(path, p));
        if (with_dense)
        {
            e.dense = CMatrix::Zero(p.n, p.n);
            for (std::size_t i = 0; i < ch.paths.size(); ++i)
            {
                const PathBand &b = e.per_path[i];
                for (int row = 0; row < p.n; ++row)
                    for (int m = -b.lo; m <= b.hi; ++m)
                        e.dense(row, b.column(row, m)) += ch.paths[i].gain * b.at(row, m);
            }
        }
        return e;
    }

    int chirp_step(const DaftParams &p)
    {
        const double step = 2.0 * static_cast<double>(p.n) * p.c1;
        if (!near_integer(step))
            throw config_error("2 N c1 = " + std::to_string(step) + " is not an integer");
        return static_cast<int>(std::llround(step));
    }

    int path_loc(int alpha, int l, const DaftParams &p)
    {
        return wrap(static_cast<long long>(alpha) + static_cast<long long>(chirp_step(p)) * l, p.n);
    }

    double choose_c1(int alpha_max, int xi_nu, int n, bool fractional)
    {
        if (alpha_max < 0 || xi_nu < 0 || n < 1)
            throw config_error("choose_c1: alpha_max, xi_nu must be >= 0 and n >= 1");
        const int spread = fractional ? alpha_max + xi_nu : alpha_max;
        return (2.0 * spread + 1.0) / (2.0 * static_cast<double>(n));
    }

    double choose_c2(int n, C2Mode mode)
    {
        const double nd = static_cast<double>(n);
        switch (mode)
        {
        case C2Mode::irrational:
            return 1.0 / (2.0 * nd * std::numbers::pi);
        case C2Mode::small_rational:
            return 1.0 / (4.0 * nd * nd);
        }
        return 0.0;
    }

    bool check_separability(int l_max, int alpha_max, int k_nu, int n)
    {
        const long long spread = static_cast<long long>(alpha_max) + k_nu;
        return 2 * spread * l_max + 2 * spread + l_max < n;
    }

    int guard_count(int l_max, int alpha_max, int xi_nu)
    {
        return (l_max + 1) * (2 * (alpha_max + xi_nu) + 1) - 1;
    }

    int default_k_nu(int n, double threshold)
    {
        const double nd = static_cast<double>(n);
        auto worst = [&](int m) {
            double w = 0.0;
            for (int s = 0; s <= 200; ++s)
            {
                const double a = -0.5 + s / 200.0;
                const double x = a - static_cast<double>(m);
                const double den = nd * std::sin(std::numbers::pi * x / nd);
                if (std::abs(den) < 1e-300)
                    return 1.0;
                w = std::max(w, std::abs(std::sin(std::numbers::pi * x) / den));
            }
            return w;
        };
        const int k_cap = (n - 1) / 2;
        for (int k = 0; k < k_cap; ++k)
            if (std::max(worst(k + 1), worst(-(k + 1))) < threshold)
                return k;
        return k_cap;
    }

    double envelope_bound(int n, double theta)
    {
        const double nd = static_cast<double>(n);
        return (nd - 1.0) / nd * std::abs(std::cos(theta)) + 1.0 / nd;
    }

    std::vector<int> estimation_rows(const FrameLayout &layout, int alpha_max, int xi_nu)
    {
        if (!layout.has_pilot())
            throw config_error("estimation_rows: layout has no embedded pilot");
        const int n = layout.n;
        const int n_q = n - layout.q - 1;
        const int edge = alpha_max + xi_nu;
        if (edge > layout.q)
            throw config_error("estimation_rows: alpha_max + xi exceeds the guard count");
        std::vector<int> rows;
        for (int r = 0; r <= edge; ++r)
            rows.push_back(r);
        for (int r = n_q + edge + 1; r < n; ++r)
            rows.push_back(r);
        return rows;
    }

    BandedSystem band_truncate(const EffectiveChannel &heff, const FrameLayout &layout, std::optional<int> half_width,
                               int alpha_max)
    {
        const int n = heff.params.n;
        if (layout.n != n)
            throw dimension_error("band_truncate: layout length does not match the channel");

        int l_max = 0;
        for (const auto &path : heff.paths)
            l_max = std::max(l_max, path.delay);

        if (half_width.has_value())
        {
            const int needed = guard_count(l_max, alpha_max, heff.xi_nu);
            if (layout.kind == LayoutKind::data_only && needed > 0)
                throw config_error("band_truncate: a data-only frame has no guards (need " + std::to_string(needed) + ")");
            if (layout.kind != LayoutKind::data_only && layout.q < needed)
                throw config_error("band_truncate: layout has " + std::to_string(layout.q) + " guards, need " +
                                   std::to_string(needed));
            if (layout.kind == LayoutKind::zero_padded && layout.shift != alpha_max + heff.xi_nu)
                throw config_error("band_truncate: zero-padded shift must equal alpha_max + xi");
        }

        std::vector<int> row_map(n, 0);
        if (layout.has_pilot())
            for (int r : estimation_rows(layout, alpha_max, heff.xi_nu))
                row_map[r] = -1;

        BandedSystem sys;
        sys.half_width = half_width.value_or(n);
        for (int r = 0; r < n; ++r)
            if (row_map[r] == 0)
            {
                row_map[r] = static_cast<int>(sys.y_index.size());
                sys.y_index.push_back(r);
            }
        sys.x_index = layout.data_indices();

        SparseColumns &h = sys.h;
        h.rows = static_cast<int>(sys.y_index.size());
        h.cols = static_cast<int>(sys.x_index.size());
        h.col_start.assign(1, 0);

        std::vector<std::pair<int, cplx>> entries;
        for (int q : sys.x_index)
        {
            entries.clear();
            for (std::size_t i = 0; i < heff.paths.size(); ++i)
            {
                const PathBand &b = heff.per_path[i];
                const int w_lo = half_width ? std::min(*half_width, b.lo) : b.lo;
                const int w_hi = half_width ? std::min(*half_width, b.hi) : b.hi;
                for (int m = -w_lo; m <= w_hi; ++m)
                {
                    const int p = ((q - b.center - m) % n + n) % n;
                    if (row_map[p] < 0)
                        continue;
                    entries.emplace_back(row_map[p], heff.paths[i].gain * b.at(p, m));
                }
            }
            std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
            for (std::size_t k = 0; k < entries.size(); ++k)
            {
                if (!h.row.empty() && static_cast<int>(h.row.size()) > h.col_start.back() && h.row.back() == entries[k].first)
                    h.value.back() += entries[k].second;
                else
                {
                    h.row.push_back(entries[k].first);
                    h.value.push_back(entries[k].second);
                }
            }
            h.col_start.push_back(static_cast<int>(h.row.size()));
        }
        return sys;
    }

    BandedSystem band_truncate(const EffectiveChannel &heff, const FrameLayout &layout, int alpha_max)
    {
        return band_truncate(heff, layout, heff.integer_structure() ? 0 : heff.xi_nu, alpha_max);
    }
}
