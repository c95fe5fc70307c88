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

#include "afdm/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace afdm
{
    EstimationWindow extract_window(const CVector &y, const FrameLayout &layout, const DaftParams &p, int alpha_max,
                                    int xi_nu, cplx pilot)
    {
        if (!layout.has_pilot())
            throw config_error("extract_window: layout does not carry an embedded pilot");
        if (y.size() != layout.n || layout.n != p.n)
            throw dimension_error("extract_window: frame length mismatch");
        if (pilot == cplx(0.0, 0.0))
            throw config_error("extract_window: pilot must be non-zero");
        EstimationWindow w;
        w.params = p;
        w.layout = layout;
        w.alpha_max = alpha_max;
        w.xi_nu = xi_nu;
        w.pilot = pilot;
        w.rows = estimation_rows(layout, alpha_max, xi_nu);
        w.y.resize(static_cast<Eigen::Index>(w.rows.size()));
        for (std::size_t i = 0; i < w.rows.size(); ++i)
            w.y[static_cast<Eigen::Index>(i)] = y[w.rows[i]];
        return w;
    }

    CVector pilot_column(int delay, double doppler, const DaftParams &p, const EstimationWindow &w)
    {
        ChannelPath path;
        path.delay = delay;
        path.doppler = doppler;
        CVector c(static_cast<Eigen::Index>(w.rows.size()));
        for (std::size_t i = 0; i < w.rows.size(); ++i)
            c[static_cast<Eigen::Index>(i)] = heff_entry(path, p, w.rows[i], w.layout.pilot_index());
        return c;
    }

    double path_score(const CVector &column, const CVector &y)
    {
        const double e = column.squaredNorm();
        return e > 0.0 ? std::norm(column.dot(y)) / e : 0.0;
    }

    std::vector<PathEstimate> estimate_integer(const EstimationWindow &w, int paths, int l_max, int alpha_max)
    {
        if (paths < 1)
            throw config_error("estimate_integer: need at least one path");
        const DaftParams &p = w.params;
        const int n = p.n;

        // DAFT row where the pilot response of (l, alpha) lands: H_i[p, 0] != 0 for p = -loc mod N.
        std::vector<int> position(n, -1);
        std::map<int, std::pair<int, int>> grid; // window position -> (l, alpha)
        for (std::size_t i = 0; i < w.rows.size(); ++i)
            position[w.rows[i]] = static_cast<int>(i);
        for (int l = 0; l <= l_max; ++l)
            for (int a = -alpha_max; a <= alpha_max; ++a)
            {
                const int row = (n - path_loc(a, l, p)) % n;
                const int pos = position[row];
                if (pos < 0)
                    throw estimation_error("estimate_integer: path (" + std::to_string(l) + ", " + std::to_string(a) +
                                           ") falls outside the estimation window");
                if (!grid.emplace(pos, std::make_pair(l, a)).second)
                    throw estimation_error("estimate_integer: grid points share DAFT position " + std::to_string(row) +
                                           "; the delay-Doppler grid is not separable");
            }
        if (paths > static_cast<int>(grid.size()))
            throw estimation_error("estimate_integer: more paths requested than grid points");

        std::vector<int> cand;
        for (const auto &g : grid)
            cand.push_back(g.first);
        std::stable_sort(cand.begin(), cand.end(),
                         [&](int a, int b) { return std::norm(w.y[a]) > std::norm(w.y[b]); });

        std::vector<PathEstimate> out;
        for (int k = 0; k < paths; ++k)
        {
            const int pos = cand[k];
            PathEstimate e;
            e.delay = grid[pos].first;
            e.doppler_int = grid[pos].second;
            ChannelPath path;
            path.delay = e.delay;
            path.doppler = e.doppler_int;
            const cplx coeff = heff_entry(path, p, w.rows[pos], w.layout.pilot_index());
            e.gain = std::conj(coeff) * w.y[pos] / w.pilot;
            out.push_back(e);
        }
        return out;
    }

    std::vector<cplx> solve_gains(const EstimationWindow &w, const std::vector<PathEstimate> &paths)
    {
        const int count = static_cast<int>(paths.size());
        CMatrix cols(w.y.size(), count);
        for (int i = 0; i < count; ++i)
            cols.col(i) = pilot_column(paths[i].delay, paths[i].doppler(), w.params, w);
        const CMatrix gram = cols.adjoint() * cols;
        const CVector rhs = cols.adjoint() * w.y / w.pilot;
        Eigen::FullPivLU<CMatrix> lu(gram);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible())
            throw estimation_error("solve_gains: singular gain system");
        const CVector h = lu.solve(rhs);
        return std::vector<cplx>(h.data(), h.data() + h.size());
    }

    std::vector<PathEstimate> estimate_fractional(const EstimationWindow &w, int paths, int l_max, int alpha_max,
                                                  double grid_resolution, int refine_passes)
    {
        if (refine_passes < 0)
            throw config_error("estimate_fractional: refine_passes must be >= 0");
        if (paths < 1 || paths > l_max + 1)
            throw config_error("estimate_fractional: needs 1 <= paths <= l_max + 1 (distinct delays)");
        if (!(grid_resolution > 0.0) || grid_resolution > 0.5)
            throw config_error("estimate_fractional: grid resolution must lie in (0, 1/2]");
        const DaftParams &p = w.params;

        // Phase 1: best integer Doppler per delay, then the strongest delays.
        struct Cand
        {
            int l, alpha;
            double score;
        };
        std::vector<Cand> per_delay;
        for (int l = 0; l <= l_max; ++l)
        {
            Cand best{l, 0, -1.0};
            for (int a = -alpha_max; a <= alpha_max; ++a)
            {
                const double s = path_score(pilot_column(l, a, p, w), w.y);
                if (s > best.score)
                    best = {l, a, s};
            }
            per_delay.push_back(best);
        }
        std::stable_sort(per_delay.begin(), per_delay.end(), [](const Cand &a, const Cand &b) { return a.score > b.score; });

        // Phase 2: fractional part on the grid (-1/2, 1/2].
        const int steps = static_cast<int>(std::floor(0.5 / grid_resolution + 1e-9));
        std::vector<PathEstimate> out;
        for (int k = 0; k < paths; ++k)
        {
            PathEstimate e;
            e.delay = per_delay[k].l;
            e.doppler_int = per_delay[k].alpha;
            double best = -1.0;
            for (int s = -steps; s <= steps; ++s)
            {
                const double a = s * grid_resolution;
                if (a <= -0.5)
                    continue;
                const double score = path_score(pilot_column(e.delay, e.doppler_int + a, p, w), w.y);
                if (score > best)
                {
                    best = score;
                    e.doppler_frac = a;
                }
            }
            out.push_back(e);
        }

        // Phase 3: joint gains.
        std::vector<cplx> g = solve_gains(w, out);
        for (int k = 0; k < paths; ++k)
            out[k].gain = g[k];

        // Refinement against the residual of the other paths. Steps are counted on the
        // grid relative to the current integer Doppler so estimates stay on the grid.
        const double nu_lim = alpha_max + 0.5;
        for (int pass = 0; pass < refine_passes; ++pass)
        {
            bool moved = false;
            for (int k = 0; k < paths; ++k)
            {
                CVector r = w.y;
                for (int j = 0; j < paths; ++j)
                    if (j != k)
                        r -= out[j].gain * w.pilot * pilot_column(out[j].delay, out[j].doppler(), p, w);
                const double cur = out[k].doppler();
                double best = -1.0, best_nu = cur;
                for (int s = -3 * steps; s <= 3 * steps; ++s)
                {
                    const double nu = out[k].doppler_int + s * grid_resolution;
                    if (nu <= -nu_lim || nu > nu_lim)
                        continue;
                    const double score = path_score(pilot_column(out[k].delay, nu, p, w), r);
                    if (score > best)
                    {
                        best = score;
                        best_nu = nu;
                    }
                }
                if (std::abs(best_nu - cur) > 1e-12)
                {
                    moved = true;
                    out[k].doppler_int = static_cast<int>(std::ceil(best_nu - 0.5));
                    out[k].doppler_frac = best_nu - out[k].doppler_int;
                }
            }
            if (!moved)
                break;
            g = solve_gains(w, out);
            for (int k = 0; k < paths; ++k)
                out[k].gain = g[k];
        }
        return out;
    }

    LtvChannel to_channel(const std::vector<PathEstimate> &paths, int n)
    {
        LtvChannel ch;
        ch.n = n;
        for (const auto &e : paths)
        {
            ChannelPath path;
            path.gain = e.gain;
            path.delay = e.delay;
            path.doppler = e.doppler();
            ch.paths.push_back(path);
        }
        return ch;
    }
}
