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

#include "afdm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace afdm
{
    int ChannelPath::doppler_int() const
    {
        return static_cast<int>(std::ceil(doppler - 0.5));
    }

    double ChannelPath::doppler_frac() const
    {
        return doppler - static_cast<double>(doppler_int());
    }

    int LtvChannel::max_delay() const
    {
        int l = 0;
        for (const auto &path : paths)
            l = std::max(l, path.delay);
        return l;
    }

    double LtvChannel::max_abs_doppler() const
    {
        double v = 0.0;
        for (const auto &path : paths)
            v = std::max(v, std::abs(path.doppler));
        return v;
    }

    LtvChannel random_channel(const ChannelSpec &spec, int n, SeededRng &rng)
    {
        const int p = spec.paths;
        if (p < 1)
            throw config_error("random_channel: at least one path is required");
        if (spec.l_max < 0 || spec.l_max >= n)
            throw config_error("random_channel: l_max must lie in [0, n)");
        if (!spec.delays.empty() && static_cast<int>(spec.delays.size()) != p)
            throw config_error("random_channel: fixed delay list must have one entry per path");
        if (spec.delays.empty() && p > spec.l_max + 1)
            throw config_error("random_channel: " + std::to_string(p) + " distinct delays do not fit in l_max = " +
                               std::to_string(spec.l_max));
        if (spec.doppler_mode == DopplerMode::fixed && static_cast<int>(spec.dopplers.size()) != p)
            throw config_error("random_channel: fixed Doppler mode needs one Doppler value per path");
        if (!spec.gains.empty() && static_cast<int>(spec.gains.size()) != p)
            throw config_error("random_channel: fixed gain list must have one entry per path");

        LtvChannel ch;
        ch.n = n;
        ch.paths.resize(p);
        const double var = 1.0 / static_cast<double>(p);

        // Draw order is part of the reproducibility contract: gains, then Dopplers.
        for (int i = 0; i < p; ++i)
        {
            const cplx g = rng.complex_normal(var);
            ch.paths[i].gain = spec.gains.empty() ? g : spec.gains[i];
        }
        for (int i = 0; i < p; ++i)
        {
            auto &path = ch.paths[i];
            path.delay = spec.delays.empty() ? i : spec.delays[i];
            if (path.delay < 0 || path.delay > spec.l_max)
                throw config_error("random_channel: delay " + std::to_string(path.delay) + " outside [0, l_max]");
            switch (spec.doppler_mode)
            {
            case DopplerMode::integer_uniform:
                path.doppler = static_cast<double>(rng.uniform_int(-spec.alpha_max, spec.alpha_max));
                break;
            case DopplerMode::jakes:
                path.doppler = static_cast<double>(spec.alpha_max) * std::cos(rng.uniform(-std::numbers::pi, std::numbers::pi));
                break;
            case DopplerMode::fixed:
                path.doppler = spec.dopplers[i];
                break;
            }
        }
        return ch;
    }

    CVector awgn(int length, double noise_var, SeededRng &rng)
    {
        CVector w(length);
        for (int k = 0; k < length; ++k)
            w[k] = rng.complex_normal(noise_var);
        return w;
    }

    CVector apply_channel(const CVector &s, int l_cp, const LtvChannel &ch)
    {
        if (l_cp < ch.max_delay())
            throw config_error("apply_channel: prefix length " + std::to_string(l_cp) +
                               " is shorter than the maximum delay " + std::to_string(ch.max_delay()));
        const int total = static_cast<int>(s.size());
        if (total < l_cp)
            throw dimension_error("apply_channel: block shorter than its prefix");
        const double n = static_cast<double>(ch.n > 0 ? ch.n : total - l_cp);

        CVector r = CVector::Zero(total);
        for (const auto &path : ch.paths)
        {
            const double f = path.doppler / n;
            for (int m = path.delay; m < total; ++m)
            {
                const double t = static_cast<double>(m - l_cp);
                r[m] += path.gain * unit_phasor(f * t) * s[m - path.delay];
            }
        }
        return r;
    }

    CVector apply_channel(const CVector &s, int l_cp, const LtvChannel &ch, double noise_var, SeededRng &rng)
    {
        if (noise_var < 0.0)
            throw config_error("apply_channel: noise variance must be non-negative");
        CVector r = apply_channel(s, l_cp, ch);
        if (noise_var > 0.0)
            r += awgn(static_cast<int>(r.size()), noise_var, rng);
        return r;
    }

    CVector cpp_gamma(int delay, const DaftParams &p)
    {
        const double n = static_cast<double>(p.n);
        CVector g = CVector::Ones(p.n);
        for (int k = 0; k < std::min(delay, p.n); ++k)
            g[k] = unit_phasor(cycles_mod1(p.c1, n * n - 2.0 * n * static_cast<double>(delay - k)));
        return g;
    }

    CMatrix time_channel_matrix(const LtvChannel &ch, const DaftParams &p)
    {
        const int n = p.n;
        if (ch.max_delay() >= n)
            throw config_error("time_channel_matrix: maximum delay must be below n");
        CMatrix h = CMatrix::Zero(n, n);
        for (const auto &path : ch.paths)
        {
            const CVector gamma = cpp_gamma(path.delay, p);
            const double f = path.doppler / static_cast<double>(n);
            for (int k = 0; k < n; ++k)
            {
                const int col = ((k - path.delay) % n + n) % n;
                h(k, col) += path.gain * gamma[k] * unit_phasor(f * static_cast<double>(k));
            }
        }
        return h;
    }
}
