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

#include "afdm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace afdm
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return s;
        }

        template <typename T> T parse_number(const std::string &key, const std::string &v)
        {
            T out{};
            const auto *end = v.data() + v.size();
            const auto [ptr, ec] = std::from_chars(v.data(), end, out);
            if (ec != std::errc() || ptr != end)
                throw config_error("config: key '" + key + "' expects a number, got '" + v + "'");
            if constexpr (std::is_floating_point_v<T>)
                if (!std::isfinite(out))
                    throw config_error("config: key '" + key + "' must be finite");
            return out;
        }

        std::vector<std::string> split_list(const std::string &v)
        {
            std::vector<std::string> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        bool parse_bool(const std::string &key, const std::string &v)
        {
            const std::string l = lower(v);
            if (l == "true" || l == "yes" || l == "1")
                return true;
            if (l == "false" || l == "no" || l == "0")
                return false;
            throw config_error("config: key '" + key + "' expects true/false, got '" + v + "'");
        }

        std::string fmt(double v)
        {
            char buf[64];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, ptr);
        }

        template <typename T> std::string join(const std::vector<T> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                if (i)
                    out += ",";
                if constexpr (std::is_floating_point_v<T>)
                    out += fmt(v[i]);
                else
                    out += std::to_string(v[i]);
            }
            return out;
        }

        cplx parse_complex(const std::string &key, const std::string &v)
        {
            std::string t = v;
            t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
            if (t.empty())
                throw config_error("config: key '" + key + "' has an empty entry");
            if (t.back() != 'j')
                return {parse_number<double>(key, t), 0.0};
            t.pop_back();
            // split at the sign that starts the imaginary part (not an exponent sign)
            std::size_t cut = std::string::npos;
            for (std::size_t i = t.size(); i-- > 1;)
                if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E')
                {
                    cut = i;
                    break;
                }
            if (cut == std::string::npos)
                return {0.0, t == "+" || t.empty() ? 1.0 : t == "-" ? -1.0 : parse_number<double>(key, t)};
            const std::string re = t.substr(0, cut);
            std::string im = t.substr(cut);
            if (im == "+" || im == "-")
                im += "1";
            if (im.front() == '+')
                im.erase(0, 1);
            return {parse_number<double>(key, re), parse_number<double>(key, im)};
        }

        std::string to_string(C2Mode m) { return m == C2Mode::irrational ? "irrational" : "small-rational"; }

        std::string to_string(LayoutChoice l)
        {
            switch (l)
            {
            case LayoutChoice::automatic:
                return "auto";
            case LayoutChoice::data_only:
                return "data-only";
            case LayoutChoice::zero_padded:
                return "zero-padded";
            case LayoutChoice::embedded_pilot:
                return "embedded-pilot";
            }
            return "auto";
        }

        std::string alphabet_name(AlphabetKind k) { return Alphabet(k).name(); }

        std::string fmt_complex(cplx z)
        {
            if (z.imag() == 0.0)
                return fmt(z.real());
            return fmt(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + fmt(std::abs(z.imag())) + "j";
        }
    }

    std::string to_string(Waveform w)
    {
        switch (w)
        {
        case Waveform::afdm:
            return "afdm";
        case Waveform::ofdm:
            return "ofdm";
        case Waveform::ocdm:
            return "ocdm";
        }
        return "afdm";
    }

    std::string to_string(DetectorKind d)
    {
        switch (d)
        {
        case DetectorKind::ml:
            return "ml";
        case DetectorKind::lmmse:
            return "lmmse";
        case DetectorKind::mrc_dfe:
            return "mrc-dfe";
        }
        return "ml";
    }

    std::string to_string(EstimationMode e)
    {
        switch (e)
        {
        case EstimationMode::ideal_csi:
            return "ideal-csi";
        case EstimationMode::integer:
            return "integer";
        case EstimationMode::fractional:
            return "fractional";
        }
        return "ideal-csi";
    }

    std::string to_string(DopplerMode d)
    {
        switch (d)
        {
        case DopplerMode::integer_uniform:
            return "integer-uniform";
        case DopplerMode::jakes:
            return "jakes";
        case DopplerMode::fixed:
            return "fixed";
        }
        return "integer-uniform";
    }

    std::uint64_t fnv1a64(const std::string &bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    bool SimConfig::is_fractional() const
    {
        if (fractional)
            return *fractional;
        if (doppler == DopplerMode::jakes)
            return true;
        if (doppler == DopplerMode::fixed)
            return std::any_of(dopplers.begin(), dopplers.end(), [](double v) { return v != std::round(v); });
        return false;
    }

    int SimConfig::xi() const { return xi_nu.value_or(is_fractional() ? 1 : 0); }

    int SimConfig::kv() const { return k_nu.value_or(is_fractional() ? default_k_nu(n) : 0); }

    double SimConfig::c1() const
    {
        switch (waveform)
        {
        case Waveform::afdm:
            return choose_c1(alpha_max, xi(), n, is_fractional());
        case Waveform::ofdm:
            return 0.0;
        case Waveform::ocdm:
            return 1.0 / (2.0 * n);
        }
        return 0.0;
    }

    double SimConfig::c2() const
    {
        switch (waveform)
        {
        case Waveform::afdm:
            return choose_c2(n, c2_mode);
        case Waveform::ofdm:
            return 0.0;
        case Waveform::ocdm:
            return 1.0 / (2.0 * n);
        }
        return 0.0;
    }

    DaftParams SimConfig::params() const { return DaftParams(n, c1(), c2()); }

    int SimConfig::guards() const { return guard_count(l_max, alpha_max, xi()); }

    FrameLayout SimConfig::frame_layout() const
    {
        LayoutChoice choice = layout;
        if (choice == LayoutChoice::automatic)
        {
            if (estimation != EstimationMode::ideal_csi)
                choice = LayoutChoice::embedded_pilot;
            else if (detector == DetectorKind::mrc_dfe)
                choice = LayoutChoice::zero_padded;
            else
                choice = LayoutChoice::data_only;
        }
        switch (choice)
        {
        case LayoutChoice::zero_padded:
            return FrameLayout::zero_padded(n, guards(), alpha_max + xi());
        case LayoutChoice::embedded_pilot:
            return FrameLayout::embedded_pilot(n, guards());
        default:
            return FrameLayout::data_only(n);
        }
    }

    ChannelSpec SimConfig::channel_spec() const
    {
        ChannelSpec s;
        s.paths = paths;
        s.l_max = l_max;
        s.alpha_max = alpha_max;
        s.doppler_mode = doppler;
        s.delays = delays;
        s.dopplers = dopplers;
        s.gains = gains;
        return s;
    }

    std::optional<int> SimConfig::detection_band() const
    {
        if (band_width == band_exact)
            return std::nullopt;
        if (band_width >= 0)
            return band_width;
        if (detector == DetectorKind::mrc_dfe)
            return is_fractional() ? xi() : 0;
        return std::nullopt;
    }

    void SimConfig::validate() const
    {
        if (schema_version != 1)
            throw config_error("config: unsupported schema_version " + std::to_string(schema_version));
        if (n < 2)
            throw config_error("config: n must be >= 2");
        if (paths < 1)
            throw config_error("config: paths must be >= 1");
        if (l_max < 0 || l_max >= n)
            throw config_error("config: l_max must lie in [0, n)");
        if (alpha_max < 0 || 2 * alpha_max + 1 > n)
            throw config_error("config: alpha_max must satisfy 0 <= 2 alpha_max + 1 <= n");
        if (!delays.empty())
        {
            if (static_cast<int>(delays.size()) != paths)
                throw config_error("config: delays must list one tap per path");
            for (int d : delays)
                if (d < 0 || d > l_max)
                    throw config_error("config: every delay must lie in [0, l_max]");
        }
        else if (paths > l_max + 1)
            throw config_error("config: " + std::to_string(paths) + " paths need l_max >= " + std::to_string(paths - 1) +
                               " for distinct delays, or an explicit delays list");
        if (doppler == DopplerMode::fixed)
        {
            if (static_cast<int>(dopplers.size()) != paths)
                throw config_error("config: doppler = fixed needs one Doppler value per path");
            for (double v : dopplers)
                if (std::abs(v) > alpha_max + 0.5)
                    throw config_error("config: fixed Doppler exceeds alpha_max + 1/2");
        }
        if (!gains.empty() && static_cast<int>(gains.size()) != paths)
            throw config_error("config: gains must list one value per path");
        if (snr_db.empty())
            throw config_error("config: snr_db must list at least one point");
        if (trials < 1)
            throw config_error("config: trials must be >= 1");
        if (xi() < 0)
            throw config_error("config: xi_nu must be >= 0");
        if (k_nu && *k_nu < 0)
            throw config_error("config: k_nu must be >= 0");
        if (is_fractional() && k_nu && xi() > *k_nu)
            throw config_error("config: xi_nu must not exceed k_nu");
        if (!(grid_resolution > 0.0 && grid_resolution <= 0.5))
            throw config_error("config: grid_resolution must lie in (0, 1/2]");
        if (refine_passes < 0)
            throw config_error("config: refine_passes must be >= 0");
        if (n_iter < 1)
            throw config_error("config: n_iter must be >= 1");
        if (band_width < band_auto)
            throw config_error("config: band_width must be auto, exact or >= 0");

        const int q = guards();
        const FrameLayout lay = [&] {
            try
            {
                return frame_layout();
            }
            catch (const std::exception &e)
            {
                throw config_error(std::string("config: frame layout: ") + e.what());
            }
        }();
        if (lay.kind == LayoutKind::embedded_pilot && 2 * q + 1 >= n)
            throw config_error("config: an embedded pilot with " + std::to_string(q) + " guards does not fit n = " +
                               std::to_string(n));
        if (estimation != EstimationMode::ideal_csi && lay.kind != LayoutKind::embedded_pilot)
            throw config_error("config: channel estimation needs layout = embedded-pilot");
        if (estimation == EstimationMode::fractional)
        {
            if (paths > l_max + 1)
                throw config_error("config: fractional estimation assumes distinct delays");
            if (!delays.empty() && std::set<int>(delays.begin(), delays.end()).size() != delays.size())
                throw config_error("config: fractional estimation assumes distinct delays");
        }
        if (detection_band() && lay.kind == LayoutKind::data_only && q > 0)
            throw config_error("config: a truncated band needs a zero-padded or embedded-pilot layout");
        if (waveform == Waveform::afdm && !is_fractional() && !check_separability(l_max, alpha_max, 0, n))
            throw config_error("config: the delay-Doppler grid does not separate for this n (2a + l + 2al >= n)");

        if (detector == DetectorKind::ml)
        {
            const std::uint64_t m = static_cast<std::uint64_t>(constellation().size());
            std::uint64_t count = 1;
            for (int k = 0; k < lay.data_capacity(); ++k)
            {
                if (count > ml_budget / m)
                    throw capacity_error("config: ML over " + std::to_string(lay.data_capacity()) + " " +
                                         alphabet_name(alphabet) + " symbols exceeds the enumeration budget");
                count *= m;
            }
        }
    }

    std::string SimConfig::canonical() const
    {
        std::ostringstream o;
        auto opt = [](const auto &v) { return v ? std::to_string(*v) : std::string("auto"); };
        o << "schema_version=" << schema_version << "\n";
        o << "waveform=" << to_string(waveform) << "\n";
        o << "n=" << n << "\n";
        o << "alphabet=" << alphabet_name(alphabet) << "\n";
        o << "detector=" << to_string(detector) << "\n";
        o << "paths=" << paths << "\n";
        o << "l_max=" << l_max << "\n";
        o << "alpha_max=" << alpha_max << "\n";
        o << "doppler=" << to_string(doppler) << "\n";
        o << "delays=" << join(delays) << "\n";
        o << "dopplers=" << join(dopplers) << "\n";
        {
            std::string g;
            for (std::size_t i = 0; i < gains.size(); ++i)
                g += (i ? "," : "") + fmt_complex(gains[i]);
            o << "gains=" << g << "\n";
        }
        o << "fractional=" << (fractional ? (*fractional ? "true" : "false") : "auto") << "\n";
        o << "snr_db=" << join(snr_db) << "\n";
        o << "snr_p_db=" << fmt(snr_p_db) << "\n";
        o << "trials=" << trials << "\n";
        o << "seed=" << seed << "\n";
        o << "xi_nu=" << opt(xi_nu) << "\n";
        o << "k_nu=" << opt(k_nu) << "\n";
        o << "estimation=" << to_string(estimation) << "\n";
        o << "grid_resolution=" << fmt(grid_resolution) << "\n";
        o << "refine_passes=" << refine_passes << "\n";
        o << "n_iter=" << n_iter << "\n";
        o << "epsilon=" << fmt(epsilon) << "\n";
        o << "c2_mode=" << to_string(c2_mode) << "\n";
        o << "layout=" << to_string(layout) << "\n";
        o << "band_width="
          << (band_width == band_auto ? std::string("auto") : band_width == band_exact ? std::string("exact") : std::to_string(band_width))
          << "\n";
        o << "ml_budget=" << ml_budget << "\n";
        o << "rank_budget=" << rank_budget << "\n";
        return o.str();
    }

    std::uint64_t SimConfig::hash() const { return fnv1a64(canonical()); }

    std::string SimConfig::hash_hex() const
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
        return buf;
    }

    SimConfig parse_config(const std::string &text)
    {
        SimConfig c;
        bool have_schema = false;
        std::set<std::string> seen;

        using Setter = std::function<void(const std::string &, const std::string &)>;
        auto int_opt = [](std::optional<int> &dst) {
            return [&dst](const std::string &k, const std::string &v) {
                if (lower(v) == "auto")
                    dst.reset();
                else
                    dst = parse_number<int>(k, v);
            };
        };
        const std::map<std::string, Setter> setters = {
            {"schema_version", [&](auto &k, auto &v) { c.schema_version = parse_number<int>(k, v), have_schema = true; }},
            {"waveform",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "afdm")
                     c.waveform = Waveform::afdm;
                 else if (l == "ofdm")
                     c.waveform = Waveform::ofdm;
                 else if (l == "ocdm")
                     c.waveform = Waveform::ocdm;
                 else
                     throw config_error("config: key '" + k + "' expects afdm|ofdm|ocdm");
             }},
            {"n", [&](auto &k, auto &v) { c.n = parse_number<int>(k, v); }},
            {"alphabet",
             [&](auto &, auto &v) {
                 try
                 {
                     c.alphabet = parse_alphabet(lower(v));
                 }
                 catch (const std::exception &e)
                 {
                     throw config_error(std::string("config: ") + e.what());
                 }
             }},
            {"detector",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "ml")
                     c.detector = DetectorKind::ml;
                 else if (l == "lmmse")
                     c.detector = DetectorKind::lmmse;
                 else if (l == "mrc-dfe")
                     c.detector = DetectorKind::mrc_dfe;
                 else
                     throw config_error("config: key '" + k + "' expects ml|lmmse|mrc-dfe");
             }},
            {"paths", [&](auto &k, auto &v) { c.paths = parse_number<int>(k, v); }},
            {"l_max", [&](auto &k, auto &v) { c.l_max = parse_number<int>(k, v); }},
            {"alpha_max", [&](auto &k, auto &v) { c.alpha_max = parse_number<int>(k, v); }},
            {"doppler",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "integer-uniform")
                     c.doppler = DopplerMode::integer_uniform;
                 else if (l == "jakes")
                     c.doppler = DopplerMode::jakes;
                 else if (l == "fixed")
                     c.doppler = DopplerMode::fixed;
                 else
                     throw config_error("config: key '" + k + "' expects integer-uniform|jakes|fixed");
             }},
            {"delays",
             [&](auto &k, auto &v) {
                 c.delays.clear();
                 if (lower(v) != "distinct")
                     for (const auto &s : split_list(v))
                         c.delays.push_back(parse_number<int>(k, s));
             }},
            {"dopplers",
             [&](auto &k, auto &v) {
                 c.dopplers.clear();
                 for (const auto &s : split_list(v))
                     c.dopplers.push_back(parse_number<double>(k, s));
             }},
            {"gains",
             [&](auto &k, auto &v) {
                 c.gains.clear();
                 for (const auto &s : split_list(v))
                     c.gains.push_back(parse_complex(k, s));
             }},
            {"fractional",
             [&](auto &k, auto &v) {
                 if (lower(v) == "auto")
                     c.fractional.reset();
                 else
                     c.fractional = parse_bool(k, v);
             }},
            {"snr_db",
             [&](auto &k, auto &v) {
                 c.snr_db.clear();
                 for (const auto &s : split_list(v))
                     c.snr_db.push_back(parse_number<double>(k, s));
             }},
            {"snr_p_db", [&](auto &k, auto &v) { c.snr_p_db = parse_number<double>(k, v); }},
            {"trials", [&](auto &k, auto &v) { c.trials = parse_number<std::uint64_t>(k, v); }},
            {"seed", [&](auto &k, auto &v) { c.seed = parse_number<std::uint64_t>(k, v); }},
            {"xi_nu", int_opt(c.xi_nu)},
            {"k_nu", int_opt(c.k_nu)},
            {"estimation",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "ideal-csi")
                     c.estimation = EstimationMode::ideal_csi;
                 else if (l == "integer")
                     c.estimation = EstimationMode::integer;
                 else if (l == "fractional")
                     c.estimation = EstimationMode::fractional;
                 else
                     throw config_error("config: key '" + k + "' expects ideal-csi|integer|fractional");
             }},
            {"grid_resolution", [&](auto &k, auto &v) { c.grid_resolution = parse_number<double>(k, v); }},
            {"refine_passes", [&](auto &k, auto &v) { c.refine_passes = parse_number<int>(k, v); }},
            {"n_iter", [&](auto &k, auto &v) { c.n_iter = parse_number<int>(k, v); }},
            {"epsilon", [&](auto &k, auto &v) { c.epsilon = parse_number<double>(k, v); }},
            {"c2_mode",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "irrational")
                     c.c2_mode = C2Mode::irrational;
                 else if (l == "small-rational")
                     c.c2_mode = C2Mode::small_rational;
                 else
                     throw config_error("config: key '" + k + "' expects irrational|small-rational");
             }},
            {"layout",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "auto")
                     c.layout = LayoutChoice::automatic;
                 else if (l == "data-only")
                     c.layout = LayoutChoice::data_only;
                 else if (l == "zero-padded")
                     c.layout = LayoutChoice::zero_padded;
                 else if (l == "embedded-pilot")
                     c.layout = LayoutChoice::embedded_pilot;
                 else
                     throw config_error("config: key '" + k + "' expects auto|data-only|zero-padded|embedded-pilot");
             }},
            {"band_width",
             [&](auto &k, auto &v) {
                 const std::string l = lower(v);
                 if (l == "auto")
                     c.band_width = band_auto;
                 else if (l == "exact")
                     c.band_width = band_exact;
                 else
                 {
                     c.band_width = parse_number<int>(k, v);
                     if (c.band_width < 0)
                         throw config_error("config: band_width must be auto, exact or >= 0");
                 }
             }},
            {"ml_budget", [&](auto &k, auto &v) { c.ml_budget = parse_number<std::uint64_t>(k, v); }},
            {"rank_budget", [&](auto &k, auto &v) { c.rank_budget = parse_number<std::uint64_t>(k, v); }},
        };

        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.resize(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = lower(trim(line.substr(0, eq)));
            const std::string value = trim(line.substr(eq + 1));
            const auto it = setters.find(key);
            if (it == setters.end())
                throw config_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            if (!seen.insert(key).second)
                throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            it->second(key, value);
        }
        if (!have_schema)
            throw config_error("config: missing schema_version");
        return c;
    }

    SimConfig load_config(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw config_error("config: cannot open '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse_config(ss.str());
    }
}
