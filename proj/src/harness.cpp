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

#include "afdm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "afdm/analysis.hpp"
#include "afdm/detect.hpp"
#include "afdm/estimate.hpp"

namespace afdm
{
    double BerRecord::sigma() const
    {
        const double bits = static_cast<double>(trials) * static_cast<double>(bits_per_trial);
        return bits > 0.0 ? std::sqrt(std::max(ber * (1.0 - ber), 0.0) / bits) : 0.0;
    }

    double EstimationStats::recovery_rate() const
    {
        const std::uint64_t attempted = trials + failures;
        return attempted ? static_cast<double>(exact_recovery) / static_cast<double>(attempted) : 0.0;
    }

    double EstimationStats::nmse_db() const
    {
        if (gain_energy <= 0.0)
            return 0.0;
        return 10.0 * std::log10(std::max(error_energy / gain_energy, 1e-300));
    }

    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    double awgn_bpsk_ber(double snr_linear) { return 0.5 * std::erfc(std::sqrt(snr_linear)); }

    int worker_count(int requested)
    {
        if (requested > 0)
            return requested;
        if (const char *env = std::getenv("AFDM_WORKERS"))
        {
            char *end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && *end == '\0' && v > 0)
                return static_cast<int>(std::min<long>(v, 1024));
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    namespace
    {
        // Runs body(t) for t in [0, count) on `workers` threads, trial t on thread t mod workers.
        template <typename Body> void parallel_trials(std::uint64_t count, int workers, Body body)
        {
            workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), std::max<std::uint64_t>(count, 1)));
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto run = [&](int w) {
                try
                {
                    for (std::uint64_t t = static_cast<std::uint64_t>(w); t < count; t += static_cast<std::uint64_t>(workers))
                        body(t, w);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            };
            if (workers == 1)
                run(0);
            else
            {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w)
                    pool.emplace_back(run, w);
                for (auto &th : pool)
                    th.join();
            }
            if (failure)
                std::rethrow_exception(failure);
        }

        LtvChannel draw_channel(const SimConfig &cfg, SeededRng &rng)
        {
            LtvChannel ch = random_channel(cfg.channel_spec(), cfg.n, rng);
            if (!cfg.is_fractional())
                for (auto &path : ch.paths)
                    path.doppler = path.doppler_int();
            return ch;
        }

        std::vector<std::uint8_t> draw_bits(std::size_t count, SeededRng &rng)
        {
            std::vector<std::uint8_t> bits(count);
            std::uint64_t word = 0;
            for (std::size_t i = 0; i < count; ++i)
            {
                if (i % 64 == 0)
                    word = rng.next_u64();
                bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
            }
            return bits;
        }

        // Frame -> prefix -> channel -> strip -> DAFT-domain observation, noiseless.
        CVector through_channel(const CVector &frame, const DaftParams &p, int l_cp, const LtvChannel &ch)
        {
            const CVector s = add_cpp(modulate(frame, p), l_cp, p.c1);
            return demodulate(strip_cpp(apply_channel(s, l_cp, ch), l_cp), p);
        }

        struct PointAccumulator
        {
            std::uint64_t trials = 0;
            std::uint64_t bit_errors = 0;
            std::uint64_t failures = 0;
            std::uint64_t exact = 0;
            double seconds = 0.0;
        };

        struct SweepSetup
        {
            DaftParams params;
            FrameLayout layout;
            Alphabet alphabet;
            int l_cp = 0;
            int xi = 0;
            int kv = 0;
            std::optional<int> band;
            bool estimation = false;
            std::size_t data_symbols = 0;
            std::size_t bits = 0;
        };

        SweepSetup make_setup(const SimConfig &cfg)
        {
            SweepSetup s{cfg.params(), cfg.frame_layout(), cfg.constellation(), 0, 0, 0, std::nullopt, false, 0, 0};
            s.l_cp = cfg.l_max;
            s.xi = cfg.xi();
            s.kv = cfg.kv();
            s.band = cfg.detection_band();
            s.estimation = cfg.estimation != EstimationMode::ideal_csi;
            s.data_symbols = static_cast<std::size_t>(s.layout.data_capacity());
            s.bits = s.data_symbols * static_cast<std::size_t>(s.alphabet.bits_per_symbol());
            return s;
        }

        bool same_support(const std::vector<PathEstimate> &est, const LtvChannel &ch)
        {
            std::multiset<std::pair<int, int>> a, b;
            for (const auto &e : est)
                a.emplace(e.delay, e.doppler_int);
            for (const auto &p : ch.paths)
                b.emplace(p.delay, p.doppler_int());
            return a == b;
        }

        // Squared gain error with estimates matched to true paths by (delay, integer Doppler)
        // in the integer case and by delay in the fractional case.
        double gain_error(const std::vector<PathEstimate> &est, const LtvChannel &ch, bool by_delay)
        {
            std::vector<bool> used(est.size(), false);
            double err = 0.0;
            for (const auto &p : ch.paths)
            {
                bool found = false;
                for (std::size_t k = 0; k < est.size() && !found; ++k)
                    if (!used[k] && est[k].delay == p.delay && (by_delay || est[k].doppler_int == p.doppler_int()))
                    {
                        used[k] = true;
                        found = true;
                        err += std::norm(est[k].gain - p.gain);
                    }
                if (!found)
                    err += std::norm(p.gain);
            }
            for (std::size_t k = 0; k < est.size(); ++k)
                if (!used[k])
                    err += std::norm(est[k].gain);
            return err;
        }
    }

    SweepResult run_sweep(const SimConfig &cfg, const RunOptions &opt)
    {
        cfg.validate();
        const SweepSetup setup = make_setup(cfg);
        const int workers = worker_count(opt.workers);
        const std::size_t points = cfg.snr_db.size();
        const std::uint64_t trials = cfg.trials;

        std::vector<std::vector<PointAccumulator>> acc(workers, std::vector<PointAccumulator>(points));
        // per (point, trial) energies, summed in trial order afterwards so the totals do not
        // depend on the worker count
        std::vector<std::vector<double>> err_energy, gain_energy;
        if (setup.estimation)
        {
            err_energy.assign(points, std::vector<double>(trials, 0.0));
            gain_energy.assign(points, std::vector<double>(trials, 0.0));
        }

        const double snr_p = db_to_linear(cfg.snr_p_db);
        const auto &pts = setup.alphabet;

        parallel_trials(trials, workers, [&](std::uint64_t t, int w) {
            SeededRng rng(cfg.seed, t);
            const LtvChannel ch = draw_channel(cfg, rng);
            const std::vector<std::uint8_t> bits = draw_bits(setup.bits, rng);
            const CVector noise = demodulate(awgn(cfg.n, 1.0, rng), setup.params);

            const std::vector<cplx> data = map_bits(bits, pts);
            const CVector y_data = through_channel(build_frame(data, setup.layout), setup.params, setup.l_cp, ch);
            CVector y_pilot;
            if (setup.layout.has_pilot())
            {
                const std::vector<cplx> zeros(setup.data_symbols, cplx(0.0, 0.0));
                y_pilot = through_channel(build_frame(zeros, setup.layout, 1.0), setup.params, setup.l_cp, ch);
            }

            // Ideal CSI is independent of the SNR point.
            BandedSystem ideal_sys;
            CVector ideal_col0;
            if (!setup.estimation)
            {
                const EffectiveChannel heff = build_effective(ch, setup.params, setup.kv, setup.xi, false);
                ideal_sys = band_truncate(heff, setup.layout, setup.band, cfg.alpha_max);
                if (setup.layout.has_pilot())
                {
                    ideal_col0.resize(cfg.n);
                    for (int r = 0; r < cfg.n; ++r)
                        ideal_col0[r] = heff.entry(r, setup.layout.pilot_index());
                }
            }

            std::optional<LmmseSystem> lmmse_cache;
            for (std::size_t s = 0; s < points; ++s)
            {
                const auto t0 = std::chrono::steady_clock::now();
                PointAccumulator &a = acc[w][s];
                const double n0 = 1.0 / db_to_linear(cfg.snr_db[s]);
                CVector y = y_data + std::sqrt(n0) * noise;
                const double xp = std::sqrt(snr_p * n0);
                if (setup.layout.has_pilot())
                    y += xp * y_pilot;

                const BandedSystem *sys = &ideal_sys;
                const CVector *col0 = &ideal_col0;
                BandedSystem est_sys;
                CVector est_col0;
                if (setup.estimation)
                {
                    const EstimationWindow win = extract_window(y, setup.layout, setup.params, cfg.alpha_max, setup.xi, xp);
                    std::vector<PathEstimate> est;
                    try
                    {
                        est = cfg.estimation == EstimationMode::integer
                                  ? estimate_integer(win, cfg.paths, cfg.l_max, cfg.alpha_max)
                                  : estimate_fractional(win, cfg.paths, cfg.l_max, cfg.alpha_max, cfg.grid_resolution,
                                                        cfg.refine_passes);
                    }
                    catch (const estimation_error &)
                    {
                        ++a.failures;
                        a.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                        continue;
                    }
                    if (same_support(est, ch))
                        ++a.exact;
                    double g = 0.0;
                    for (const auto &p : ch.paths)
                        g += std::norm(p.gain);
                    err_energy[s][t] = gain_error(est, ch, cfg.estimation == EstimationMode::fractional);
                    gain_energy[s][t] = g;

                    const EffectiveChannel heff = build_effective(to_channel(est, cfg.n), setup.params, setup.kv, setup.xi, false);
                    est_sys = band_truncate(heff, setup.layout, setup.band, cfg.alpha_max);
                    est_col0.resize(cfg.n);
                    for (int r = 0; r < cfg.n; ++r)
                        est_col0[r] = heff.entry(r, setup.layout.pilot_index());
                    sys = &est_sys;
                    col0 = &est_col0;
                }

                CVector y_det(static_cast<Eigen::Index>(sys->y_index.size()));
                for (std::size_t j = 0; j < sys->y_index.size(); ++j)
                {
                    const int r = sys->y_index[j];
                    y_det[static_cast<Eigen::Index>(j)] = y[r] - (setup.layout.has_pilot() ? xp * (*col0)[r] : cplx(0.0, 0.0));
                }

                std::vector<cplx> hard;
                switch (cfg.detector)
                {
                case DetectorKind::ml:
                    hard = ml_detect(y_det, sys->h, pts, cfg.ml_budget);
                    break;
                case DetectorKind::lmmse:
                {
                    if (setup.estimation || !lmmse_cache)
                        lmmse_cache.emplace(sys->h);
                    const CVector soft = lmmse_cache->solve(y_det, 1.0 / n0);
                    if (setup.estimation)
                        lmmse_cache.reset();
                    hard.resize(soft.size());
                    for (Eigen::Index k = 0; k < soft.size(); ++k)
                        hard[k] = pts.slice(soft[k]);
                    break;
                }
                case DetectorKind::mrc_dfe:
                {
                    DfeConfig dc;
                    dc.gamma = 1.0 / n0;
                    dc.n_iter = cfg.n_iter;
                    dc.epsilon = cfg.epsilon;
                    hard = mrc_dfe_detect(y_det, sys->h, dc, pts).hard;
                    break;
                }
                }
                const std::vector<std::uint8_t> got = demap_bits(hard, pts);
                std::uint64_t errors = 0;
                for (std::size_t b = 0; b < bits.size(); ++b)
                    errors += got[b] != bits[b];
                a.bit_errors += errors;
                ++a.trials;
                a.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        });

        SweepResult out;
        out.k_nu = setup.kv;
        out.xi_nu = setup.xi;
        out.guards = cfg.guards();
        const std::string hash = cfg.hash_hex();
        for (std::size_t s = 0; s < points; ++s)
        {
            PointAccumulator total;
            for (int w = 0; w < workers; ++w)
            {
                total.trials += acc[w][s].trials;
                total.bit_errors += acc[w][s].bit_errors;
                total.failures += acc[w][s].failures;
                total.exact += acc[w][s].exact;
                total.seconds += acc[w][s].seconds;
            }
            BerRecord r;
            r.config_hash = hash;
            r.waveform = cfg.waveform;
            r.detector = cfg.detector;
            r.snr_db = cfg.snr_db[s];
            r.trials = total.trials;
            r.bits_per_trial = setup.bits;
            r.bit_errors = total.bit_errors;
            const double nbits = static_cast<double>(r.trials) * static_cast<double>(r.bits_per_trial);
            r.ber = nbits > 0.0 ? static_cast<double>(r.bit_errors) / nbits : 0.0;
            r.wall_ms = opt.timing ? 1e3 * total.seconds / workers : 0.0;
            out.records.push_back(r);

            if (setup.estimation)
            {
                EstimationStats e;
                e.snr_db = cfg.snr_db[s];
                e.snr_p_db = cfg.snr_p_db;
                e.trials = total.trials;
                e.failures = total.failures;
                e.exact_recovery = total.exact;
                for (std::uint64_t t = 0; t < trials; ++t)
                {
                    e.error_energy += err_energy[s][t];
                    e.gain_energy += gain_energy[s][t];
                }
                out.estimation.push_back(e);
            }
        }
        return out;
    }

    std::vector<BerRecord> run_ber_sweep(const SimConfig &cfg, const RunOptions &opt) { return run_sweep(cfg, opt).records; }

    double estimate_diversity_slope(const std::vector<BerRecord> &records, double snr_lo_db, double snr_hi_db)
    {
        std::vector<std::pair<double, double>> xy;
        for (const auto &r : records)
            if (r.snr_db >= snr_lo_db && r.snr_db <= snr_hi_db && r.ber > 0.0)
                xy.emplace_back(r.snr_db / 10.0, std::log10(r.ber));
        if (xy.size() < 2)
            throw insufficient_data_error("estimate_diversity_slope: fewer than two non-zero BER points in [" +
                                          std::to_string(snr_lo_db) + ", " + std::to_string(snr_hi_db) + "] dB");
        double mx = 0.0, my = 0.0;
        for (const auto &[x, y] : xy)
            mx += x, my += y;
        mx /= static_cast<double>(xy.size());
        my /= static_cast<double>(xy.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto &[x, y] : xy)
            sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
        if (sxx == 0.0)
            throw insufficient_data_error("estimate_diversity_slope: all points share one SNR");
        return sxy / sxx;
    }

    std::vector<ConvergenceRow> run_convergence_report(const SimConfig &cfg, const RunOptions &opt)
    {
        SimConfig c = cfg;
        c.detector = DetectorKind::mrc_dfe;
        c.validate();
        const SweepSetup setup = make_setup(c);
        const std::size_t points = c.snr_db.size();
        std::vector<ConvergenceRow> rows(c.trials * points);

        parallel_trials(c.trials, worker_count(opt.workers), [&](std::uint64_t t, int) {
            SeededRng rng(c.seed, t);
            const LtvChannel ch = draw_channel(c, rng);
            const EffectiveChannel heff = build_effective(ch, setup.params, setup.kv, setup.xi, false);
            const BandedSystem sys = band_truncate(heff, setup.layout, setup.band, c.alpha_max);
            const std::vector<cplx> data = map_bits(draw_bits(setup.bits, rng), setup.alphabet);
            CVector x(static_cast<Eigen::Index>(data.size()));
            for (std::size_t k = 0; k < data.size(); ++k)
                x[static_cast<Eigen::Index>(k)] = data[k];
            const CVector clean = sys.h.multiply(x);
            const CVector noise = awgn(sys.h.rows, 1.0, rng);
            const int l = sys.h.max_column_nnz();

            for (std::size_t s = 0; s < points; ++s)
            {
                const double gamma = db_to_linear(c.snr_db[s]);
                const CVector y = clean + std::sqrt(1.0 / gamma) * noise;
                DfeConfig dc;
                dc.gamma = gamma;
                dc.n_iter = c.n_iter;
                dc.epsilon = c.epsilon;
                const DetectionResult r = mrc_dfe_detect(y, sys.h, dc);
                const CVector ref = lmmse_detect(y, sys.h, gamma);
                const double eps = c.epsilon > 0.0 ? c.epsilon : 1e-6 * std::sqrt(static_cast<double>(sys.h.cols));

                ConvergenceRow &row = rows[t * points + s];
                row.channel = t;
                row.snr_db = c.snr_db[s];
                row.rho = spectral_radius(sys.h, gamma);
                row.iterations = r.iterations_used;
                row.final_delta = r.final_delta;
                row.converged = r.final_delta < eps;
                row.gap_to_lmmse = (r.symbols - ref).cwiseAbs().maxCoeff();
                row.op_count = r.op_count;
                row.op_formula = static_cast<std::int64_t>(r.iterations_used) * (5 * l + 1) * sys.h.cols;
            }
        });
        return rows;
    }

    std::vector<DiversityRow> run_diversity_check(const SimConfig &cfg, const RunOptions &opt)
    {
        SimConfig c = cfg;
        if (c.detector == DetectorKind::ml)
            c.detector = DetectorKind::lmmse; // the rank check does not enumerate frames
        c.validate();
        const DaftParams p = c.params();
        const Alphabet a = c.constellation();
        std::vector<DiversityRow> rows(c.trials);
        parallel_trials(c.trials, worker_count(opt.workers), [&](std::uint64_t t, int) {
            SeededRng rng(c.seed, t);
            const LtvChannel ch = draw_channel(c, rng);
            const RankSearch rs = min_rank_over_deltas(ch, p, a, c.rank_budget, SeededRng::mix(c.seed ^ (t + 1)));
            DiversityRow &row = rows[t];
            row.channel = t;
            row.separable = check_separability(ch.max_delay(), c.alpha_max, c.is_fractional() ? c.kv() : 0, c.n);
            row.paths = static_cast<int>(ch.paths.size());
            row.min_rank = rs.min_rank;
            row.evaluated = rs.evaluated;
            row.exhaustive = rs.exhaustive;
        });
        return rows;
    }

    namespace
    {
        std::string num(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }
    }

    std::string ber_csv_header() { return "config_hash,waveform,detector,snr_db,trials,bit_errors,ber,wall_ms"; }

    void write_ber_csv(std::ostream &out, const std::vector<BerRecord> &records)
    {
        out << ber_csv_header() << "\n";
        for (const auto &r : records)
            out << r.config_hash << "," << to_string(r.waveform) << "," << to_string(r.detector) << "," << num(r.snr_db) << ","
                << r.trials << "," << r.bit_errors << "," << num(r.ber) << "," << num(std::round(r.wall_ms * 1000.0) / 1000.0)
                << "\n";
    }

    std::string estimation_csv_header()
    {
        return "config_hash,snr_db,snr_p_db,trials,failures,exact_recovery,recovery_rate,gain_nmse_db";
    }

    void write_estimation_csv(std::ostream &out, const std::string &config_hash, const std::vector<EstimationStats> &stats)
    {
        out << estimation_csv_header() << "\n";
        for (const auto &e : stats)
            out << config_hash << "," << num(e.snr_db) << "," << num(e.snr_p_db) << "," << e.trials << "," << e.failures << ","
                << e.exact_recovery << "," << num(e.recovery_rate()) << "," << num(e.nmse_db()) << "\n";
    }

    void write_convergence_csv(std::ostream &out, const std::vector<ConvergenceRow> &rows)
    {
        out << "channel,snr_db,rho,iterations,converged,final_delta,gap_to_lmmse,op_count,op_formula\n";
        for (const auto &r : rows)
            out << r.channel << "," << num(r.snr_db) << "," << num(r.rho) << "," << r.iterations << "," << (r.converged ? 1 : 0)
                << "," << num(r.final_delta) << "," << num(r.gap_to_lmmse) << "," << r.op_count << "," << r.op_formula << "\n";
    }

    void write_diversity_csv(std::ostream &out, const std::vector<DiversityRow> &rows)
    {
        out << "channel,separable,paths,min_rank,evaluated,exhaustive\n";
        for (const auto &r : rows)
            out << r.channel << "," << (r.separable ? 1 : 0) << "," << r.paths << "," << r.min_rank << "," << r.evaluated << ","
                << (r.exhaustive ? 1 : 0) << "\n";
    }
}
