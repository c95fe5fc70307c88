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

// afdm-sim command line: Monte-Carlo sweeps, estimation runs and the two analysis checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "afdm/harness.hpp"

namespace
{
    constexpr int exit_config = 2;
    constexpr int exit_infeasible = 3;

    afdm::SimConfig load(const std::string &path, const std::optional<std::uint64_t> &seed)
    {
        afdm::SimConfig cfg = afdm::load_config(path);
        if (seed)
            cfg.seed = *seed;
        return cfg;
    }

    std::ofstream open_out(const std::string &path)
    {
        std::ofstream f(path);
        if (!f)
            throw afdm::config_error("cannot write '" + path + "'");
        return f;
    }

    std::string sibling(const std::string &path, const std::string &suffix)
    {
        const auto dot = path.rfind('.');
        const auto slash = path.find_last_of("/\\");
        if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
            return path + suffix;
        return path.substr(0, dot) + suffix + path.substr(dot);
    }

    void print_records(const std::vector<afdm::BerRecord> &records)
    {
        for (const auto &r : records)
            std::printf("  snr %6.2f dB  trials %10llu  errors %10llu  ber %.4e\n", r.snr_db,
                        static_cast<unsigned long long>(r.trials), static_cast<unsigned long long>(r.bit_errors), r.ber);
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"afdm-sim: AFDM link-level simulation"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    bool no_timing = false;
    int workers = 0;

    auto common = [&](CLI::App *sub, bool needs_out) {
        sub->add_option("--config", config_path, "experiment file (key = value)")->required()->check(CLI::ExistingFile);
        auto *o = sub->add_option("--out", out_path, "CSV output path");
        if (needs_out)
            o->required();
        sub->add_option("--seed", seed, "override the master seed");
        sub->add_option("--workers", workers, "worker threads (default: AFDM_WORKERS or all cores)");
    };

    auto *simulate = app.add_subcommand("simulate", "BER sweep over the configured SNR grid");
    common(simulate, true);
    simulate->add_flag("--no-timing", no_timing, "write wall_ms = 0 for byte-identical reruns");

    auto *estimate = app.add_subcommand("estimate", "BER sweep with embedded-pilot channel estimation");
    common(estimate, true);
    estimate->add_flag("--no-timing", no_timing, "write wall_ms = 0 for byte-identical reruns");

    auto *diversity = app.add_subcommand("diversity-check", "minimum rank of the pairwise-error matrix per channel");
    common(diversity, false);

    auto *convergence = app.add_subcommand("convergence-check", "spectral radius and DFE iteration counts per channel");
    common(convergence, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        afdm::RunOptions opt;
        opt.workers = workers;
        opt.timing = !no_timing;

        if (simulate->parsed() || estimate->parsed())
        {
            afdm::SimConfig cfg = load(config_path, seed);
            if (estimate->parsed() && cfg.estimation == afdm::EstimationMode::ideal_csi)
                cfg.estimation = cfg.is_fractional() ? afdm::EstimationMode::fractional : afdm::EstimationMode::integer;
            const afdm::SweepResult res = afdm::run_sweep(cfg, opt);
            auto f = open_out(out_path);
            afdm::write_ber_csv(f, res.records);
            std::printf("config %s  waveform %s  detector %s  guards %d  xi_nu %d  k_nu %d\n", cfg.hash_hex().c_str(),
                        afdm::to_string(cfg.waveform).c_str(), afdm::to_string(cfg.detector).c_str(), res.guards, res.xi_nu,
                        res.k_nu);
            print_records(res.records);
            if (!res.estimation.empty())
            {
                const std::string stats_path = sibling(out_path, "_estimation");
                auto g = open_out(stats_path);
                afdm::write_estimation_csv(g, cfg.hash_hex(), res.estimation);
                for (const auto &e : res.estimation)
                    std::printf("  snr %6.2f dB  recovery %.4f  gain NMSE %.2f dB  failures %llu\n", e.snr_db,
                                e.recovery_rate(), e.nmse_db(), static_cast<unsigned long long>(e.failures));
                std::printf("estimation statistics: %s\n", stats_path.c_str());
            }
        }
        else if (diversity->parsed())
        {
            const afdm::SimConfig cfg = load(config_path, seed);
            const auto rows = afdm::run_diversity_check(cfg, opt);
            int worst = -1, full = 0;
            for (const auto &r : rows)
            {
                worst = worst < 0 ? r.min_rank : std::min(worst, r.min_rank);
                full += r.min_rank == r.paths;
            }
            std::printf("channels %zu  full rank %d  minimum rank %d of %d paths\n", rows.size(), full, worst, cfg.paths);
            if (!out_path.empty())
            {
                auto f = open_out(out_path);
                afdm::write_diversity_csv(f, rows);
            }
        }
        else if (convergence->parsed())
        {
            const afdm::SimConfig cfg = load(config_path, seed);
            const auto rows = afdm::run_convergence_report(cfg, opt);
            double rho_max = 0.0, gap_max = 0.0;
            int converged = 0, iter_max = 0;
            for (const auto &r : rows)
            {
                rho_max = std::max(rho_max, r.rho);
                gap_max = std::max(gap_max, r.gap_to_lmmse);
                converged += r.converged;
                iter_max = std::max(iter_max, r.iterations);
            }
            std::printf("systems %zu  max rho %.6f  converged %d  max iterations %d  max |dfe - lmmse| %.3e\n", rows.size(),
                        rho_max, converged, iter_max, gap_max);
            if (!out_path.empty())
            {
                auto f = open_out(out_path);
                afdm::write_convergence_csv(f, rows);
            }
        }
    }
    catch (const afdm::config_error &e)
    {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return exit_config;
    }
    catch (const afdm::capacity_error &e)
    {
        std::fprintf(stderr, "infeasible detector: %s\n", e.what());
        return exit_infeasible;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
