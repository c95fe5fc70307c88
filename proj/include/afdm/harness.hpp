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

#ifndef AFDM_HARNESS_HPP
#define AFDM_HARNESS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "afdm/config.hpp"

namespace afdm
{
    struct BerRecord
    {
        std::string config_hash;
        Waveform waveform = Waveform::afdm;
        DetectorKind detector = DetectorKind::ml;
        double snr_db = 0.0;
        std::uint64_t trials = 0;         // frames that reached the detector
        std::uint64_t bits_per_trial = 0; // data bits per frame
        std::uint64_t bit_errors = 0;
        double ber = 0.0;
        double wall_ms = 0.0;

        // Binomial standard deviation of the BER estimate.
        double sigma() const;
    };

    struct EstimationStats
    {
        double snr_db = 0.0;
        double snr_p_db = 0.0;
        std::uint64_t trials = 0;
        std::uint64_t failures = 0;       // estimator raised estimation_error
        std::uint64_t exact_recovery = 0; // every (delay, integer Doppler) pair found
        double error_energy = 0.0;        // sum |h_est - h|^2 over paths and trials
        double gain_energy = 0.0;         // sum |h|^2

        double recovery_rate() const;
        double nmse_db() const;
    };

    struct SweepResult
    {
        std::vector<BerRecord> records;
        std::vector<EstimationStats> estimation; // empty for ideal-CSI runs
        int k_nu = 0;
        int xi_nu = 0;
        int guards = 0;
    };

    struct RunOptions
    {
        int workers = 0;     // <= 0: AFDM_WORKERS, else hardware concurrency
        bool timing = true;  // false writes wall_ms = 0 so repeated runs are byte-identical
    };

    // AFDM_WORKERS when set to a positive integer, otherwise the hardware concurrency.
    int worker_count(int requested = 0);

    // Monte-Carlo BER over the configured SNR grid. Trial t draws from stream (seed, t) in the
    // order: gains, Dopplers, bits, noise; the same draws are reused at every SNR point.
    SweepResult run_sweep(const SimConfig &cfg, const RunOptions &opt = {});
    std::vector<BerRecord> run_ber_sweep(const SimConfig &cfg, const RunOptions &opt = {});

    // Least-squares slope of log10(BER) against log10(SNR) over records with
    // snr_lo_db <= snr_db <= snr_hi_db and non-zero BER.
    double estimate_diversity_slope(const std::vector<BerRecord> &records, double snr_lo_db, double snr_hi_db);

    struct ConvergenceRow
    {
        std::uint64_t channel = 0;
        double snr_db = 0.0;
        double rho = 0.0;
        int iterations = 0;
        bool converged = false;
        double final_delta = 0.0;
        double gap_to_lmmse = 0.0; // max |x_dfe - x_lmmse|
        std::int64_t op_count = 0;
        std::int64_t op_formula = 0; // iterations (5L + 1)(number of data symbols)
    };

    std::vector<ConvergenceRow> run_convergence_report(const SimConfig &cfg, const RunOptions &opt = {});

    struct DiversityRow
    {
        std::uint64_t channel = 0;
        bool separable = false;
        int paths = 0;
        int min_rank = 0;
        std::uint64_t evaluated = 0;
        bool exhaustive = false;
    };

    std::vector<DiversityRow> run_diversity_check(const SimConfig &cfg, const RunOptions &opt = {});

    std::string ber_csv_header();
    void write_ber_csv(std::ostream &out, const std::vector<BerRecord> &records);
    std::string estimation_csv_header();
    void write_estimation_csv(std::ostream &out, const std::string &config_hash, const std::vector<EstimationStats> &stats);
    void write_convergence_csv(std::ostream &out, const std::vector<ConvergenceRow> &rows);
    void write_diversity_csv(std::ostream &out, const std::vector<DiversityRow> &rows);

    // BPSK over AWGN: Q(sqrt(2 snr)).
    double awgn_bpsk_ber(double snr_linear);
    double db_to_linear(double db);
}

#endif
