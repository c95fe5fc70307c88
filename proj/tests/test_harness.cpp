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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "afdm/harness.hpp"

using namespace afdm;

namespace
{
    SimConfig parse(const std::string &body) { return parse_config("schema_version = 1\n" + body); }

    std::string csv(const std::vector<BerRecord> &r)
    {
        std::ostringstream o;
        write_ber_csv(o, r);
        return o.str();
    }

    BerRecord synthetic(double snr_db, double ber)
    {
        BerRecord r;
        r.snr_db = snr_db;
        r.trials = 1000;
        r.bits_per_trial = 100;
        r.ber = ber;
        r.bit_errors = static_cast<std::uint64_t>(std::llround(ber * 1e5));
        return r;
    }

#ifdef AFDM_SIM_PATH
    int run_cli(const std::string &args)
    {
        const std::string cmd = std::string(AFDM_SIM_PATH) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
#endif
}

TEST_CASE("config text", "[harness]")
{
    SECTION("values and comments")
    {
        const SimConfig c = parse("waveform = ocdm  # trailing comment\n"
                                  "n = 64\nalphabet = qpsk\ndetector = mrc-dfe\n"
                                  "paths = 3\nl_max = 2\nalpha_max = 2\ndoppler = jakes\n"
                                  "gains = 1, 0.5-0.2j, -0.3+0.4j\n"
                                  "snr_db = 0, 7.5, 15\ntrials = 12\nseed = 99\nxi_nu = 1\n");
        CHECK(c.waveform == Waveform::ocdm);
        CHECK(c.n == 64);
        CHECK(c.alphabet == AlphabetKind::qpsk);
        CHECK(c.detector == DetectorKind::mrc_dfe);
        CHECK(c.doppler == DopplerMode::jakes);
        REQUIRE(c.gains.size() == 3);
        CHECK(c.gains[1] == cplx(0.5, -0.2));
        CHECK(c.gains[2] == cplx(-0.3, 0.4));
        CHECK(c.snr_db == std::vector<double>{0.0, 7.5, 15.0});
        CHECK(c.trials == 12);
        CHECK(c.seed == 99);
        CHECK(c.xi() == 1);
        CHECK(c.is_fractional());
        CHECK(c.c1() == 1.0 / 128.0); // OCDM
        CHECK(c.c2() == 1.0 / 128.0);
        CHECK_NOTHROW(c.validate());
    }
    SECTION("derived parameters")
    {
        const SimConfig afdm = parse("n = 16\nalpha_max = 1\n");
        CHECK(afdm.c1() == 3.0 / 32.0);
        CHECK(afdm.c2() == Catch::Approx(1.0 / (32.0 * M_PI)));
        CHECK_FALSE(afdm.is_fractional());
        CHECK(afdm.xi() == 0);
        CHECK(afdm.frame_layout().kind == LayoutKind::data_only);
        const SimConfig ofdm = parse("waveform = ofdm\n");
        CHECK(ofdm.c1() == 0.0);
        CHECK(ofdm.c2() == 0.0);
        const SimConfig est = parse("n = 64\nestimation = integer\nsnr_p_db = 30\n");
        CHECK(est.frame_layout().kind == LayoutKind::embedded_pilot);
        CHECK(est.frame_layout().q == est.guards());
        const SimConfig zp = parse("n = 64\ndetector = mrc-dfe\n");
        CHECK(zp.frame_layout().kind == LayoutKind::zero_padded);
    }
    SECTION("canonical form round-trips and hashes stably")
    {
        const SimConfig c = parse("n = 32\ngains = 1, 0.5-0.2j\ndoppler = jakes\nfractional = false\n");
        const SimConfig d = parse_config(c.canonical());
        CHECK(d.canonical() == c.canonical());
        CHECK(d.hash() == c.hash());
        CHECK(c.hash_hex().size() == 16);
        // whitespace and key order do not matter, values do
        const SimConfig e = parse("fractional=false\n doppler =jakes\ngains=1,0.5-0.2j\nn=32");
        CHECK(e.hash() == c.hash());
        CHECK(parse("n = 33\ngains = 1, 0.5-0.2j\ndoppler = jakes\nfractional = false\n").hash() != c.hash());
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    }
    SECTION("rejected input")
    {
        CHECK_THROWS_AS(parse_config("n = 16\n"), config_error);
        CHECK_THROWS_AS(parse("colour = blue\n"), config_error);
        CHECK_THROWS_AS(parse("n = 16\nn = 32\n"), config_error);
        CHECK_THROWS_AS(parse("n = sixteen\n"), config_error);
        CHECK_THROWS_AS(parse("detector = zf\n"), config_error);
        CHECK_THROWS_AS(parse("just a line\n"), config_error);
        CHECK_THROWS_AS(parse_config("schema_version = 2\n").validate(), config_error);
        CHECK_THROWS_AS(parse("paths = 3\nl_max = 1\n").validate(), config_error);
        CHECK_THROWS_AS(parse("n = 16\nl_max = 3\nalpha_max = 2\n").validate(), config_error); // not separable
        CHECK_THROWS_AS(parse("estimation = integer\nlayout = data-only\n").validate(), config_error);
        CHECK_THROWS_AS(load_config("/nonexistent/afdm.cfg"), config_error);
    }
    SECTION("ML size limit")
    {
        CHECK_THROWS_AS(parse("n = 64\ndetector = ml\n").validate(), capacity_error);
        CHECK_NOTHROW(parse("n = 16\ndetector = ml\n").validate());
    }
}

TEST_CASE("BER sweep", "[harness]")
{
    RunOptions quiet;
    quiet.timing = false;
    SECTION("no noise, no errors")
    {
        for (const char *body : {"n = 16\ndetector = ml\n", "n = 64\nalphabet = qpsk\ndetector = lmmse\nl_max = 2\npaths = 3\n",
                                 "n = 64\nalphabet = qpsk\ndetector = mrc-dfe\nn_iter = 200\n",
                                 "n = 64\nalphabet = qpsk\ndetector = lmmse\nestimation = integer\nsnr_p_db = 300\n"})
        {
            SimConfig c = parse(std::string(body) + "snr_db = 300\ntrials = 50\n");
            for (const BerRecord &r : run_ber_sweep(c, quiet))
            {
                CHECK(r.bit_errors == 0);
                CHECK(r.trials == 50);
            }
        }
    }
    SECTION("identity channel follows the Gaussian tail")
    {
        const SimConfig c = parse("n = 16\ndetector = lmmse\npaths = 1\nl_max = 0\nalpha_max = 0\ngains = 1\n"
                                  "snr_db = 0, 4, 8\ntrials = 20000\nseed = 1\n");
        for (const BerRecord &r : run_ber_sweep(c, quiet))
        {
            const double ref = awgn_bpsk_ber(db_to_linear(r.snr_db));
            const double bits = double(r.trials * r.bits_per_trial);
            const double sigma = std::sqrt(ref * (1.0 - ref) / bits);
            CAPTURE(r.snr_db, r.ber, ref);
            CHECK(std::abs(r.ber - ref) < 3.0 * sigma);
            CHECK(r.ber == double(r.bit_errors) / bits);
        }
    }
    SECTION("reproducible and independent of the worker count")
    {
        const SimConfig c = parse("n = 32\nalphabet = qpsk\ndetector = lmmse\ndoppler = jakes\nestimation = fractional\n"
                                  "snr_db = 5, 10\ntrials = 40\nseed = 17\n");
        RunOptions one = quiet, three = quiet;
        one.workers = 1;
        three.workers = 3;
        const SweepResult a = run_sweep(c, one), b = run_sweep(c, three), again = run_sweep(c, one);
        CHECK(csv(a.records) == csv(b.records));
        CHECK(csv(a.records) == csv(again.records));
        std::ostringstream ea, eb;
        write_estimation_csv(ea, c.hash_hex(), a.estimation);
        write_estimation_csv(eb, c.hash_hex(), b.estimation);
        CHECK(ea.str() == eb.str());
        SimConfig other = c;
        other.seed = 18;
        CHECK(csv(run_ber_sweep(other, one)) != csv(a.records));
    }
    SECTION("record layout")
    {
        const SimConfig c = parse("snr_db = 10\ntrials = 3\n");
        const std::vector<BerRecord> r = run_ber_sweep(c, quiet);
        REQUIRE(r.size() == 1);
        CHECK(r[0].config_hash == c.hash_hex());
        CHECK(r[0].bits_per_trial == 16);
        CHECK(r[0].wall_ms == 0.0);
        const std::string text = csv(r);
        CHECK(text.rfind(ber_csv_header() + "\n", 0) == 0);
        CHECK(ber_csv_header() == "config_hash,waveform,detector,snr_db,trials,bit_errors,ber,wall_ms");
        CHECK(text.find(c.hash_hex() + ",afdm,ml,10,3,") != std::string::npos);
    }
}

TEST_CASE("diversity slope", "[harness]")
{
    std::vector<BerRecord> two, three;
    for (double db = 0.0; db <= 30.0; db += 5.0)
    {
        two.push_back(synthetic(db, 0.3 * std::pow(db_to_linear(db), -2.0)));
        three.push_back(synthetic(db, 0.7 * std::pow(db_to_linear(db), -3.0)));
    }
    CHECK(estimate_diversity_slope(two, 0.0, 30.0) == Catch::Approx(-2.0).margin(1e-12));
    CHECK(estimate_diversity_slope(three, 10.0, 25.0) == Catch::Approx(-3.0).margin(1e-12));
    two[3].ber = 0.0;
    CHECK(estimate_diversity_slope(two, 0.0, 30.0) == Catch::Approx(-2.0).margin(1e-12));
    CHECK_THROWS_AS(estimate_diversity_slope(two, 14.0, 16.0), insufficient_data_error);
    CHECK_THROWS_AS(estimate_diversity_slope(two, 12.0, 22.0), insufficient_data_error); // 15 dB is zero
}

TEST_CASE("convergence report", "[harness]")
{
    SECTION("three paths: contraction and agreement with LMMSE")
    {
        const SimConfig c = parse("n = 64\nalphabet = qpsk\ndetector = mrc-dfe\npaths = 3\nl_max = 2\nalpha_max = 2\n"
                                  "snr_db = 5, 20\ntrials = 10\nn_iter = 5000\nepsilon = 1e-12\n");
        const auto rows = run_convergence_report(c);
        CHECK(rows.size() == 20);
        for (const auto &r : rows)
        {
            CHECK(r.rho < 1.0);
            CHECK(r.converged);
            CHECK(r.gap_to_lmmse < 1e-6);
            CHECK(r.op_count == r.op_formula);
        }
    }
    SECTION("single path: one iteration")
    {
        const SimConfig c = parse("n = 16\ndetector = mrc-dfe\npaths = 1\nl_max = 0\nalpha_max = 0\nsnr_db = 10\ntrials = 5\n");
        for (const auto &r : run_convergence_report(c))
        {
            CHECK(r.iterations == 1);
            CHECK(r.rho == 0.0);
        }
    }
}

TEST_CASE("diversity check", "[harness]")
{
    const SimConfig c = parse("n = 8\npaths = 2\nl_max = 1\nalpha_max = 1\ntrials = 4\n");
    for (const auto &r : run_diversity_check(c))
    {
        CHECK(r.exhaustive);
        CHECK(r.separable);
        CHECK(r.min_rank == 2);
    }
}

TEST_CASE("reference curves", "[harness]")
{
    CHECK(awgn_bpsk_ber(1.0) == Catch::Approx(0.0786496).epsilon(1e-5));
    CHECK(awgn_bpsk_ber(0.0) == 0.5);
    CHECK(db_to_linear(10.0) == Catch::Approx(10.0));
    BerRecord r = synthetic(0.0, 0.01);
    CHECK(r.sigma() == Catch::Approx(std::sqrt(0.01 * 0.99 / 1e5)));
}

#ifdef AFDM_SIM_PATH
TEST_CASE("command line exit codes", "[harness][cli]")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "afdm_cli_test";
    fs::create_directories(dir);
    auto write = [&](const std::string &name, const std::string &text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const std::string good = write("good.cfg", "schema_version = 1\nn = 16\nsnr_db = 20\ntrials = 5\n");
    const std::string bad = write("bad.cfg", "schema_version = 1\nn = 16\nbogus = 1\n");
    const std::string big = write("big.cfg", "schema_version = 1\nn = 128\ndetector = ml\n");
    const std::string out = (dir / "out.csv").string();

    CHECK(run_cli("simulate --config " + good + " --out " + out + " --no-timing") == 0);
    std::ifstream f(out);
    std::string header;
    std::getline(f, header);
    CHECK(header == ber_csv_header());
    CHECK(run_cli("simulate --config " + bad + " --out " + out) == 2);
    CHECK(run_cli("simulate --config " + big + " --out " + out) == 3);
    CHECK(run_cli("simulate --config " + (dir / "missing.cfg").string() + " --out " + out) == 2);
    CHECK(run_cli("simulate --out " + out) == 2);
    CHECK(run_cli("convergence-check --config " + good + " --seed 4") == 0);
    fs::remove_all(dir);
}
#endif
