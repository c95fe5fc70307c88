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

#ifndef AFDM_RNG_HPP
#define AFDM_RNG_HPP

#include <cstdint>
#include <random>

#include "afdm/types.hpp"

namespace afdm
{
    // Seedable, splittable pseudorandom source. Every Monte-Carlo trial owns one stream
    // derived from (master seed, trial index), so results do not depend on scheduling.
    class SeededRng
    {
    public:
        explicit SeededRng(std::uint64_t seed) : engine_(mix(seed)) {}
        SeededRng(std::uint64_t master_seed, std::uint64_t stream)
            : engine_(mix(master_seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

        // Independent child stream; the parent advances by one draw.
        SeededRng split() { return SeededRng(engine_(), 0xA5A5A5A5ULL); }

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
        int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
        double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

        // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
        cplx complex_normal(double variance)
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = normal();
            const double im = normal();
            return {s * re, s * im};
        }

        std::uint64_t next_u64() { return engine_(); }
        std::mt19937_64 &engine() { return engine_; }

        // SplitMix64 finalizer.
        static std::uint64_t mix(std::uint64_t z)
        {
            z += 0x9E3779B97F4A7C15ULL;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        }

    private:
        std::mt19937_64 engine_;
    };
}

#endif
