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

#ifndef AFDM_TYPES_HPP
#define AFDM_TYPES_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace afdm
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    // Length or shape mismatch between an input and the parameters that own it.
    class dimension_error : public std::invalid_argument
    {
    public:
        explicit dimension_error(const std::string &what) : std::invalid_argument(what) {}
    };

    // Parameters that cannot produce a valid system (guards too short, prefix shorter than
    // the delay spread, unknown config keys, ...).
    class config_error : public std::invalid_argument
    {
    public:
        explicit config_error(const std::string &what) : std::invalid_argument(what) {}
    };

    // A detector was asked to do more work than its enumeration budget allows.
    class capacity_error : public std::runtime_error
    {
    public:
        explicit capacity_error(const std::string &what) : std::runtime_error(what) {}
    };

    class estimation_error : public std::runtime_error
    {
    public:
        explicit estimation_error(const std::string &what) : std::runtime_error(what) {}
    };

    class insufficient_data_error : public std::runtime_error
    {
    public:
        explicit insufficient_data_error(const std::string &what) : std::runtime_error(what) {}
    };

    // exp(-j*2*pi*phase_cycles), evaluated after reducing the phase to [0, 1) cycles.
    // c * k mod 1 for integer-valued k, with the rounding error of the product folded back in.
    // Plain c * k loses ~|c k| * 1e-16 cycles, which at k = N^2 is visible in unitarity checks.
    inline double cycles_mod1(double c, double k)
    {
        const double prod = c * k;
        const double err = std::fma(c, k, -prod);
        const double whole = std::floor(prod);
        const double frac = (prod - whole) + err;
        return frac - std::floor(frac);
    }

    inline cplx unit_phasor(double phase_cycles)
    {
        const double frac = phase_cycles - std::floor(phase_cycles);
        return std::polar(1.0, -two_pi * frac);
    }
}

#endif
