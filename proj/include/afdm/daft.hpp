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

#ifndef AFDM_DAFT_HPP
#define AFDM_DAFT_HPP

#include "afdm/types.hpp"

namespace afdm
{
    // Transform length and the two chirp rates of the discrete affine Fourier transform.
    // c1 = c2 = 0 is the unitary DFT; c1 = c2 = 1/(2N) is the discrete Fresnel transform (OCDM).
    struct DaftParams
    {
        int n = 1;
        double c1 = 0.0;
        double c2 = 0.0;

        DaftParams() = default;
        DaftParams(int n_, double c1_, double c2_);
    };

    // S_m = N^{-1/2} e^{-j2pi c2 m^2} sum_n e^{-j2pi(mn/N + c1 n^2)} x_n, computed as
    // chirp multiply -> FFT -> chirp multiply.
    CVector daft(const CVector &x, const DaftParams &p);

    // Inverse of daft(): s_n = N^{-1/2} e^{j2pi c1 n^2} sum_m e^{j2pi(mn/N + c2 m^2)} X_m.
    CVector idaft(const CVector &X, const DaftParams &p);

    // Dense unitary matrix A = Lambda_c2 F Lambda_c1.
    CMatrix daft_matrix(const DaftParams &p);

    // Diagonal entries e^{-j2pi c k^2}, k = 0..n-1.
    CVector chirp_vector(double c, int n);
    CMatrix chirp_diag(double c, int n);
}

#endif
