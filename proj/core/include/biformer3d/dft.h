// Copyright 2026 The BiFormer3D Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIFORMER3D_DFT_H_
#define BIFORMER3D_DFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "biformer3d/matrix.h"

namespace biformer3d {

// X[k] = (1/sqrt(K)) sum_n x[n] exp(-j 2 pi k n / K). Unitary, so Parseval
// holds to round-off.
std::vector<std::complex<double>> DftOrtho(std::span<const double> x);
std::vector<std::complex<double>> DftOrtho(std::span<const std::complex<double>> x);
std::vector<std::complex<double>> InverseDftOrtho(
    std::span<const std::complex<double>> spectrum);

// Real and imaginary parts of the orthonormal DFT as K x K matrices, so that
// for row-stacked signals X (R x K): Re = X * cos_part, Im = X * sin_part.
template <typename T>
struct DftBasis {
  Matrix<T> cos_part;
  Matrix<T> sin_part;
};

template <typename T>
DftBasis<T> MakeDftBasis(std::size_t k);

}  // namespace biformer3d

#endif  // BIFORMER3D_DFT_H_
