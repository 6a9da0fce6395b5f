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

#include "biformer3d/dft.h"

#include <cmath>
#include <numbers>

namespace biformer3d {
namespace {

// exp(sign * j 2 pi m / K) for m = 0..K-1; products k*n are reduced mod K so
// every twiddle comes straight from this table.
std::vector<std::complex<double>> Twiddles(std::size_t k, double sign) {
  std::vector<std::complex<double>> w(k);
  for (std::size_t m = 0; m < k; ++m) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(m) /
                         static_cast<double>(k);
    w[m] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

std::vector<std::complex<double>> Transform(std::span<const std::complex<double>> x,
                                            double sign) {
  const std::size_t k = x.size();
  std::vector<std::complex<double>> out(k);
  if (k == 0) return out;
  const auto w = Twiddles(k, sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t f = 0; f < k; ++f) {
    std::complex<double> acc = 0.0;
    std::size_t idx = 0;
    for (std::size_t n = 0; n < k; ++n) {
      acc += x[n] * w[idx];
      idx += f;
      if (idx >= k) idx -= k;
    }
    out[f] = acc * scale;
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> DftOrtho(std::span<const double> x) {
  std::vector<std::complex<double>> cx(x.begin(), x.end());
  return Transform(cx, -1.0);
}

std::vector<std::complex<double>> DftOrtho(std::span<const std::complex<double>> x) {
  return Transform(x, -1.0);
}

std::vector<std::complex<double>> InverseDftOrtho(
    std::span<const std::complex<double>> spectrum) {
  return Transform(spectrum, 1.0);
}

template <typename T>
DftBasis<T> MakeDftBasis(std::size_t k) {
  const auto w = Twiddles(k, -1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  DftBasis<T> basis{Matrix<T>(k, k), Matrix<T>(k, k)};
  for (std::size_t n = 0; n < k; ++n) {
    for (std::size_t f = 0; f < k; ++f) {
      const auto& tw = w[(n * f) % k];
      basis.cos_part(n, f) = static_cast<T>(tw.real() * scale);
      basis.sin_part(n, f) = static_cast<T>(tw.imag() * scale);
    }
  }
  return basis;
}

template DftBasis<float> MakeDftBasis<float>(std::size_t);
template DftBasis<double> MakeDftBasis<double>(std::size_t);

}  // namespace biformer3d
