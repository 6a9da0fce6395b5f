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

#include <algorithm>
#include <cmath>
#include <complex>

#include "biformer3d/dft.h"
#include "biformer3d/error.h"
#include "biformer3d/synth.h"

namespace biformer3d {

std::vector<double> MinimumPhase(std::span<const double> h) {
  const std::size_t n = h.size();
  if (n == 0 || std::all_of(h.begin(), h.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::kInvalidArgument, "minimum phase of an all-zero signal");
  }
  for (double x : h) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite sample");
  }
  const double root_n = std::sqrt(static_cast<double>(n));

  // Unnormalized spectrum magnitude.
  const auto spectrum = DftOrtho(h);
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(spectrum[k]) * root_n;
  const double floor = 1e-8 * *std::max_element(mag.begin(), mag.end());

  std::vector<std::complex<double>> log_mag(n);
  for (std::size_t k = 0; k < n; ++k) log_mag[k] = std::log(std::max(mag[k], floor));

  // Real cepstrum, then fold: keep c[0] (and c[n/2]), double the positive
  // quefrencies, zero the negative ones.
  auto cepstrum = InverseDftOrtho(log_mag);
  std::vector<std::complex<double>> folded(n, 0.0);
  folded[0] = cepstrum[0].real() / root_n;
  const std::size_t half = n / 2;
  for (std::size_t q = 1; q < (n + 1) / 2; ++q) folded[q] = 2.0 * cepstrum[q].real() / root_n;
  if (n % 2 == 0 && half > 0) folded[half] = cepstrum[half].real() / root_n;

  auto analytic = DftOrtho(std::span<const std::complex<double>>(folded));
  for (auto& z : analytic) z = std::exp(z * root_n);
  const auto out = InverseDftOrtho(analytic);

  std::vector<double> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i].real() / root_n;
  return result;
}

SubjectField MinimumPhaseField(const SubjectField& field) {
  std::vector<BinauralHrir> hrirs;
  hrirs.reserve(field.size());
  for (const BinauralHrir& h : field.hrirs()) {
    BinauralHrir mp;
    mp.sample_rate_hz = h.sample_rate_hz;
    mp.left = MinimumPhase(h.left);
    mp.right = MinimumPhase(h.right);
    hrirs.push_back(std::move(mp));
  }
  return field.WithHrirs(std::move(hrirs));
}

}  // namespace biformer3d
