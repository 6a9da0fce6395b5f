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

#include "biformer3d/encoding.h"

#include <cmath>
#include <numbers>

#include "biformer3d/error.h"
#include "biformer3d/nn/ops.h"

namespace biformer3d {

std::array<double, 3> NormalizeCoords(const Direction& d) {
  return {d.azimuth_deg() / 360.0, (d.elevation_deg() + 90.0) / 180.0,
          d.radius_m() / kReferenceRadiusM};
}

std::vector<double> SinusoidalEmbed(const std::array<double, 3>& x, int bands) {
  if (bands < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one frequency band");
  std::vector<double> out;
  out.reserve(6 * static_cast<std::size_t>(bands));
  for (int p = 0; p < bands; ++p) {
    const double freq = std::ldexp(std::numbers::pi, p);
    for (double v : x) out.push_back(std::sin(freq * v));
    for (double v : x) out.push_back(std::cos(freq * v));
  }
  return out;
}

std::size_t GeometryFeatureWidth(const EncodingConfig& config) {
  return config.use_sinusoidal ? 3 + 6 * static_cast<std::size_t>(config.bands) : 3;
}

std::vector<double> GeometryFeatures(const Direction& d, const EncodingConfig& config) {
  const std::array<double, 3> x =
      config.normalize ? NormalizeCoords(d)
                       : std::array<double, 3>{d.azimuth_deg(), d.elevation_deg(), d.radius_m()};
  std::vector<double> out(x.begin(), x.end());
  if (config.use_sinusoidal) {
    const auto gamma = SinusoidalEmbed(x, config.bands);
    out.insert(out.end(), gamma.begin(), gamma.end());
  }
  return out;
}

MatrixD GeometryFeatureMatrix(std::span<const Direction> directions,
                              const EncodingConfig& config) {
  MatrixD out(directions.size(), GeometryFeatureWidth(config));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto row = GeometryFeatures(directions[i], config);
    for (std::size_t j = 0; j < row.size(); ++j) out(i, j) = row[j];
  }
  return out;
}

template <typename T>
nn::Var<T> GeoProject(nn::Var<T> features, nn::Var<T> weight, nn::Var<T> ln_scale,
                      nn::Var<T> ln_shift) {
  if (features.cols() != weight.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "geometry features have width " + std::to_string(features.cols()) +
                    ", projection expects " + std::to_string(weight.rows()));
  }
  return nn::LayerNorm(nn::Gelu(nn::MatMul(features, weight)), ln_scale, ln_shift);
}

template nn::Var<float> GeoProject(nn::Var<float>, nn::Var<float>, nn::Var<float>,
                                   nn::Var<float>);
template nn::Var<double> GeoProject(nn::Var<double>, nn::Var<double>, nn::Var<double>,
                                    nn::Var<double>);

}  // namespace biformer3d
