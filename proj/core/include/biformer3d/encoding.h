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

#ifndef BIFORMER3D_ENCODING_H_
#define BIFORMER3D_ENCODING_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "biformer3d/hrir.h"
#include "biformer3d/nn/tape.h"

namespace biformer3d {

inline constexpr double kReferenceRadiusM = 2.0;

struct EncodingConfig {
  int bands = 6;
  // Map (az, el, r) to (az/360, (el+90)/180, r/2) before the sinusoids.
  bool normalize = true;
  // Off: the geometric features are the (normalized) coordinates alone.
  bool use_sinusoidal = true;
};

std::array<double, 3> NormalizeCoords(const Direction& d);

// Length 6P, band-major: for p = 0..P-1,
// [sin(2^p pi x1..x3), cos(2^p pi x1..x3)].
std::vector<double> SinusoidalEmbed(const std::array<double, 3>& x, int bands);

// 3 + 6P with sinusoids, 3 without.
std::size_t GeometryFeatureWidth(const EncodingConfig& config);

// [x, gamma(x)] for one direction.
std::vector<double> GeometryFeatures(const Direction& d, const EncodingConfig& config);

// One row of GeometryFeatures per direction.
MatrixD GeometryFeatureMatrix(std::span<const Direction> directions,
                              const EncodingConfig& config);

// LayerNorm(GELU(features * weight)); features are L x (3+6P).
template <typename T>
nn::Var<T> GeoProject(nn::Var<T> features, nn::Var<T> weight, nn::Var<T> ln_scale,
                      nn::Var<T> ln_shift);

}  // namespace biformer3d

#endif  // BIFORMER3D_ENCODING_H_
