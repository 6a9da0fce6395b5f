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

#include "biformer3d/heatmap.h"

#include <algorithm>
#include <cmath>

#include "biformer3d/bundle.h"
#include "biformer3d/error.h"

namespace biformer3d {

std::uint8_t GrayLevel(double x, double peak) {
  if (peak <= 0.0) return 128;
  const double v = std::clamp(x / peak, -1.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(128.0 + 127.0 * v));
}

GrayImage RenderHeatmap(const StackedHrirs& rows, std::span<const Direction> directions,
                        double peak) {
  if (static_cast<Eigen::Index>(directions.size()) != rows.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "heatmap: directions do not match rows");
  }
  if (!rows.allFinite()) throw Error(ErrorCode::kInvalidArgument, "heatmap: non-finite values");
  if (peak <= 0.0) peak = rows.size() == 0 ? 0.0 : rows.cwiseAbs().maxCoeff();
  const std::vector<std::size_t> order = CanonicalOrder(directions);
  GrayImage image{order.size(), static_cast<std::size_t>(rows.cols()), {}};
  image.pixels.resize(image.width * image.height);
  for (std::size_t col = 0; col < order.size(); ++col) {
    for (std::size_t t = 0; t < image.height; ++t) {
      image.pixels[t * image.width + col] = GrayLevel(rows(order[col], t), peak);
    }
  }
  return image;
}

GrayImage RenderComparison(const StackedHrirs& reference, const StackedHrirs& estimate,
                           std::span<const Direction> directions) {
  if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "heatmap: reference and estimate shapes differ");
  }
  const double peak =
      std::max(reference.size() ? reference.cwiseAbs().maxCoeff() : 0.0,
               estimate.size() ? estimate.cwiseAbs().maxCoeff() : 0.0);
  const GrayImage left = RenderHeatmap(reference, directions, peak);
  const GrayImage right = RenderHeatmap(estimate, directions, peak);
  GrayImage out{left.width * 2 + 1, left.height, {}};
  out.pixels.assign(out.width * out.height, 255);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < left.width; ++c) {
      out.pixels[r * out.width + c] = left.at(r, c);
      out.pixels[r * out.width + left.width + 1 + c] = right.at(r, c);
    }
  }
  return out;
}

void WritePgm(const std::filesystem::path& path, const GrayImage& image) {
  std::string data = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                     "\n255\n";
  data.append(image.pixels.begin(), image.pixels.end());
  WriteFileAtomic(path, data);
}

}  // namespace biformer3d
