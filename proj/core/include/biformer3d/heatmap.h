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

#ifndef BIFORMER3D_HEATMAP_H_
#define BIFORMER3D_HEATMAP_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "biformer3d/hrir.h"

namespace biformer3d {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

// Gray level 128 + 127 * x / max|x| (zero maps to 128; an all-zero matrix
// is uniform mid-gray).
std::uint8_t GrayLevel(double x, double peak);

// 2K rows (time, left ear then right) x L columns (directions in canonical
// order). Symmetric normalization by `peak`, or by max|rows| when peak <= 0.
GrayImage RenderHeatmap(const StackedHrirs& rows, std::span<const Direction> directions,
                        double peak = 0.0);

// Two heatmaps side by side with shared normalization and a one-pixel white
// separator: reference on the left, estimate on the right.
GrayImage RenderComparison(const StackedHrirs& reference, const StackedHrirs& estimate,
                           std::span<const Direction> directions);

// Binary (P5) portable graymap, written atomically.
void WritePgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace biformer3d

#endif  // BIFORMER3D_HEATMAP_H_
