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

#ifndef BIFORMER3D_SPARSITY_H_
#define BIFORMER3D_SPARSITY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "biformer3d/hrir.h"

namespace biformer3d {

enum class SparsityStrategy {
  // Indices come from SparsityOptions::fixed_indices.
  kFixedList,
  // Greedy max-min great-circle selection starting from the direction
  // nearest (az 0, el 0). Ties go to the lower index.
  kFarthestPoint,
  // Farthest-point selection from a start index drawn from the seed. Used for
  // per-step mask resampling during training.
  kFarthestPointRandomStart,
  // Uniform random subset drawn from the seed.
  kRandom,
};

struct SparsityOptions {
  SparsityStrategy strategy = SparsityStrategy::kFarthestPoint;
  std::vector<std::size_t> fixed_indices;
  std::uint64_t seed = 0;
};

// Returns a mask with exactly m ones. Requires 1 <= m < L.
std::vector<std::uint8_t> SampleSparsity(std::span<const Direction> directions,
                                         std::size_t m,
                                         const SparsityOptions& options);

inline std::vector<std::uint8_t> SampleSparsity(const SubjectField& field,
                                                std::size_t m,
                                                const SparsityOptions& options) {
  return SampleSparsity(field.directions(), m, options);
}

}  // namespace biformer3d

#endif  // BIFORMER3D_SPARSITY_H_
