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

#include "biformer3d/sparsity.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "biformer3d/error.h"

namespace biformer3d {
namespace {

std::vector<std::uint8_t> FarthestPoint(std::span<const Direction> directions,
                                        std::size_t m, std::size_t start) {
  const std::size_t n = directions.size();
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::size_t next = start;
  for (std::size_t picked = 0; picked < m; ++picked) {
    mask[next] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], GreatCircleDeg(directions[i], directions[next]));
    }
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == 0 && min_dist[i] > best) {
        best = min_dist[i];
        next = i;
      }
    }
  }
  return mask;
}

}  // namespace

std::vector<std::uint8_t> SampleSparsity(std::span<const Direction> directions,
                                         std::size_t m,
                                         const SparsityOptions& options) {
  const std::size_t n = directions.size();
  if (m < 1 || m >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "sparsity m=" + std::to_string(m) + " outside [1, " +
                    std::to_string(n) + ")");
  }
  switch (options.strategy) {
    case SparsityStrategy::kFixedList: {
      if (options.fixed_indices.size() != m) {
        throw Error(ErrorCode::kInvalidArgument,
                    "fixed list has " + std::to_string(options.fixed_indices.size()) +
                        " entries, expected " + std::to_string(m));
      }
      std::vector<std::uint8_t> mask(n, 0);
      for (std::size_t idx : options.fixed_indices) {
        if (idx >= n || mask[idx] != 0) {
          throw Error(ErrorCode::kInvalidArgument,
                      "fixed list index " + std::to_string(idx) +
                          " invalid or repeated");
        }
        mask[idx] = 1;
      }
      return mask;
    }
    case SparsityStrategy::kFarthestPoint: {
      const Direction front(0.0, 0.0);
      std::size_t start = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double d = GreatCircleDeg(directions[i], front);
        if (d < best) {
          best = d;
          start = i;
        }
      }
      return FarthestPoint(directions, m, start);
    }
    case SparsityStrategy::kFarthestPointRandomStart: {
      std::mt19937_64 rng(options.seed);
      const std::size_t start = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      return FarthestPoint(directions, m, start);
    }
    case SparsityStrategy::kRandom: {
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::mt19937_64 rng(options.seed);
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<std::uint8_t> mask(n, 0);
      for (std::size_t i = 0; i < m; ++i) mask[idx[i]] = 1;
      return mask;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown sparsity strategy");
}

}  // namespace biformer3d
