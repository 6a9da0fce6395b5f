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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "biformer3d/synth.h"
#include "test_util.h"

namespace biformer3d {
namespace {

using testing::ThrowsCode;

std::size_t Ones(const std::vector<std::uint8_t>& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

TEST(SparsityTest, ExactlyMOnesForEveryStrategy) {
  const auto grid = MakeGrid(GridSpec{});
  for (auto strategy : {SparsityStrategy::kFarthestPoint,
                        SparsityStrategy::kFarthestPointRandomStart, SparsityStrategy::kRandom}) {
    for (std::size_t m : {1u, 3u, 9u, 80u}) {
      const auto mask = SampleSparsity(grid, m, {strategy, {}, 7});
      EXPECT_EQ(Ones(mask), m);
      EXPECT_EQ(mask.size(), grid.size());
    }
  }
}

TEST(SparsityTest, LMinusOneLeavesOneZero) {
  const auto grid = MakeGrid(GridSpec{GridKind::kFibonacci, 10});
  const auto mask = SampleSparsity(grid, 9, {});
  EXPECT_EQ(std::count(mask.begin(), mask.end(), 0), 1);
}

TEST(SparsityTest, FarthestPointExample) {
  const std::vector<Direction> dirs = {Direction(0, 0, 1.5), Direction(180, 0, 1.5),
                                       Direction(90, 0, 1.5)};
  const auto mask = SampleSparsity(dirs, 2, {SparsityStrategy::kFarthestPoint, {}, 0});
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{1, 1, 0}));
}

// Independent brute force: at each step recompute every candidate's distance
// to every selected point.
std::vector<std::uint8_t> BruteForceFarthest(const std::vector<Direction>& dirs, std::size_t m) {
  std::vector<std::uint8_t> mask(dirs.size(), 0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < dirs.size(); ++i) {
    if (GreatCircleDeg(dirs[i], Direction(0, 0)) < GreatCircleDeg(dirs[start], Direction(0, 0))) {
      start = i;
    }
  }
  mask[start] = 1;
  while (Ones(mask) < m) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (mask[i]) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < dirs.size(); ++j) {
        if (mask[j]) nearest = std::min(nearest, GreatCircleDeg(dirs[i], dirs[j]));
      }
      if (nearest > best_d) {
        best_d = nearest;
        best = i;
      }
    }
    mask[best] = 1;
  }
  return mask;
}

TEST(SparsityTest, FarthestPointMatchesBruteForce) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const SubjectField f = testing::RandomField(rng, 40, 1, 1);
    for (std::size_t m : {2u, 5u, 17u}) {
      EXPECT_EQ(SampleSparsity(f, m, {}), BruteForceFarthest(f.directions(), m));
    }
  }
}

TEST(SparsityTest, FixedList) {
  std::vector<Direction> dirs;
  for (int i = 0; i < 10; ++i) dirs.emplace_back(36.0 * i, 0.0);
  const auto mask = SampleSparsity(dirs, 3, {SparsityStrategy::kFixedList, {0, 3, 7}, 0});
  EXPECT_EQ(mask, (std::vector<std::uint8_t>{1, 0, 0, 1, 0, 0, 0, 1, 0, 0}));
  EXPECT_TRUE(ThrowsCode(
      [&] { SampleSparsity(dirs, 3, {SparsityStrategy::kFixedList, {0, 3, 10}, 0}); },
      ErrorCode::kInvalidArgument));
  EXPECT_TRUE(ThrowsCode(
      [&] { SampleSparsity(dirs, 3, {SparsityStrategy::kFixedList, {0, 3, 3}, 0}); },
      ErrorCode::kInvalidArgument));
  EXPECT_TRUE(ThrowsCode(
      [&] { SampleSparsity(dirs, 2, {SparsityStrategy::kFixedList, {0, 3, 7}, 0}); },
      ErrorCode::kInvalidArgument));
}

TEST(SparsityTest, RangeChecks) {
  const auto grid = MakeGrid(GridSpec{GridKind::kFibonacci, 10});
  EXPECT_TRUE(ThrowsCode([&] { SampleSparsity(grid, 0, {}); }, ErrorCode::kInvalidArgument));
  EXPECT_TRUE(ThrowsCode([&] { SampleSparsity(grid, 10, {}); }, ErrorCode::kInvalidArgument));
}

TEST(SparsityTest, ReproducibleForSeed) {
  const auto grid = MakeGrid(GridSpec{});
  for (auto strategy : {SparsityStrategy::kRandom, SparsityStrategy::kFarthestPointRandomStart}) {
    EXPECT_EQ(SampleSparsity(grid, 7, {strategy, {}, 42}),
              SampleSparsity(grid, 7, {strategy, {}, 42}));
  }
  // Different seeds should not all collapse onto one pattern.
  std::vector<std::vector<std::uint8_t>> seen;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    seen.push_back(SampleSparsity(grid, 7, {SparsityStrategy::kRandom, {}, seed}));
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_GT(std::unique(seen.begin(), seen.end()) - seen.begin(), 1);
}

}  // namespace
}  // namespace biformer3d
