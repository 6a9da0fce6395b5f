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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "biformer3d/nn/adamw.h"
#include "biformer3d/nn/checkpoint.h"
#include "test_util.h"

namespace biformer3d::nn {
namespace {

using biformer3d::testing::ThrowsCode;

ParameterSet<double> TwoParams() {
  ParameterSet<double> p;
  Tensor<double> a(2, 2);
  a << 1.0, -2.0, 3.0, 0.5;
  p.Add("a", a);
  p.Add("b", Tensor<double>::Constant(1, 3, 4.0));
  return p;
}

TEST(AdamWTest, ZeroGradientWithoutDecayLeavesParameters) {
  ParameterSet<double> p = TwoParams();
  const ParameterSet<double> before = TwoParams();
  AdamW<double> opt({.lr = 0.1, .weight_decay = 0.0}, p);
  for (int i = 0; i < 5; ++i) opt.Step(p, ZeroGradients(p));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], before[i]);
  EXPECT_EQ(opt.state().step, 5);
}

TEST(AdamWTest, ZeroGradientDecaysByFactor) {
  ParameterSet<double> p = TwoParams();
  AdamW<double> opt({.lr = 0.1, .weight_decay = 0.5}, p);
  opt.Step(p, ZeroGradients(p));
  EXPECT_DOUBLE_EQ(p[0](0, 0), 0.95);
  EXPECT_DOUBLE_EQ(p[1](0, 2), 3.8);
}

TEST(AdamWTest, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps).
  ParameterSet<double> p = TwoParams();
  AdamW<double> opt({.lr = 0.01, .weight_decay = 0.0}, p);
  Gradients<double> g = ZeroGradients(p);
  g[0] << 2.0, -0.5, 1e-3, 0.0;
  opt.Step(p, g);
  EXPECT_NEAR(p[0](0, 0), 1.0 - 0.01, 1e-9);
  EXPECT_NEAR(p[0](0, 1), -2.0 + 0.01, 1e-9);
  EXPECT_NEAR(p[0](1, 0), 3.0 - 0.01, 1e-7);
  EXPECT_EQ(p[0](1, 1), 0.5);
  EXPECT_EQ(p[1], TwoParams()[1]);
}

TEST(AdamWTest, MatchesScalarReference) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  ParameterSet<double> p;
  p.Add("x", Tensor<double>::Constant(1, 1, 0.7));
  const AdamWOptions o{.lr = 0.05, .beta1 = 0.8, .beta2 = 0.99, .eps = 1e-6, .weight_decay = 0.1};
  AdamW<double> opt(o, p);
  double x = 0.7, m = 0.0, v = 0.0;
  for (int t = 1; t <= 20; ++t) {
    const double g = n(rng);
    Gradients<double> grads = {Tensor<double>::Constant(1, 1, g)};
    opt.Step(p, grads);
    m = o.beta1 * m + (1 - o.beta1) * g;
    v = o.beta2 * v + (1 - o.beta2) * g * g;
    x *= 1 - o.lr * o.weight_decay;
    x -= o.lr * (m / (1 - std::pow(o.beta1, t))) / (std::sqrt(v / (1 - std::pow(o.beta2, t))) + o.eps);
    EXPECT_NEAR(p[0](0, 0), x, 1e-12);
  }
}

TEST(AdamWTest, ShapeMismatchThrows) {
  ParameterSet<double> p = TwoParams();
  AdamW<double> opt({}, p);
  Gradients<double> g = ZeroGradients(p);
  g[1] = Tensor<double>::Zero(3, 1);
  EXPECT_TRUE(ThrowsCode([&] { opt.Step(p, g); }, ErrorCode::kShapeMismatch));
  g.pop_back();
  EXPECT_TRUE(ThrowsCode([&] { opt.Step(p, g); }, ErrorCode::kShapeMismatch));
}

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("bf3d_ckpt_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

Checkpoint RandomCheckpoint() {
  std::mt19937_64 rng(11);
  std::normal_distribution<float> n(0.0f, 1.0f);
  Checkpoint c;
  for (int i = 0; i < 4; ++i) {
    Tensor<float> t(i + 1, 3 + i);
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = n(rng);
    c.params.Add("p" + std::to_string(i), std::move(t));
  }
  Tensor<float> special(1, 4);
  special << 0.0f, -0.0f, 1e-40f, std::numeric_limits<float>::max();
  c.params.Add("special", special);
  c.params.Add("empty", Tensor<float>(0, 3));
  c.optimizer = {.lr = 1e-3, .weight_decay = 0.02};
  c.step = 1234;
  c.metadata_json = R"({"note":"x","value":1.5})";
  return c;
}

TEST_F(CheckpointTest, RoundTripIsBitExact) {
  const Checkpoint c = RandomCheckpoint();
  SaveCheckpoint(dir_ / "m.ckpt", c);
  const Checkpoint r = LoadCheckpoint(dir_ / "m.ckpt");
  ASSERT_EQ(r.params.size(), c.params.size());
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    EXPECT_EQ(r.params.name(i), c.params.name(i));
    ASSERT_EQ(r.params[i].rows(), c.params[i].rows());
    ASSERT_EQ(r.params[i].cols(), c.params[i].cols());
    for (Eigen::Index k = 0; k < c.params[i].size(); ++k) {
      EXPECT_EQ(std::bit_cast<std::uint32_t>(r.params[i].data()[k]),
                std::bit_cast<std::uint32_t>(c.params[i].data()[k]));
    }
  }
  EXPECT_EQ(r.step, 1234);
  EXPECT_EQ(r.optimizer.lr, 1e-3);
  EXPECT_EQ(r.optimizer.weight_decay, 0.02);
  EXPECT_EQ(r.metadata_json, R"({"note":"x","value":1.5})");
}

TEST_F(CheckpointTest, FileStartsWithMagic) {
  SaveCheckpoint(dir_ / "m.ckpt", RandomCheckpoint());
  std::ifstream in(dir_ / "m.ckpt", std::ios::binary);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "BF3DCKPT1");
}

TEST_F(CheckpointTest, MalformedFilesAreDataErrors) {
  SaveCheckpoint(dir_ / "good.ckpt", RandomCheckpoint());
  std::ifstream in(dir_ / "good.ckpt", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir_ / name, std::ios::binary) << content;
    return dir_ / name;
  };
  EXPECT_TRUE(ThrowsCode([&] { LoadCheckpoint(dir_ / "missing.ckpt"); }, ErrorCode::kData));
  EXPECT_TRUE(ThrowsCode([&] { LoadCheckpoint(write("magic", "BF3DCKPT2\n{}\n")); },
                         ErrorCode::kData));
  EXPECT_TRUE(ThrowsCode([&] { LoadCheckpoint(write("json", "BF3DCKPT1\n{nope\n")); },
                         ErrorCode::kData));
  EXPECT_TRUE(ThrowsCode([&] { LoadCheckpoint(write("short", bytes.substr(0, bytes.size() - 3))); },
                         ErrorCode::kData));
  EXPECT_TRUE(ThrowsCode([&] { LoadCheckpoint(write("long", bytes + "xx")); }, ErrorCode::kData));
}

}  // namespace
}  // namespace biformer3d::nn
