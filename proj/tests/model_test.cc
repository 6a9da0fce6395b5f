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

#include "biformer3d/biformer.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "biformer3d/nn/ops.h"
#include "test_util.h"

namespace biformer3d {
namespace {

using testing::RandomField;
using testing::ThrowsCode;

ModelConfig SmallConfig() {
  ModelConfig c;
  c.hrir_length = 16;
  c.width = 16;
  c.layers = 2;
  c.heads = 2;
  c.ff_width = 32;
  c.bands = 2;
  c.decoder_hidden = 24;
  c.head_hidden = 8;
  return c;
}

// Same field with rows reordered by `perm` (new row i = old row perm[i]).
SubjectField PermuteField(const SubjectField& f, const std::vector<std::size_t>& perm) {
  std::vector<Direction> dirs;
  std::vector<BinauralHrir> hrirs;
  std::vector<std::uint8_t> mask;
  for (std::size_t i : perm) {
    dirs.push_back(f.directions()[i]);
    hrirs.push_back(f.hrirs()[i]);
    mask.push_back(f.mask()[i]);
  }
  return SubjectField(f.subject_id(), dirs, hrirs, mask);
}

std::vector<std::size_t> RandomPermutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

TEST(ModelTest, OutputShapes) {
  std::mt19937_64 rng(1);
  const BiFormer3D<float> model(SmallConfig(), 7);
  const SubjectField f = RandomField(rng, 10, 16, 3);
  const Prediction p = model.Forward(f);
  EXPECT_EQ(p.hrirs.rows(), 10);
  EXPECT_EQ(p.hrirs.cols(), 32);
  EXPECT_EQ(p.cues.size(), 10u);
  EXPECT_TRUE(p.hrirs.allFinite());
}

TEST(ModelTest, NoCueHeadsGivesNoCues) {
  std::mt19937_64 rng(1);
  ModelConfig c = SmallConfig();
  c.use_cue_heads = false;
  const BiFormer3D<float> model(c, 7);
  EXPECT_FALSE(model.params().Find("heads.fc1.weight").has_value());
  EXPECT_EQ(model.Forward(RandomField(rng, 6, 16, 2)).cues.size(), 0u);
}

TEST(ModelTest, InitializationIsSeeded) {
  const BiFormer3D<float> a(SmallConfig(), 3), b(SmallConfig(), 3), c(SmallConfig(), 4);
  ASSERT_EQ(a.params().size(), b.params().size());
  bool any_difference = false;
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    EXPECT_EQ(a.params()[i], b.params()[i]);
    any_difference |= a.params()[i] != c.params()[i];
  }
  EXPECT_TRUE(any_difference);
}

TEST(ModelTest, RefineKernelStartsAsIdentity) {
  const BiFormer3D<float> model(SmallConfig(), 3);
  const auto idx = model.params().Find("refine.0.kernel");
  ASSERT_TRUE(idx.has_value());
  const auto& k = model.params()[*idx];
  EXPECT_EQ(k.rows(), 32);
  EXPECT_EQ(k.cols(), 3);
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    EXPECT_EQ(k(r, 0), 0.0f);
    EXPECT_EQ(k(r, 1), 1.0f);
    EXPECT_EQ(k(r, 2), 0.0f);
  }
}

TEST(ModelTest, MaskedRowEncodesToShift) {
  std::mt19937_64 rng(2);
  BiFormer3D<double> model(SmallConfig(), 5);
  auto& params = model.mutable_params();
  const std::size_t shift = *params.Find("signal.ln.shift");
  for (Eigen::Index i = 0; i < params[shift].size(); ++i) params[shift].data()[i] = 0.1 * i;
  const SubjectField f = RandomField(rng, 5, 16, 2);
  nn::Tape<double> tape;
  const auto p = model.BindConstant(tape);
  nn::Var<double> e = model.EncodeSignals(p, tape.Constant(StackAllRows(f)), f.mask());
  for (std::size_t r = 0; r < 5; ++r) {
    if (f.mask()[r] == 1) continue;
    for (Eigen::Index c = 0; c < e.cols(); ++c) EXPECT_EQ(e.value()(r, c), 0.1 * c);
  }
}

TEST(ModelTest, AssembleConcatAndAdd) {
  nn::Tape<double> tape;
  const BiFormer3D<double> concat(SmallConfig(), 1);
  nn::Var<double> e = tape.Constant(MatrixD::Constant(3, 8, 1.0));
  nn::Var<double> g = tape.Constant(MatrixD::Constant(3, 8, 2.0));
  const MatrixD o = concat.AssembleTokens(e, g).value();
  EXPECT_EQ(o.cols(), 16);
  EXPECT_EQ(o(1, 7), 1.0);
  EXPECT_EQ(o(1, 8), 2.0);

  ModelConfig c = SmallConfig();
  c.token_mode = TokenMode::kAdd;
  const BiFormer3D<double> add(c, 1);
  nn::Var<double> e2 = tape.Constant(MatrixD::Constant(3, 16, 1.0));
  nn::Var<double> g2 = tape.Constant(MatrixD::Constant(3, 16, 2.0));
  EXPECT_EQ(add.AssembleTokens(e2, g2).value(), MatrixD::Constant(3, 16, 3.0));
  EXPECT_TRUE(ThrowsCode([&] { add.AssembleTokens(e, g); }, ErrorCode::kShapeMismatch));
}

TEST(ModelTest, ZeroDecoderWeightsGiveBias) {
  BiFormer3D<double> model(SmallConfig(), 5);
  auto& params = model.mutable_params();
  params[*params.Find("decoder.fc2.weight")].setZero();
  params[*params.Find("decoder.fc2.bias")].setConstant(0.25);
  nn::Tape<double> tape;
  const auto p = model.BindConstant(tape);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  MatrixD ctx(4, 16);
  for (Eigen::Index i = 0; i < ctx.size(); ++i) ctx.data()[i] = n(rng);
  EXPECT_EQ(model.Decode(p, tape.Constant(ctx)).value(), MatrixD::Constant(4, 32, 0.25));
}

TEST(ModelTest, ZeroHeadWeightsPredictTrainingMean) {
  BiFormer3D<double> model(SmallConfig(), 5);
  auto& params = model.mutable_params();
  params[*params.Find("heads.fc2.weight")].setZero();
  model.set_cue_stats({.itd_mean_us = 12.0, .itd_std_us = 300.0, .ild_mean_db = -1.5,
                       .ild_std_db = 4.0});
  std::mt19937_64 rng(3);
  const Prediction pred = model.Forward(RandomField(rng, 6, 16, 2));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(pred.cues.itd_us[i], 12.0);
    EXPECT_EQ(pred.cues.ild_db[i], -1.5);
  }
}

// Directions on one elevation ring so canonical order is azimuth order.
SubjectField RingField(std::vector<double> values, std::vector<std::uint8_t> mask) {
  std::vector<Direction> dirs;
  std::vector<BinauralHrir> hrirs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dirs.emplace_back(30.0 * static_cast<double>(i), 0.0);
    hrirs.push_back(testing::MakeHrir(std::vector<double>(2, values[i]),
                                      std::vector<double>(2, values[i])));
  }
  return SubjectField("ring", dirs, hrirs, mask);
}

TEST(ModelTest, RefineIdentityAndAveraging) {
  ModelConfig c = SmallConfig();
  c.hrir_length = 2;
  BiFormer3D<double> model(c, 1);
  const SubjectField f = RingField({3.0, 0.0, 9.0, 6.0, 0.0}, {1, 0, 1, 1, 0});
  nn::Tape<double> tape;
  {
    const auto p = model.BindConstant(tape);
    nn::Var<double> x = tape.Constant(StackAllRows(f));
    EXPECT_EQ(model.Refine(p, x, f.directions(), f.mask()).value(), x.value());
  }
  model.mutable_params()[*model.params().Find("refine.0.kernel")].setConstant(1.0 / 3.0);
  const auto p = model.BindConstant(tape);
  const MatrixD out =
      model.Refine(p, tape.Constant(StackAllRows(f)), f.directions(), f.mask()).value();
  // Measured rows untouched; missing rows average their neighbours (zero
  // padded at the ends of the sorted axis).
  EXPECT_EQ(out(0, 0), 3.0);
  EXPECT_NEAR(out(1, 0), 4.0, 1e-15);
  EXPECT_EQ(out(2, 3), 9.0);
  EXPECT_NEAR(out(4, 0), 2.0, 1e-15);
}

TEST(ModelTest, AllMeasuredReturnsInputExactly) {
  std::mt19937_64 rng(4);
  const BiFormer3D<double> model(SmallConfig(), 9);
  const SubjectField f = RandomField(rng, 7, 16, 7);
  EXPECT_EQ(model.Forward(f).hrirs, StackAllRows(f));
}

TEST(ModelTest, MeasuredRowsPreserved) {
  std::mt19937_64 rng(5);
  const BiFormer3D<double> model(SmallConfig(), 9);
  for (int trial = 0; trial < 10; ++trial) {
    const SubjectField f = RandomField(rng, 9, 16, 1 + trial % 8);
    const MatrixD out = model.Forward(f).hrirs;
    const MatrixD in = StackAllRows(f);
    for (std::size_t r = 0; r < f.size(); ++r) {
      if (f.mask()[r]) {
        EXPECT_EQ(out.row(r), in.row(r));
      }
    }
  }
}

TEST(ModelTest, MaskedContentIsIgnored) {
  std::mt19937_64 rng(6);
  const BiFormer3D<float> model(SmallConfig(), 9);
  const SubjectField f = RandomField(rng, 9, 16, 3);
  std::vector<BinauralHrir> hrirs = f.hrirs();
  for (std::size_t r = 0; r < f.size(); ++r) {
    if (f.mask()[r] == 0) {
      for (double& v : hrirs[r].left) v = 1e3 * v + 7.0;
    }
  }
  const Prediction a = model.Forward(f);
  const Prediction b = model.Forward(f.WithHrirs(hrirs));
  EXPECT_EQ(a.hrirs, b.hrirs);
  EXPECT_EQ(a.cues.itd_us, b.cues.itd_us);
}

TEST(ModelTest, UnrefinedPathIsPermutationEquivariant) {
  std::mt19937_64 rng(7);
  const BiFormer3D<float> model(SmallConfig(), 9);
  const SubjectField f = RandomField(rng, 12, 16, 4);
  const auto perm = RandomPermutation(rng, f.size());
  nn::Tape<float> tape;
  const auto p = model.BindConstant(tape);
  const auto a = model.BuildUnrefined(tape, p, f).value();
  const auto b = model.BuildUnrefined(tape, p, PermuteField(f, perm)).value();
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_LE((b.row(i) - a.row(perm[i])).cwiseAbs().maxCoeff(), 1e-5f);
  }
}

TEST(ModelTest, FullPipelineIgnoresRowOrder) {
  std::mt19937_64 rng(8);
  const BiFormer3D<float> model(SmallConfig(), 9);
  const SubjectField f = RandomField(rng, 12, 16, 4);
  const auto perm = RandomPermutation(rng, f.size());
  const Prediction a = model.Forward(f);
  const Prediction b = model.Forward(PermuteField(f, perm));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(b.hrirs.row(i), a.hrirs.row(perm[i]));
    EXPECT_EQ(b.cues.itd_us[i], a.cues.itd_us[perm[i]]);
  }
}

TEST(ModelTest, RejectsWrongHrirLength) {
  std::mt19937_64 rng(9);
  const BiFormer3D<float> model(SmallConfig(), 9);
  EXPECT_TRUE(ThrowsCode([&] { model.Forward(RandomField(rng, 5, 8, 2)); },
                         ErrorCode::kShapeMismatch));
}

TEST(ModelTest, AdoptValidatesParameters) {
  const BiFormer3D<float> model(SmallConfig(), 9);
  EXPECT_NO_THROW(BiFormer3D<float>(SmallConfig(), model.params(), {}));
  ModelConfig wider = SmallConfig();
  wider.width = 32;
  EXPECT_TRUE(ThrowsCode([&] { BiFormer3D<float>(wider, model.params(), {}); },
                         ErrorCode::kShapeMismatch));
  ModelConfig no_heads = SmallConfig();
  no_heads.use_cue_heads = false;
  EXPECT_TRUE(ThrowsCode([&] { BiFormer3D<float>(no_heads, model.params(), {}); },
                         ErrorCode::kShapeMismatch));
}

TEST(ModelTest, CastPreservesOutputsApproximately) {
  std::mt19937_64 rng(10);
  const BiFormer3D<float> model(SmallConfig(), 9);
  const SubjectField f = RandomField(rng, 8, 16, 3);
  const MatrixD a = model.Forward(f).hrirs;
  const MatrixD b = model.Cast<double>().Forward(f).hrirs;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(ModelConfigTest, JsonRoundTrip) {
  ModelConfig c = SmallConfig();
  c.token_mode = TokenMode::kAdd;
  c.use_refine = false;
  c.conv_kernel = 5;
  const ModelConfig r = ModelConfigFromJson(ModelConfigToJson(c));
  EXPECT_EQ(ModelConfigToJson(r), ModelConfigToJson(c));
  EXPECT_EQ(r.token_mode, TokenMode::kAdd);
  EXPECT_EQ(r.conv_kernel, 5u);
}

TEST(ModelConfigTest, Validation) {
  auto bad = [](auto edit) {
    ModelConfig c = SmallConfig();
    edit(c);
    return ThrowsCode([&] { c.Validate(); }, ErrorCode::kConfig);
  };
  EXPECT_TRUE(bad([](ModelConfig& c) { c.width = 15; }));
  EXPECT_TRUE(bad([](ModelConfig& c) { c.heads = 3; }));
  EXPECT_TRUE(bad([](ModelConfig& c) { c.conv_kernel = 4; }));
  EXPECT_TRUE(bad([](ModelConfig& c) { c.bands = 0; }));
  EXPECT_TRUE(bad([](ModelConfig& c) { c.layers = 0; }));
  EXPECT_TRUE(ThrowsCode([] { ModelConfigFromJson(R"({"D":16,"bogus":1})"); },
                         ErrorCode::kConfig));
  EXPECT_TRUE(ThrowsCode([] { ModelConfigFromJson(R"({"token_mode":"mul"})"); },
                         ErrorCode::kConfig));
  EXPECT_TRUE(ThrowsCode([] { ModelConfigFromJson("not json"); }, ErrorCode::kConfig));
}

}  // namespace
}  // namespace biformer3d
