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

#include "biformer3d/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "biformer3d/dft.h"
#include "test_util.h"

namespace biformer3d {
namespace {

using testing::ThrowsCode;

double Energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Centroid of |x|^2, a delay oracle independent of cross-correlation.
double EnergyCentroid(const std::vector<double>& x) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    num += static_cast<double>(n) * x[n] * x[n];
    den += x[n] * x[n];
  }
  return num / den;
}

TEST(WoodworthTest, ClosedForm) {
  const HeadModel model;
  EXPECT_DOUBLE_EQ(WoodworthItdUs(model, Direction(0, 0)), 0.0);
  EXPECT_NEAR(WoodworthItdUs(model, Direction(0, 37)), 0.0, 1e-12);
  const double expected = 0.0875 / 343.0 * (1.0 + std::numbers::pi / 2.0) * 1e6;
  EXPECT_NEAR(expected, 655.8, 0.05);
  EXPECT_NEAR(WoodworthItdUs(model, Direction(90, 0)), expected, 1e-9);
  EXPECT_NEAR(WoodworthItdUs(model, Direction(270, 0)), -expected, 1e-9);
}

TEST(WoodworthTest, AntisymmetricAndMonotone) {
  const HeadModel model;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> az(0.0, 360.0), el(-90.0, 90.0);
  for (int i = 0; i < 200; ++i) {
    const double a = az(rng), e = el(rng);
    EXPECT_NEAR(WoodworthItdUs(model, Direction(a, e)) + WoodworthItdUs(model, Direction(-a, e)),
                0.0, 1e-9);
  }
  double previous = -1.0;
  for (int a = 0; a <= 90; ++a) {
    const double itd = std::abs(WoodworthItdUs(model, Direction(a, 0)));
    EXPECT_GT(itd, previous);
    previous = itd;
  }
}

TEST(ShadowGainsTest, ExtremesAndMedianPlane) {
  HeadModel model;
  model.shadow_strength = 0.5;
  const EarGains lateral = ShadowGains(model, Direction(90, 0));
  EXPECT_NEAR(lateral.left, 1.0, 1e-15);
  EXPECT_NEAR(lateral.right, 0.5, 1e-15);
  EXPECT_NEAR(20.0 * std::log10(lateral.left / lateral.right), 6.0206, 1e-4);
  const EarGains front = ShadowGains(model, Direction(0, 20));
  EXPECT_EQ(front.left, front.right);
}

TEST(SynthHrirTest, MedianPlaneWithoutShadowIsSymmetric) {
  HeadModel model;
  model.shadow_strength = 0.0;
  const BinauralHrir h = SynthHrir(model, Direction(0, 30), 64, 48000);
  EXPECT_EQ(h.left, h.right);
}

TEST(SynthHrirTest, EnergyEqualsGainSquared) {
  const HeadModel model;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> az(0.0, 360.0), el(-90.0, 90.0);
  for (int i = 0; i < 100; ++i) {
    const Direction d(az(rng), el(rng));
    const BinauralHrir h = SynthHrir(model, d, 64, 48000);
    const EarGains g = ShadowGains(model, d);
    EXPECT_NEAR(Energy(h.left), g.left * g.left, 1e-6 * g.left * g.left);
    EXPECT_NEAR(Energy(h.right), g.right * g.right, 1e-6 * g.right * g.right);
  }
}

TEST(SynthHrirTest, BruteForceIldMatchesLabel) {
  CorpusSpec spec;
  spec.n_subjects = 2;
  for (const SyntheticSubject& s : SynthCorpus(spec)) {
    for (std::size_t i = 0; i < s.field.size(); ++i) {
      const BinauralHrir& h = s.field.hrirs()[i];
      const double ild = 10.0 * std::log10(Energy(h.left) / Energy(h.right));
      EXPECT_NEAR(ild, s.labels.ild_db[i], 0.1);
    }
  }
}

TEST(SynthHrirTest, InjectedDelayDifferenceMatchesItd) {
  // The pulse is symmetric about its centre, so its energy centroid is the
  // centre whenever the window stays inside the buffer.
  const HeadModel model;
  const int fs = 48000;
  for (double az : {0.0, 30.0, 60.0, 90.0, 200.0, 300.0}) {
    const Direction d(az, 10.0);
    const BinauralHrir h = SynthHrir(model, d, 64, fs);
    const double delay_s = (EnergyCentroid(h.right) - EnergyCentroid(h.left)) / fs;
    EXPECT_NEAR(delay_s * 1e6, WoodworthItdUs(model, d), 1e6 / (2.0 * fs)) << az;
  }
}

TEST(SynthHrirTest, PulseMustFit) {
  const HeadModel model;
  EXPECT_TRUE(ThrowsCode([&] { SynthHrir(model, Direction(90, 0), 24, 48000); },
                         ErrorCode::kGeneration));
  EXPECT_TRUE(
      ThrowsCode([] { WindowedSincPulse(16, 2.0, 16, 0.5); }, ErrorCode::kGeneration));
}

TEST(SynthHrirTest, ValidatesModel) {
  HeadModel model;
  model.shadow_strength = 1.5;
  EXPECT_TRUE(ThrowsCode([&] { model.Validate(); }, ErrorCode::kInvalidArgument));
  model = HeadModel{};
  model.head_radius_m = 0.0;
  EXPECT_TRUE(ThrowsCode([&] { model.Validate(); }, ErrorCode::kInvalidArgument));
}

TEST(GridTest, FibonacciDistinct) {
  const auto grid = MakeGrid(GridSpec{GridKind::kFibonacci, 81});
  ASSERT_EQ(grid.size(), 81u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      EXPECT_GT(GreatCircleDeg(grid[i], grid[j]), 1.0);
    }
  }
}

TEST(GridTest, Equiangular) {
  const auto grid = MakeGrid(GridSpec{GridKind::kEquiangular, 72, 6});
  ASSERT_EQ(grid.size(), 72u);
  std::set<double> elevations;
  for (const auto& d : grid) elevations.insert(d.elevation_deg());
  EXPECT_EQ(elevations.size(), 6u);
  EXPECT_TRUE(ThrowsCode([] { MakeGrid(GridSpec{GridKind::kEquiangular, 70, 6}); },
                         ErrorCode::kInvalidArgument));
}

TEST(SynthCorpusTest, DeterministicAndNamed) {
  CorpusSpec spec;
  spec.n_subjects = 3;
  spec.seed = 17;
  const auto a = SynthCorpus(spec);
  const auto b = SynthCorpus(spec);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].field.subject_id(), "S0000");
  EXPECT_EQ(a[2].field.subject_id(), "S0002");
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_EQ(StackAllRows(a[s].field), StackAllRows(b[s].field));
    EXPECT_EQ(a[s].labels.itd_us, b[s].labels.itd_us);
  }
  EXPECT_NE(StackAllRows(a[0].field), StackAllRows(a[1].field));
}

TEST(SynthCorpusTest, JitterBoundsAndZeroJitter) {
  CorpusSpec spec;
  spec.n_subjects = 20;
  for (const auto& s : SynthCorpus(spec)) {
    EXPECT_LE(std::abs(s.model.head_radius_m / spec.model_base.head_radius_m - 1.0), 0.1 + 1e-12);
    EXPECT_LE(std::abs(s.model.shadow_strength / spec.model_base.shadow_strength - 1.0),
              0.1 + 1e-12);
  }
  spec.jitter = 0.0;
  spec.n_subjects = 3;
  const auto same = SynthCorpus(spec);
  EXPECT_EQ(StackAllRows(same[0].field), StackAllRows(same[2].field));
}

std::vector<double> Magnitudes(const std::vector<double>& x) {
  std::vector<double> out;
  for (const auto& z : DftOrtho(x)) out.push_back(std::abs(z));
  return out;
}

TEST(MinimumPhaseTest, ImpulseCases) {
  std::vector<double> delta(16, 0.0);
  delta[0] = 1.0;
  const auto same = MinimumPhase(delta);
  for (std::size_t n = 0; n < 16; ++n) EXPECT_NEAR(same[n], delta[n], 1e-12);

  std::vector<double> delayed(16, 0.0);
  delayed[5] = 1.0;
  const auto moved = MinimumPhase(delayed);
  for (std::size_t n = 0; n < 16; ++n) EXPECT_NEAR(moved[n], delta[n], 1e-12);
}

TEST(MinimumPhaseTest, PreservesMagnitudeAndIsIdempotent) {
  const HeadModel model;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> az(0.0, 360.0), el(-60.0, 60.0);
  for (int i = 0; i < 20; ++i) {
    const BinauralHrir h = SynthHrir(model, Direction(az(rng), el(rng)), 64, 48000);
    const auto mp = MinimumPhase(h.left);
    const auto m0 = Magnitudes(h.left), m1 = Magnitudes(mp);
    const double peak = *std::max_element(m0.begin(), m0.end());
    for (std::size_t k = 0; k < m0.size(); ++k) {
      EXPECT_LE(std::abs(m1[k] - m0[k]), 1e-3 * std::max(m0[k], 1e-6 * peak));
    }
    const auto twice = MinimumPhase(mp);
    double rms = 0.0;
    for (std::size_t n = 0; n < mp.size(); ++n) rms += (twice[n] - mp[n]) * (twice[n] - mp[n]);
    EXPECT_LE(std::sqrt(rms / mp.size()), 1e-6);
  }
}

TEST(MinimumPhaseTest, RejectsZero) {
  EXPECT_TRUE(ThrowsCode([] { MinimumPhase(std::vector<double>(8, 0.0)); },
                         ErrorCode::kInvalidArgument));
}

}  // namespace
}  // namespace biformer3d
