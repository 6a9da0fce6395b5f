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

#include "biformer3d/cues.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "biformer3d/synth.h"
#include "test_util.h"

namespace biformer3d {
namespace {

using testing::MakeHrir;
using testing::ThrowsCode;

std::vector<double> Pulse(std::size_t k, double center) {
  return WindowedSincPulse(k, center, 16, 0.5);
}

std::vector<double> Shift(const std::vector<double>& x, int by) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    const long m = static_cast<long>(n) - by;
    if (m >= 0 && m < static_cast<long>(x.size())) out[n] = x[m];
  }
  return out;
}

TEST(ItdTest, IdenticalEarsGiveZero) {
  const auto x = Pulse(64, 30.0);
  EXPECT_NEAR(EstimateItdUs(MakeHrir(x, x)), 0.0, 1e-9);
}

TEST(ItdTest, RightEarDelayedTenSamples) {
  const auto x = Pulse(64, 24.0);
  EXPECT_NEAR(EstimateItdUs(MakeHrir(x, Shift(x, 10))), 1e7 / 48000.0, 1.0);
}

TEST(ItdTest, SwappingEarsNegates) {
  const auto x = Pulse(64, 27.3);
  const auto y = Pulse(64, 33.9);
  const double a = EstimateItdUs(MakeHrir(x, y));
  const double b = EstimateItdUs(MakeHrir(y, x));
  EXPECT_EQ(a, -b);
  EXPECT_GT(a, 0.0);
}

TEST(ItdTest, InvariantToGainAndPolarityPreservingScale) {
  const auto x = Pulse(64, 28.0);
  auto y = Pulse(64, 35.0);
  const double a = EstimateItdUs(MakeHrir(x, y));
  for (double& v : y) v *= 0.2;
  EXPECT_NEAR(EstimateItdUs(MakeHrir(x, y)), a, 1e-9);
}

TEST(ItdTest, SilentEarIsUndefined) {
  const auto x = Pulse(32, 16.0);
  EXPECT_TRUE(ThrowsCode([&] { EstimateItdUs(MakeHrir(x, std::vector<double>(32, 0.0))); },
                         ErrorCode::kUndefinedCue));
}

TEST(CrossCorrelationTest, MatchesDirectSum) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> a(13), b(13);
  for (auto& v : a) v = n(rng);
  for (auto& v : b) v = n(rng);
  const auto r = CrossCorrelation(a, b);
  ASSERT_EQ(r.size(), 25u);
  for (int lag = -12; lag <= 12; ++lag) {
    double acc = 0.0;
    for (int i = 0; i < 13; ++i) {
      if (i + lag >= 0 && i + lag < 13) acc += a[i] * b[i + lag];
    }
    EXPECT_NEAR(r[lag + 12], acc, 1e-12);
  }
}

TEST(IldTest, Examples) {
  const auto x = Pulse(32, 16.0);
  auto half = x;
  for (double& v : half) v *= 0.5;
  EXPECT_NEAR(EstimateIldDb(MakeHrir(x, half)), 6.020599913279624, 1e-9);
  EXPECT_NEAR(EstimateIldDb(MakeHrir(half, x)), -6.020599913279624, 1e-9);
  EXPECT_EQ(EstimateIldDb(MakeHrir(x, x)), 0.0);
  EXPECT_TRUE(ThrowsCode([&] { EstimateIldDb(MakeHrir(std::vector<double>(32, 0.0), x)); },
                         ErrorCode::kUndefinedCue));
}

TEST(IldTest, TimeShiftDoesNotMatter) {
  const auto x = Pulse(64, 20.0);
  auto y = Pulse(64, 20.0);
  for (double& v : y) v *= 0.7;
  EXPECT_NEAR(EstimateIldDb(MakeHrir(x, y)), EstimateIldDb(MakeHrir(x, Shift(y, 9))), 1e-9);
}

TEST(BandIldTest, ScaledEarIsFlatAcrossBands) {
  const auto x = Pulse(64, 32.0);
  auto y = x;
  for (double& v : y) v *= 0.5;
  const auto fc = ErbCenterFrequencies(500.0, 8000.0, 8);
  ASSERT_EQ(fc.size(), 8u);
  EXPECT_NEAR(fc.front(), 500.0, 1e-9);
  EXPECT_NEAR(fc.back(), 8000.0, 1e-6);
  for (double v : EstimateBandIldDb(MakeHrir(x, y), fc)) EXPECT_NEAR(v, 6.0206, 1e-3);
}

TEST(LowpassTest, PassesDcAndRejectsNyquist) {
  std::vector<double> dc(256, 1.0), alt(256);
  for (std::size_t n = 0; n < alt.size(); ++n) alt[n] = n % 2 ? -1.0 : 1.0;
  const auto a = ZeroPhaseLowpass(dc, 3000.0, 48000);
  const auto b = ZeroPhaseLowpass(alt, 3000.0, 48000);
  const std::size_t pad = (a.size() - 256) / 2;
  EXPECT_NEAR(a[pad + 128], 1.0, 1e-6);
  EXPECT_NEAR(b[pad + 128], 0.0, 1e-6);
  EXPECT_TRUE(ThrowsCode([&] { ZeroPhaseLowpass(dc, 30000.0, 48000); },
                         ErrorCode::kInvalidArgument));
}

TEST(CueStatsTest, MeanAndStd) {
  const std::vector<CueLabels> labels = {{{100.0, 300.0}, {1.0, 1.0}}};
  const CueStats s = CueStats::FromLabels(labels);
  EXPECT_EQ(s.itd_mean_us, 200.0);
  EXPECT_EQ(s.itd_std_us, 100.0);
  EXPECT_EQ(s.ild_mean_db, 1.0);
  EXPECT_EQ(s.ild_std_db, 1.0);
}

class SyntheticCuesTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    CorpusSpec spec;
    spec.n_subjects = 4;
    corpus_ = new std::vector<SyntheticSubject>(SynthCorpus(spec));
  }
  static void TearDownTestSuite() { delete corpus_; }
  static std::vector<SyntheticSubject>* corpus_;
};

std::vector<SyntheticSubject>* SyntheticCuesTest::corpus_ = nullptr;

TEST_F(SyntheticCuesTest, EstimatesMatchGeneratorLabels) {
  double itd = 0.0, ild = 0.0;
  std::size_t n = 0;
  for (const auto& s : *corpus_) {
    const CueLabels est = LabelField(s.field);
    for (std::size_t i = 0; i < est.size(); ++i, ++n) {
      itd += std::abs(est.itd_us[i] - WoodworthItdUs(s.model, s.field.directions()[i]));
      ild += std::abs(est.ild_db[i] - s.labels.ild_db[i]);
    }
  }
  EXPECT_LE(itd / n, 10.0);
  EXPECT_LE(ild / n, 0.1);
}

TEST_F(SyntheticCuesTest, LateralDirectionsHaveLargestItd) {
  const auto& s = corpus_->front();
  const CueLabels est = LabelField(s.field);
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double lateral = LateralAngleDeg(s.field.directions()[i]);
    if (std::abs(lateral) < 5.0) {  // Woodworth gives 44.5 us at 5 degrees
      EXPECT_LE(std::abs(est.itd_us[i]), 50.0);
    }
    if (lateral > 60.0) {
      EXPECT_GT(est.itd_us[i], 400.0);
    }
    if (lateral < -60.0) {
      EXPECT_LT(est.itd_us[i], -400.0);
    }
  }
}

}  // namespace
}  // namespace biformer3d
