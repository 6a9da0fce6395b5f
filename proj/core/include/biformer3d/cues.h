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

#ifndef BIFORMER3D_CUES_H_
#define BIFORMER3D_CUES_H_

#include <span>
#include <vector>

#include "biformer3d/hrir.h"

namespace biformer3d {

// Per-direction binaural cues. Positive ITD means the left ear leads,
// positive ILD means the left ear is louder.
struct CueLabels {
  std::vector<double> itd_us;
  std::vector<double> ild_db;

  std::size_t size() const { return itd_us.size(); }
};

// Training-set statistics used to z-score cue targets for the auxiliary
// heads. Identity by default.
struct CueStats {
  double itd_mean_us = 0.0;
  double itd_std_us = 1.0;
  double ild_mean_db = 0.0;
  double ild_std_db = 1.0;

  static CueStats FromLabels(std::span<const CueLabels> labels);
};

inline constexpr double kDefaultItdLowpassHz = 3000.0;

// Low-passes both ears (2nd-order Butterworth run forward and backward),
// takes the full interaural cross-correlation and refines the peak lag with
// a 3-point parabola. Throws kUndefinedCue if either ear is silent.
double EstimateItdUs(const BinauralHrir& hrir,
                     double lowpass_hz = kDefaultItdLowpassHz);

// Broadband 10 log10(E_left / E_right). Throws kUndefinedCue on a
// zero-energy ear.
double EstimateIldDb(const BinauralHrir& hrir);

// Per-band ILD through 4th-order gammatone magnitude weights centred on
// `center_hz`. Not part of the default metric suite.
std::vector<double> EstimateBandIldDb(const BinauralHrir& hrir,
                                      std::span<const double> center_hz);

// ERB-spaced centre frequencies between lo_hz and hi_hz.
std::vector<double> ErbCenterFrequencies(double lo_hz, double hi_hz, int count);

CueLabels LabelField(const SubjectField& field,
                     double lowpass_hz = kDefaultItdLowpassHz);

// Helpers shared with the estimators; exposed for tests.
std::vector<double> ZeroPhaseLowpass(std::span<const double> x, double cutoff_hz,
                                     int sample_rate_hz);
// r[lag] = sum_n a[n] b[n + lag] for lag in [-(K-1), K-1], index lag + K - 1.
std::vector<double> CrossCorrelation(std::span<const double> a,
                                     std::span<const double> b);

}  // namespace biformer3d

#endif  // BIFORMER3D_CUES_H_
