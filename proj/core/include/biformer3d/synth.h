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

#ifndef BIFORMER3D_SYNTH_H_
#define BIFORMER3D_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "biformer3d/cues.h"
#include "biformer3d/hrir.h"

namespace biformer3d {

// Parametric spherical head: Woodworth ITD, cosine head-shadow gain and a
// Hann-windowed sinc pulse placed at a fractional delay per ear.
struct HeadModel {
  double head_radius_m = 0.0875;
  double speed_of_sound_mps = 343.0;
  double shadow_strength = 0.5;
  int pulse_width_samples = 16;
  std::uint64_t subject_jitter_seed = 0;
  // Sinc cutoff as a fraction of Nyquist.
  double pulse_bandwidth = 0.5;

  void Validate() const;
};

// asin(sin(az) cos(el)) in degrees; +90 at the left ear.
double LateralAngleDeg(const Direction& d);

// (a/c)(sin t + t) * 1e6 for lateral angle t; positive toward the left ear.
double WoodworthItdUs(const HeadModel& model, const Direction& d);

struct EarGains {
  double left;
  double right;
};

// gain = 1 - s (1 - cos(angle to ear axis)) / 2.
EarGains ShadowGains(const HeadModel& model, const Direction& d);

// Each ear is a unit-energy pulse scaled by its gain, centred at
// K/2 -+ ITD/2 samples. Throws kGeneration if a pulse does not fit in K.
BinauralHrir SynthHrir(const HeadModel& model, const Direction& d,
                       std::size_t k, int sample_rate_hz);

// Unit-energy Hann-windowed sinc centred at `center` (fractional samples).
std::vector<double> WindowedSincPulse(std::size_t k, double center,
                                      int width_samples, double bandwidth);

enum class GridKind { kFibonacci, kEquiangular };

struct GridSpec {
  GridKind kind = GridKind::kFibonacci;
  std::size_t count = 81;
  // Equiangular only: number of elevation rings; count must be a multiple.
  std::size_t rings = 9;
  double radius_m = kDefaultRadiusM;
};

std::vector<Direction> MakeGrid(const GridSpec& grid);

struct CorpusSpec {
  std::size_t n_subjects = 20;
  GridSpec grid;
  std::size_t hrir_length = 64;
  int sample_rate_hz = 48000;
  HeadModel model_base;
  // Relative jitter on head radius and shadow strength per subject.
  double jitter = 0.10;
  std::uint64_t seed = 0;
};

struct SyntheticSubject {
  SubjectField field;
  CueLabels labels;
  HeadModel model;
};

// Subjects are named "S0000", "S0001", ...; every field is fully measured.
std::vector<SyntheticSubject> SynthCorpus(const CorpusSpec& spec);

// Real-cepstrum minimum-phase counterpart with a magnitude floor of
// 1e-8 x peak magnitude. Throws kInvalidArgument on an all-zero input.
std::vector<double> MinimumPhase(std::span<const double> h);

// Applies MinimumPhase to both ears of every row.
SubjectField MinimumPhaseField(const SubjectField& field);

}  // namespace biformer3d

#endif  // BIFORMER3D_SYNTH_H_
