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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "biformer3d/error.h"

namespace biformer3d {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

std::string SubjectName(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "S" + digits;
}

}  // namespace

void HeadModel::Validate() const {
  if (!(head_radius_m > 0.0) || !(speed_of_sound_mps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "head radius and speed of sound must be positive");
  }
  if (!(shadow_strength >= 0.0 && shadow_strength <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "shadow_strength must lie in [0, 1]");
  }
  if (pulse_width_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "pulse width must be positive");
  }
  if (!(pulse_bandwidth > 0.0 && pulse_bandwidth <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pulse bandwidth must lie in (0, 1]");
  }
}

double LateralAngleDeg(const Direction& d) {
  const double s = std::sin(d.azimuth_deg() * kDegToRad) *
                   std::cos(d.elevation_deg() * kDegToRad);
  return std::asin(std::clamp(s, -1.0, 1.0)) / kDegToRad;
}

double WoodworthItdUs(const HeadModel& model, const Direction& d) {
  const double lateral = LateralAngleDeg(d) * kDegToRad;
  return model.head_radius_m / model.speed_of_sound_mps *
         (std::sin(lateral) + lateral) * 1e6;
}

EarGains ShadowGains(const HeadModel& model, const Direction& d) {
  // Ear axes point at az 90 (left) and az 270 (right) on the horizontal
  // plane, so cos(angle to the left axis) = sin(az) cos(el).
  const double cos_left = std::sin(d.azimuth_deg() * kDegToRad) *
                          std::cos(d.elevation_deg() * kDegToRad);
  const double s = model.shadow_strength;
  return {1.0 - s * (1.0 - cos_left) / 2.0, 1.0 - s * (1.0 + cos_left) / 2.0};
}

std::vector<double> WindowedSincPulse(std::size_t k, double center, int width_samples,
                                      double bandwidth) {
  const double half = 0.5 * width_samples;
  if (center - half < 0.0 || center + half > static_cast<double>(k) - 1.0) {
    throw Error(ErrorCode::kGeneration,
                "pulse at " + std::to_string(center) + " with width " +
                    std::to_string(width_samples) + " does not fit in K=" +
                    std::to_string(k));
  }
  std::vector<double> pulse(k, 0.0);
  double energy = 0.0;
  for (std::size_t n = 0; n < k; ++n) {
    const double t = static_cast<double>(n) - center;
    if (std::abs(t) >= half) continue;
    const double window = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / width_samples));
    pulse[n] = window * Sinc(bandwidth * t);
    energy += pulse[n] * pulse[n];
  }
  const double norm = 1.0 / std::sqrt(energy);
  for (double& x : pulse) x *= norm;
  return pulse;
}

BinauralHrir SynthHrir(const HeadModel& model, const Direction& d, std::size_t k,
                       int sample_rate_hz) {
  model.Validate();
  if (sample_rate_hz <= 0) throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  const double itd_samples = WoodworthItdUs(model, d) * 1e-6 * sample_rate_hz;
  const double base = 0.5 * static_cast<double>(k);
  const EarGains gains = ShadowGains(model, d);

  BinauralHrir h;
  h.sample_rate_hz = sample_rate_hz;
  h.left = WindowedSincPulse(k, base - 0.5 * itd_samples, model.pulse_width_samples,
                             model.pulse_bandwidth);
  h.right = WindowedSincPulse(k, base + 0.5 * itd_samples, model.pulse_width_samples,
                              model.pulse_bandwidth);
  for (double& x : h.left) x *= gains.left;
  for (double& x : h.right) x *= gains.right;
  return h;
}

std::vector<Direction> MakeGrid(const GridSpec& grid) {
  if (grid.count == 0) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one direction");
  std::vector<Direction> dirs;
  dirs.reserve(grid.count);
  switch (grid.kind) {
    case GridKind::kFibonacci: {
      const double golden_deg = 180.0 * (3.0 - std::sqrt(5.0));
      const double n = static_cast<double>(grid.count);
      for (std::size_t i = 0; i < grid.count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
        const double el = std::asin(z) / kDegToRad;
        const double az = std::fmod(static_cast<double>(i) * golden_deg, 360.0);
        dirs.emplace_back(az, el, grid.radius_m);
      }
      break;
    }
    case GridKind::kEquiangular: {
      if (grid.rings == 0 || grid.count % grid.rings != 0) {
        throw Error(ErrorCode::kInvalidArgument, "equiangular count must be a multiple of rings");
      }
      const std::size_t per_ring = grid.count / grid.rings;
      for (std::size_t r = 0; r < grid.rings; ++r) {
        const double el = -90.0 + 180.0 * (static_cast<double>(r) + 0.5) /
                                      static_cast<double>(grid.rings);
        for (std::size_t a = 0; a < per_ring; ++a) {
          dirs.emplace_back(360.0 * static_cast<double>(a) / static_cast<double>(per_ring), el,
                            grid.radius_m);
        }
      }
      break;
    }
  }
  return dirs;
}

std::vector<SyntheticSubject> SynthCorpus(const CorpusSpec& spec) {
  spec.model_base.Validate();
  if (spec.jitter < 0.0 || spec.jitter >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "jitter must lie in [0, 1)");
  }
  const std::vector<Direction> directions = MakeGrid(spec.grid);
  std::vector<SyntheticSubject> corpus;
  corpus.reserve(spec.n_subjects);
  for (std::size_t s = 0; s < spec.n_subjects; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    HeadModel model = spec.model_base;
    model.subject_jitter_seed = rng();
    model.head_radius_m *= 1.0 + spec.jitter * unit(rng);
    model.shadow_strength =
        std::clamp(model.shadow_strength * (1.0 + spec.jitter * unit(rng)), 0.0, 1.0);

    std::vector<BinauralHrir> hrirs;
    CueLabels labels;
    hrirs.reserve(directions.size());
    for (const Direction& d : directions) {
      hrirs.push_back(SynthHrir(model, d, spec.hrir_length, spec.sample_rate_hz));
      const EarGains g = ShadowGains(model, d);
      labels.itd_us.push_back(WoodworthItdUs(model, d));
      labels.ild_db.push_back(20.0 * (std::log10(g.left) - std::log10(g.right)));
    }
    corpus.push_back(SyntheticSubject{
        SubjectField(SubjectName(s), directions, std::move(hrirs),
                     std::vector<std::uint8_t>(directions.size(), 1)),
        std::move(labels), model});
  }
  return corpus;
}

}  // namespace biformer3d
