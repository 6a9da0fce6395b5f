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

#ifndef BIFORMER3D_METRICS_H_
#define BIFORMER3D_METRICS_H_

#include <cstdint>
#include <span>

#include "biformer3d/cues.h"
#include "biformer3d/hrir.h"

namespace biformer3d {

// Reported in place of -inf for a perfect reconstruction.
inline constexpr double kNmseFloorDb = -300.0;

// 10 log10 of the mean over missing rows of |pred - target|^2 / |target|^2.
// Throws kInvalidField on a zero-energy target row and kInvalidArgument when
// nothing is missing.
double NmseDb(const StackedHrirs& pred, const StackedHrirs& target,
              std::span<const std::uint8_t> mask);

// Mean over missing rows of 1 - cos(pred, target), in [0, 2]. Throws
// kInvalidField on a zero-norm row.
double CosineDistance(const StackedHrirs& pred, const StackedHrirs& target,
                      std::span<const std::uint8_t> mask);

struct CueErrors {
  double itd_us = 0.0;
  double ild_db = 0.0;
};

// Mean absolute cue differences over missing rows. `target_cues`, when
// given, replaces estimating the reference rows again.
CueErrors CueErrorsOf(const StackedHrirs& pred, const StackedHrirs& target,
                      std::span<const std::uint8_t> mask, int sample_rate_hz,
                      const CueLabels* target_cues = nullptr);

struct MetricSet {
  double nmse_db = 0.0;
  double cd = 0.0;
  double itd_e_us = 0.0;
  double ild_e_db = 0.0;
};

MetricSet ComputeMetrics(const StackedHrirs& pred, const StackedHrirs& target,
                         std::span<const std::uint8_t> mask, int sample_rate_hz,
                         const CueLabels* target_cues = nullptr);

// Arithmetic mean of each metric.
MetricSet MeanMetrics(std::span<const MetricSet> sets);

}  // namespace biformer3d

#endif  // BIFORMER3D_METRICS_H_
