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

#ifndef BIFORMER3D_ABLATION_H_
#define BIFORMER3D_ABLATION_H_

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "biformer3d/experiment.h"
#include "biformer3d/metrics.h"

namespace biformer3d {

enum class Variant {
  kFull,
  kNoSinusoidal,
  kNoCueHeads,
  kNoRefine,
  kNoHrtfLoss,
  kMpPreprocess,
};

inline constexpr std::array<Variant, 6> kAllVariants = {
    Variant::kFull,     Variant::kNoSinusoidal, Variant::kNoCueHeads,
    Variant::kNoRefine, Variant::kNoHrtfLoss,   Variant::kMpPreprocess};

const char* VariantName(Variant variant);

// A fresh copy of `base` with the variant's flag set; `base` is untouched.
ExperimentConfig VariantConfig(const ExperimentConfig& base, Variant variant);

struct AblationRow {
  Variant variant;
  MetricSet metrics;  // aggregate over validation subjects at ablation_m
};

using VariantCallback = std::function<void(const AblationRow&)>;

// Trains and evaluates each variant with the shared seed and corpus.
std::vector<AblationRow> RunAblation(const ExperimentConfig& base,
                                     std::span<const Variant> variants = kAllVariants,
                                     const VariantCallback& on_variant = {});

// Columns variant,nmse_db,cd,itd_e_us,ild_e_db.
std::string AblationCsv(const std::vector<AblationRow>& rows);

}  // namespace biformer3d

#endif  // BIFORMER3D_ABLATION_H_
