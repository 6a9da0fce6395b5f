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

#include "biformer3d/ablation.h"

#include <cstdio>

#include "biformer3d/corpus_io.h"
#include "biformer3d/evaluate.h"
#include "biformer3d/train.h"

namespace biformer3d {

const char* VariantName(Variant variant) {
  switch (variant) {
    case Variant::kFull:
      return "full";
    case Variant::kNoSinusoidal:
      return "no_sinusoidal";
    case Variant::kNoCueHeads:
      return "no_cue_heads";
    case Variant::kNoRefine:
      return "no_refine";
    case Variant::kNoHrtfLoss:
      return "no_hrtf_loss";
    case Variant::kMpPreprocess:
      return "mp_preprocess";
  }
  return "unknown";
}

ExperimentConfig VariantConfig(const ExperimentConfig& base, Variant variant) {
  ExperimentConfig c = base;
  switch (variant) {
    case Variant::kFull:
      break;
    case Variant::kNoSinusoidal:
      c.ablation.no_sinusoidal = true;
      break;
    case Variant::kNoCueHeads:
      c.ablation.no_cue_heads = true;
      break;
    case Variant::kNoRefine:
      c.ablation.no_refine = true;
      break;
    case Variant::kNoHrtfLoss:
      c.ablation.no_hrtf_loss = true;
      break;
    case Variant::kMpPreprocess:
      c.ablation.mp_preprocess = true;
      break;
  }
  return c;
}

std::vector<AblationRow> RunAblation(const ExperimentConfig& base,
                                     std::span<const Variant> variants,
                                     const VariantCallback& on_variant) {
  std::vector<AblationRow> rows;
  const std::size_t ms[] = {base.ablation_m};
  for (Variant v : variants) {
    const ExperimentConfig config = VariantConfig(base, v);
    const CorpusSplit corpus = PrepareCorpus(config);
    const TrainResult trained = Train(config, corpus.train, corpus.val);
    const auto eval = EvaluateModel(trained.model, corpus.val, ms, config.seed, config.threads);
    rows.push_back(AblationRow{v, AggregateFor(eval, base.ablation_m)});
    if (on_variant) on_variant(rows.back());
  }
  return rows;
}

std::string AblationCsv(const std::vector<AblationRow>& rows) {
  std::string out = "variant,nmse_db,cd,itd_e_us,ild_e_db\n";
  char buffer[256];
  for (const AblationRow& r : rows) {
    std::snprintf(buffer, sizeof(buffer), "%s,%.17g,%.17g,%.17g,%.17g\n", VariantName(r.variant),
                  r.metrics.nmse_db, r.metrics.cd, r.metrics.itd_e_us, r.metrics.ild_e_db);
    out += buffer;
  }
  return out;
}

}  // namespace biformer3d
