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

#ifndef BIFORMER3D_EXPERIMENT_H_
#define BIFORMER3D_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "biformer3d/losses.h"
#include "biformer3d/model_config.h"
#include "biformer3d/synth.h"

namespace biformer3d {

struct AblationFlags {
  bool no_sinusoidal = false;
  bool no_cue_heads = false;
  bool no_refine = false;
  bool no_hrtf_loss = false;
  bool mp_preprocess = false;
  bool additive_tokens = false;
};

struct ExperimentConfig {
  // Directory of HRIR bundles; empty means generate `synthetic` in memory.
  std::string corpus_dir;
  CorpusSpec synthetic;
  // The first train_subjects (after exclusion, sorted by id) train, the next
  // val_subjects validate.
  std::size_t train_subjects = 16;
  std::size_t val_subjects = 4;
  std::vector<std::string> exclude;
  // Training draws M from `sparsity` per subject and step.
  std::vector<std::size_t> sparsity = {3, 5, 9, 27};
  std::vector<std::size_t> eval_sparsity = {5, 9, 27};
  std::size_t ablation_m = 5;
  // Off: each training subject keeps one fixed farthest-point mask.
  bool resample_masks = true;
  ModelConfig model;
  LossWeights weights;
  double lr = 3e-4;
  double weight_decay = 0.01;
  std::size_t batch_size = 8;
  std::size_t epochs = 200;
  // Validation cadence in epochs; the last epoch is always validated.
  std::size_t eval_every = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  AblationFlags ablation;

  // Throws kConfig.
  void Validate() const;
};

ExperimentConfig ExperimentConfigFromJson(const std::string& text);
std::string ExperimentConfigToJson(const ExperimentConfig& config);
// Throws kConfig when unreadable or invalid.
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Model and loss weights after applying the ablation flags.
ModelConfig EffectiveModelConfig(const ExperimentConfig& config);
LossWeights EffectiveWeights(const ExperimentConfig& config);

}  // namespace biformer3d

#endif  // BIFORMER3D_EXPERIMENT_H_
