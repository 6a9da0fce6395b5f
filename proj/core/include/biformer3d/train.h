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

#ifndef BIFORMER3D_TRAIN_H_
#define BIFORMER3D_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biformer3d/biformer.h"
#include "biformer3d/corpus_io.h"
#include "biformer3d/experiment.h"
#include "biformer3d/losses.h"
#include "biformer3d/nn/adamw.h"

namespace biformer3d {

struct EpochLog {
  std::size_t epoch = 0;
  std::int64_t step = 0;
  // Component means over the epoch's subject samples.
  LossReport train;
  // Mean aggregate validation NMSE over eval_sparsity, when validated.
  std::optional<double> val_nmse_db;
};

struct TrainResult {
  BiFormer3D<float> model;  // best validation NMSE, or last without validation
  std::vector<EpochLog> log;
  std::optional<double> best_val_nmse_db;
  std::size_t best_epoch = 0;
  std::int64_t steps = 0;
  nn::AdamWOptions optimizer;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Sequential AdamW loop. Each step draws a batch of subjects from a per-epoch
// shuffle, a sparsity M and mask per subject, and averages the gradients of
// the total loss. Deterministic given config.seed. Throws kNumeric on a
// non-finite loss.
TrainResult Train(const ExperimentConfig& config, const std::vector<Subject>& train,
                  const std::vector<Subject>& val, const EpochCallback& on_epoch = {});

// Same loop for exactly `steps` steps, no validation.
TrainResult TrainSteps(const ExperimentConfig& config, const std::vector<Subject>& train,
                       std::int64_t steps, const EpochCallback& on_epoch = {});

std::string TrainLogCsv(const std::vector<EpochLog>& log);

// Checkpoint with the model config and cue statistics in the manifest.
void SaveModel(const std::filesystem::path& path, const BiFormer3D<float>& model,
               const nn::AdamWOptions& optimizer = {}, std::int64_t step = 0);
BiFormer3D<float> LoadModel(const std::filesystem::path& path);

}  // namespace biformer3d

#endif  // BIFORMER3D_TRAIN_H_
