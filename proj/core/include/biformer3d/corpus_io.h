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

#ifndef BIFORMER3D_CORPUS_IO_H_
#define BIFORMER3D_CORPUS_IO_H_

#include <filesystem>
#include <vector>

#include "biformer3d/cues.h"
#include "biformer3d/experiment.h"
#include "biformer3d/hrir.h"

namespace biformer3d {

inline constexpr const char* kBundleExtension = ".hrirb";

// A fully measured field and its per-row cue targets.
struct Subject {
  SubjectField field;
  CueLabels labels;
};

// Labels are estimated from the field with the metric estimators.
Subject MakeSubject(SubjectField field);

// Writes <dir>/<subject_id>.hrirb for each subject. Creates `dir`.
void SaveCorpus(const std::filesystem::path& dir, const std::vector<Subject>& subjects);

// Reads every *.hrirb in `dir`, ordered by subject id, with masks reset to
// all-measured. Throws kData on unreadable or mutually inconsistent bundles.
std::vector<Subject> LoadCorpus(const std::filesystem::path& dir);

struct CorpusSplit {
  std::vector<Subject> train;
  std::vector<Subject> val;
};

// Loads (or synthesizes) the corpus of `config`, applies exclusion,
// minimum-phase pre-processing and the train/validation split.
CorpusSplit PrepareCorpus(const ExperimentConfig& config);

// Applies exclusion and the split to an existing subject list.
CorpusSplit SplitCorpus(const ExperimentConfig& config, std::vector<Subject> subjects);

}  // namespace biformer3d

#endif  // BIFORMER3D_CORPUS_IO_H_
