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

#include "biformer3d/corpus_io.h"

#include <algorithm>
#include <set>
#include <string>

#include "biformer3d/bundle.h"
#include "biformer3d/error.h"
#include "biformer3d/synth.h"

namespace biformer3d {

Subject MakeSubject(SubjectField field) {
  CueLabels labels = LabelField(field);
  return Subject{std::move(field), std::move(labels)};
}

void SaveCorpus(const std::filesystem::path& dir, const std::vector<Subject>& subjects) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kData, "cannot create " + dir.string() + ": " + ec.message());
  for (const Subject& s : subjects) {
    WriteBundle(dir / (s.field.subject_id() + kBundleExtension), s.field);
  }
}

std::vector<Subject> LoadCorpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kData, "corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kBundleExtension) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw Error(ErrorCode::kData, "no bundles in " + dir.string());

  std::vector<Subject> subjects;
  for (const auto& path : files) {
    SubjectField field = ReadBundle(path);
    field = field.WithMask(std::vector<std::uint8_t>(field.size(), 1));
    subjects.push_back(MakeSubject(std::move(field)));
  }
  std::sort(subjects.begin(), subjects.end(), [](const Subject& a, const Subject& b) {
    return a.field.subject_id() < b.field.subject_id();
  });
  const SubjectField& first = subjects.front().field;
  for (std::size_t i = 1; i < subjects.size(); ++i) {
    const SubjectField& f = subjects[i].field;
    if (f.subject_id() == subjects[i - 1].field.subject_id()) {
      throw Error(ErrorCode::kData, "duplicate subject id " + f.subject_id());
    }
    if (f.hrir_length() != first.hrir_length() || f.sample_rate_hz() != first.sample_rate_hz()) {
      throw Error(ErrorCode::kData, "subject " + f.subject_id() +
                                        " differs from the corpus in K or sample rate");
    }
  }
  return subjects;
}

CorpusSplit SplitCorpus(const ExperimentConfig& config, std::vector<Subject> subjects) {
  const std::set<std::string> excluded(config.exclude.begin(), config.exclude.end());
  std::erase_if(subjects,
                [&](const Subject& s) { return excluded.count(s.field.subject_id()) > 0; });
  if (subjects.size() < config.train_subjects + config.val_subjects) {
    throw Error(ErrorCode::kData, "corpus has " + std::to_string(subjects.size()) +
                                      " subjects, split needs " +
                                      std::to_string(config.train_subjects + config.val_subjects));
  }
  const std::size_t k = subjects.front().field.hrir_length();
  if (k != config.model.hrir_length) {
    throw Error(ErrorCode::kData, "corpus K=" + std::to_string(k) + " but model K=" +
                                      std::to_string(config.model.hrir_length));
  }
  const std::size_t l = subjects.front().field.size();
  auto check_m = [&](std::size_t m) {
    if (m >= l) {
      throw Error(ErrorCode::kConfig,
                  "M=" + std::to_string(m) + " not below L=" + std::to_string(l));
    }
  };
  for (std::size_t m : config.sparsity) check_m(m);
  for (std::size_t m : config.eval_sparsity) check_m(m);
  check_m(config.ablation_m);

  if (config.ablation.mp_preprocess) {
    for (Subject& s : subjects) s = MakeSubject(MinimumPhaseField(s.field));
  }
  CorpusSplit split;
  auto train_end = subjects.begin() + static_cast<std::ptrdiff_t>(config.train_subjects);
  auto val_end = train_end + static_cast<std::ptrdiff_t>(config.val_subjects);
  split.train.assign(std::make_move_iterator(subjects.begin()), std::make_move_iterator(train_end));
  split.val.assign(std::make_move_iterator(train_end), std::make_move_iterator(val_end));
  return split;
}

CorpusSplit PrepareCorpus(const ExperimentConfig& config) {
  std::vector<Subject> subjects;
  if (config.corpus_dir.empty()) {
    for (SyntheticSubject& s : SynthCorpus(config.synthetic)) {
      subjects.push_back(MakeSubject(std::move(s.field)));
    }
  } else {
    subjects = LoadCorpus(config.corpus_dir);
  }
  return SplitCorpus(config, std::move(subjects));
}

}  // namespace biformer3d
