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

#include "biformer3d/experiment.h"

#include <fstream>
#include <set>
#include <sstream>

#include "biformer3d/error.h"
#include "config_json.h"

namespace biformer3d {
namespace {

using nlohmann::json;
using internal::ReadOptional;
using internal::RejectUnknownKeys;

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

const char* GridName(GridKind kind) {
  return kind == GridKind::kFibonacci ? "fibonacci" : "equiangular";
}

json SyntheticJson(const CorpusSpec& s) {
  return {{"n_subjects", s.n_subjects},
          {"grid", GridName(s.grid.kind)},
          {"n_directions", s.grid.count},
          {"rings", s.grid.rings},
          {"radius_m", s.grid.radius_m},
          {"K", s.hrir_length},
          {"sample_rate_hz", s.sample_rate_hz},
          {"head_radius_m", s.model_base.head_radius_m},
          {"speed_of_sound_mps", s.model_base.speed_of_sound_mps},
          {"shadow_strength", s.model_base.shadow_strength},
          {"pulse_width_samples", s.model_base.pulse_width_samples},
          {"pulse_bandwidth", s.model_base.pulse_bandwidth},
          {"jitter", s.jitter},
          {"seed", s.seed}};
}

CorpusSpec ParseSynthetic(const json& j) {
  RejectUnknownKeys(j,
                    {"n_subjects", "grid", "n_directions", "rings", "radius_m", "K",
                     "sample_rate_hz", "head_radius_m", "speed_of_sound_mps", "shadow_strength",
                     "pulse_width_samples", "pulse_bandwidth", "jitter", "seed"},
                    "synthetic");
  CorpusSpec s;
  ReadOptional(j, "n_subjects", s.n_subjects);
  std::string grid = GridName(s.grid.kind);
  ReadOptional(j, "grid", grid);
  if (grid == "fibonacci") {
    s.grid.kind = GridKind::kFibonacci;
  } else if (grid == "equiangular") {
    s.grid.kind = GridKind::kEquiangular;
  } else {
    throw Error(ErrorCode::kConfig, "grid must be 'fibonacci' or 'equiangular'");
  }
  ReadOptional(j, "n_directions", s.grid.count);
  ReadOptional(j, "rings", s.grid.rings);
  ReadOptional(j, "radius_m", s.grid.radius_m);
  ReadOptional(j, "K", s.hrir_length);
  ReadOptional(j, "sample_rate_hz", s.sample_rate_hz);
  ReadOptional(j, "head_radius_m", s.model_base.head_radius_m);
  ReadOptional(j, "speed_of_sound_mps", s.model_base.speed_of_sound_mps);
  ReadOptional(j, "shadow_strength", s.model_base.shadow_strength);
  ReadOptional(j, "pulse_width_samples", s.model_base.pulse_width_samples);
  ReadOptional(j, "pulse_bandwidth", s.model_base.pulse_bandwidth);
  ReadOptional(j, "jitter", s.jitter);
  ReadOptional(j, "seed", s.seed);
  return s;
}

}  // namespace

void ExperimentConfig::Validate() const {
  model.Validate();
  weights.Validate();
  Require(train_subjects >= 1, "need at least one training subject");
  Require(!sparsity.empty(), "sparsity list is empty");
  Require(lr >= 0.0 && weight_decay >= 0.0, "lr and weight_decay must be nonnegative");
  Require(batch_size >= 1, "batch_size must be positive");
  Require(eval_every >= 1, "eval_every must be positive");
  Require(threads >= 1, "threads must be positive");
  std::set<std::string> unique(exclude.begin(), exclude.end());
  Require(unique.size() == exclude.size(), "duplicate ids in exclude list");
  auto check_m = [](const std::vector<std::size_t>& ms, const char* what) {
    for (std::size_t m : ms) Require(m >= 1, std::string(what) + ": M must be at least 1");
  };
  check_m(sparsity, "sparsity");
  check_m(eval_sparsity, "eval_sparsity");
  Require(ablation_m >= 1, "ablation_m must be at least 1");
  if (corpus_dir.empty()) {
    Require(synthetic.hrir_length == model.hrir_length, "synthetic K differs from model K");
    Require(train_subjects + val_subjects <= synthetic.n_subjects,
            "split needs more subjects than the synthetic corpus has");
    auto below_l = [&](const std::vector<std::size_t>& ms) {
      for (std::size_t m : ms) Require(m < synthetic.grid.count, "M must be below L");
    };
    below_l(sparsity);
    below_l(eval_sparsity);
    Require(ablation_m < synthetic.grid.count, "ablation_m must be below L");
  }
}

ExperimentConfig ExperimentConfigFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  RejectUnknownKeys(j,
                    {"corpus_dir", "synthetic", "split", "sparsity", "eval_sparsity",
                     "ablation_m", "resample_masks", "model", "weights", "lr", "weight_decay",
                     "batch_size", "epochs", "eval_every", "seed", "threads", "ablation"},
                    "config");
  ExperimentConfig c;
  ReadOptional(j, "corpus_dir", c.corpus_dir);
  if (j.contains("synthetic")) c.synthetic = ParseSynthetic(j.at("synthetic"));
  if (j.contains("split")) {
    const json& s = j.at("split");
    RejectUnknownKeys(s, {"train_subjects", "val_subjects", "exclude"}, "split");
    ReadOptional(s, "train_subjects", c.train_subjects);
    ReadOptional(s, "val_subjects", c.val_subjects);
    ReadOptional(s, "exclude", c.exclude);
  }
  ReadOptional(j, "sparsity", c.sparsity);
  ReadOptional(j, "eval_sparsity", c.eval_sparsity);
  ReadOptional(j, "ablation_m", c.ablation_m);
  ReadOptional(j, "resample_masks", c.resample_masks);
  if (j.contains("model")) {
    c.model = internal::ParseModelConfig(j.at("model"));
  } else {
    c.model.hrir_length = c.synthetic.hrir_length;
  }
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    RejectUnknownKeys(w, {"lambda_hrtf", "lambda_itd", "lambda_ild"}, "weights");
    ReadOptional(w, "lambda_hrtf", c.weights.hrtf);
    ReadOptional(w, "lambda_itd", c.weights.itd);
    ReadOptional(w, "lambda_ild", c.weights.ild);
  }
  ReadOptional(j, "lr", c.lr);
  ReadOptional(j, "weight_decay", c.weight_decay);
  ReadOptional(j, "batch_size", c.batch_size);
  ReadOptional(j, "epochs", c.epochs);
  ReadOptional(j, "eval_every", c.eval_every);
  ReadOptional(j, "seed", c.seed);
  ReadOptional(j, "threads", c.threads);
  if (j.contains("ablation")) {
    const json& a = j.at("ablation");
    RejectUnknownKeys(a,
                      {"no_sinusoidal", "no_cue_heads", "no_refine", "no_hrtf_loss",
                       "mp_preprocess", "additive_tokens"},
                      "ablation");
    ReadOptional(a, "no_sinusoidal", c.ablation.no_sinusoidal);
    ReadOptional(a, "no_cue_heads", c.ablation.no_cue_heads);
    ReadOptional(a, "no_refine", c.ablation.no_refine);
    ReadOptional(a, "no_hrtf_loss", c.ablation.no_hrtf_loss);
    ReadOptional(a, "mp_preprocess", c.ablation.mp_preprocess);
    ReadOptional(a, "additive_tokens", c.ablation.additive_tokens);
  }
  c.Validate();
  return c;
}

std::string ExperimentConfigToJson(const ExperimentConfig& c) {
  json j = {{"corpus_dir", c.corpus_dir},
            {"synthetic", SyntheticJson(c.synthetic)},
            {"split",
             {{"train_subjects", c.train_subjects},
              {"val_subjects", c.val_subjects},
              {"exclude", c.exclude}}},
            {"sparsity", c.sparsity},
            {"eval_sparsity", c.eval_sparsity},
            {"ablation_m", c.ablation_m},
            {"resample_masks", c.resample_masks},
            {"model", internal::ModelConfigJson(c.model)},
            {"weights",
             {{"lambda_hrtf", c.weights.hrtf},
              {"lambda_itd", c.weights.itd},
              {"lambda_ild", c.weights.ild}}},
            {"lr", c.lr},
            {"weight_decay", c.weight_decay},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"eval_every", c.eval_every},
            {"seed", c.seed},
            {"threads", c.threads},
            {"ablation",
             {{"no_sinusoidal", c.ablation.no_sinusoidal},
              {"no_cue_heads", c.ablation.no_cue_heads},
              {"no_refine", c.ablation.no_refine},
              {"no_hrtf_loss", c.ablation.no_hrtf_loss},
              {"mp_preprocess", c.ablation.mp_preprocess},
              {"additive_tokens", c.ablation.additive_tokens}}}};
  return j.dump(2);
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ExperimentConfigFromJson(buffer.str());
}

ModelConfig EffectiveModelConfig(const ExperimentConfig& config) {
  ModelConfig m = config.model;
  if (config.ablation.no_sinusoidal) m.use_sinusoidal = false;
  if (config.ablation.no_cue_heads) m.use_cue_heads = false;
  if (config.ablation.no_refine) m.use_refine = false;
  if (config.ablation.additive_tokens) m.token_mode = TokenMode::kAdd;
  return m;
}

LossWeights EffectiveWeights(const ExperimentConfig& config) {
  LossWeights w = config.weights;
  if (config.ablation.no_cue_heads) w.itd = w.ild = 0.0;
  if (config.ablation.no_hrtf_loss) w.hrtf = 0.0;
  return w;
}

}  // namespace biformer3d
