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

#include "biformer3d/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "biformer3d/dft.h"
#include "biformer3d/error.h"
#include "biformer3d/evaluate.h"
#include "biformer3d/nn/checkpoint.h"
#include "biformer3d/sparsity.h"
#include "config_json.h"

namespace biformer3d {
namespace {

struct Accumulator {
  LossReport sum;
  std::size_t count = 0;

  void Add(const LossReport& r) {
    sum.rec += r.rec;
    sum.hrtf += r.hrtf;
    sum.itd += r.itd;
    sum.ild += r.ild;
    sum.total += r.total;
    sum.itd_mae_us += r.itd_mae_us;
    sum.ild_mae_db += r.ild_mae_db;
    ++count;
  }

  LossReport Mean() const {
    LossReport m = sum;
    if (count == 0) return m;
    const double n = static_cast<double>(count);
    m.rec /= n;
    m.hrtf /= n;
    m.itd /= n;
    m.ild /= n;
    m.total /= n;
    m.itd_mae_us /= n;
    m.ild_mae_db /= n;
    return m;
  }
};

double ValidationNmse(const BiFormer3D<float>& model, const ExperimentConfig& config,
                      const std::vector<Subject>& val) {
  const auto rows = EvaluateModel(model, val, config.eval_sparsity, config.seed, config.threads);
  double sum = 0.0;
  for (std::size_t m : config.eval_sparsity) sum += AggregateFor(rows, m).nmse_db;
  return sum / static_cast<double>(config.eval_sparsity.size());
}

// Runs `epochs` epochs, or stops after `max_steps` steps when positive.
TrainResult RunLoop(const ExperimentConfig& config, const std::vector<Subject>& train,
                    const std::vector<Subject>& val, std::size_t epochs, std::int64_t max_steps,
                    const EpochCallback& on_epoch) {
  config.Validate();
  if (train.empty()) throw Error(ErrorCode::kData, "no training subjects");
  const ModelConfig model_config = EffectiveModelConfig(config);
  const LossWeights weights = EffectiveWeights(config);
  for (const Subject& s : train) {
    if (s.field.hrir_length() != model_config.hrir_length) {
      throw Error(ErrorCode::kData, "subject " + s.field.subject_id() + " has K=" +
                                        std::to_string(s.field.hrir_length()) +
                                        ", model expects " +
                                        std::to_string(model_config.hrir_length));
    }
    for (std::size_t m : config.sparsity) {
      if (m >= s.field.size()) throw Error(ErrorCode::kConfig, "M must be below L");
    }
  }

  std::mt19937_64 rng(config.seed);
  BiFormer3D<float> model(model_config, rng());
  std::vector<CueLabels> labels;
  for (const Subject& s : train) labels.push_back(s.labels);
  const CueStats stats = CueStats::FromLabels(labels);
  model.set_cue_stats(stats);

  const nn::AdamWOptions options{config.lr, 0.9, 0.999, 1e-8, config.weight_decay};
  nn::AdamW<float> optimizer(options, model.params());
  const DftBasis<float> basis = MakeDftBasis<float>(model_config.hrir_length);

  std::vector<std::vector<std::uint8_t>> fixed_masks;
  if (!config.resample_masks) {
    for (const Subject& s : train) {
      fixed_masks.push_back(ValidationMask(s.field, config.sparsity.front(), config.seed));
    }
  }

  TrainResult result{model, {}, std::nullopt, 0, 0, options};
  std::vector<std::size_t> order(train.size());
  std::uniform_int_distribution<std::size_t> pick_m(0, config.sparsity.size() - 1);
  std::int64_t step = 0;

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Accumulator epoch_losses;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      if (max_steps > 0 && step >= max_steps) break;
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      nn::Gradients<float> grads = nn::ZeroGradients(model.params());
      for (std::size_t b = start; b < end; ++b) {
        const Subject& s = train[order[b]];
        std::vector<std::uint8_t> mask;
        if (config.resample_masks) {
          const std::size_t m = config.sparsity[pick_m(rng)];
          mask = SampleSparsity(s.field, m,
                                {SparsityStrategy::kFarthestPointRandomStart, {}, rng()});
        } else {
          mask = fixed_masks[order[b]];
        }
        const SubjectField sample = s.field.WithMask(std::move(mask));

        nn::Tape<float> tape;
        const auto bound = model.Bind(tape);
        const ForwardGraph<float> graph = model.BuildGraph(tape, bound, sample);
        const LossGraph<float> loss = BuildLoss(graph, sample, s.labels, stats, weights, basis);
        const LossReport report = loss.Report(stats);
        if (!std::isfinite(report.total)) {
          throw Error(ErrorCode::kNumeric,
                      "non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                          std::to_string(step) + ", subject " + s.field.subject_id() +
                          " (rec=" + std::to_string(report.rec) +
                          ", hrtf=" + std::to_string(report.hrtf) + ")");
        }
        epoch_losses.Add(report);
        tape.Backward(loss.total);
        const nn::Gradients<float> g = model.params().CollectGradients(bound);
        for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += g[i];
      }
      const float inv_batch = 1.0f / static_cast<float>(end - start);
      for (auto& g : grads) g *= inv_batch;
      optimizer.Step(model.mutable_params(), grads);
      ++step;
    }

    EpochLog entry{epoch, step, epoch_losses.Mean(), std::nullopt};
    const bool last = epoch == epochs || (max_steps > 0 && step >= max_steps);
    if (!val.empty() && (epoch % config.eval_every == 0 || last)) {
      entry.val_nmse_db = ValidationNmse(model, config, val);
      if (!result.best_val_nmse_db || *entry.val_nmse_db < *result.best_val_nmse_db) {
        result.best_val_nmse_db = entry.val_nmse_db;
        result.best_epoch = epoch;
        result.model = model;
      }
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
    if (last) break;
  }
  if (val.empty()) {
    result.model = model;
    result.best_epoch = result.log.empty() ? 0 : result.log.back().epoch;
  }
  result.steps = step;
  return result;
}

}  // namespace

TrainResult Train(const ExperimentConfig& config, const std::vector<Subject>& train,
                  const std::vector<Subject>& val, const EpochCallback& on_epoch) {
  return RunLoop(config, train, val, config.epochs, 0, on_epoch);
}

TrainResult TrainSteps(const ExperimentConfig& config, const std::vector<Subject>& train,
                       std::int64_t steps, const EpochCallback& on_epoch) {
  if (steps <= 0) throw Error(ErrorCode::kConfig, "steps must be positive");
  const std::size_t per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t epochs = (static_cast<std::size_t>(steps) + per_epoch - 1) / per_epoch;
  return RunLoop(config, train, {}, epochs, steps, on_epoch);
}

std::string TrainLogCsv(const std::vector<EpochLog>& log) {
  std::string out =
      "epoch,step,l_rec,l_hrtf,l_itd,l_ild,l_total,itd_mae_us,ild_mae_db,val_nmse_db\n";
  char buffer[512];
  for (const EpochLog& e : log) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%lld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,", e.epoch,
                  static_cast<long long>(e.step), e.train.rec, e.train.hrtf, e.train.itd,
                  e.train.ild, e.train.total, e.train.itd_mae_us, e.train.ild_mae_db);
    out += buffer;
    if (e.val_nmse_db) {
      std::snprintf(buffer, sizeof(buffer), "%.9g", *e.val_nmse_db);
      out += buffer;
    }
    out += '\n';
  }
  return out;
}

void SaveModel(const std::filesystem::path& path, const BiFormer3D<float>& model,
               const nn::AdamWOptions& optimizer, std::int64_t step) {
  const CueStats& s = model.cue_stats();
  nlohmann::json meta = {{"model", internal::ModelConfigJson(model.config())},
                         {"cue_stats",
                          {{"itd_mean_us", s.itd_mean_us},
                           {"itd_std_us", s.itd_std_us},
                           {"ild_mean_db", s.ild_mean_db},
                           {"ild_std_db", s.ild_std_db}}}};
  nn::Checkpoint checkpoint{model.params(), optimizer, step, meta.dump()};
  nn::SaveCheckpoint(path, checkpoint);
}

BiFormer3D<float> LoadModel(const std::filesystem::path& path) {
  nn::Checkpoint checkpoint = nn::LoadCheckpoint(path);
  try {
    const nlohmann::json meta = nlohmann::json::parse(checkpoint.metadata_json);
    const ModelConfig config = internal::ParseModelConfig(meta.at("model"));
    const nlohmann::json& s = meta.at("cue_stats");
    const CueStats stats{s.at("itd_mean_us").get<double>(), s.at("itd_std_us").get<double>(),
                         s.at("ild_mean_db").get<double>(), s.at("ild_std_db").get<double>()};
    return BiFormer3D<float>(config, std::move(checkpoint.params), stats);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kData, "checkpoint metadata: " + std::string(e.what()));
  } catch (const Error& e) {
    throw Error(ErrorCode::kData, "checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace biformer3d
