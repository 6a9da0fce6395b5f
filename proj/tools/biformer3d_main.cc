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

// Command-line front end: corpus generation, training, evaluation, ablation,
// up-sampling and heatmap rendering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biformer3d/ablation.h"
#include "biformer3d/bundle.h"
#include "biformer3d/corpus_io.h"
#include "biformer3d/error.h"
#include "biformer3d/evaluate.h"
#include "biformer3d/experiment.h"
#include "biformer3d/heatmap.h"
#include "biformer3d/synth.h"
#include "biformer3d/train.h"
#include "biformer3d/upsample.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace biformer3d;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kGeneration:
      return kExitConfig;
    case ErrorCode::kNumeric:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

ExperimentConfig LoadConfig(const GlobalOptions& g) {
  ExperimentConfig config;
  if (!g.config_path.empty()) config = LoadExperimentConfig(g.config_path);
  if (g.seed) config.seed = *g.seed;
  config.Validate();
  return config;
}

fs::path OutDir(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kData, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void WriteText(const fs::path& path, const std::string& text) {
  WriteFileAtomic(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kData, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void LogEpoch(const EpochLog& e) {
  std::printf("epoch %4zu  step %6lld  rec %.4e  hrtf %.4e  itd %.3f  ild %.3f  total %.4e",
              e.epoch, static_cast<long long>(e.step), e.train.rec, e.train.hrtf, e.train.itd,
              e.train.ild, e.train.total);
  if (e.val_nmse_db) std::printf("  val_nmse %.3f dB", *e.val_nmse_db);
  std::printf("\n");
  std::fflush(stdout);
}

int GenData(const GlobalOptions& g) {
  const ExperimentConfig config = LoadConfig(g);
  CorpusSpec spec = config.synthetic;
  if (g.seed) spec.seed = *g.seed;
  const fs::path dir = OutDir(g) / "corpus";
  std::string labels = "subject_id,row,azimuth_deg,elevation_deg,itd_us,ild_db\n";
  std::vector<Subject> subjects;
  std::vector<std::pair<std::string, std::string>> sidecars;
  char buffer[256];
  for (SyntheticSubject& s : SynthCorpus(spec)) {
    const auto& dirs = s.field.directions();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      std::snprintf(buffer, sizeof(buffer), "%s,%zu,%.17g,%.17g,%.17g,%.17g\n",
                    s.field.subject_id().c_str(), i, dirs[i].azimuth_deg(),
                    dirs[i].elevation_deg(), s.labels.itd_us[i], s.labels.ild_db[i]);
      labels += buffer;
    }
    nlohmann::json cues = {{"subject_id", s.field.subject_id()},
                           {"itd_us", s.labels.itd_us},
                           {"ild_db", s.labels.ild_db}};
    sidecars.emplace_back(s.field.subject_id() + ".cues.json", cues.dump());
    subjects.push_back(Subject{std::move(s.field), std::move(s.labels)});
  }
  SaveCorpus(dir, subjects);
  for (const auto& [name, text] : sidecars) WriteFileAtomic(dir / name, text + "\n");
  WriteText(dir / "labels.csv", labels);
  std::cout << "generated " << subjects.size() << " subjects in " << dir.string() << "\n";
  return 0;
}

int TrainVerb(const GlobalOptions& g) {
  const ExperimentConfig config = LoadConfig(g);
  const fs::path out = OutDir(g);
  const CorpusSplit corpus = PrepareCorpus(config);
  const TrainResult result = Train(config, corpus.train, corpus.val, LogEpoch);
  SaveModel(out / "model.ckpt", result.model, result.optimizer, result.steps);
  std::cout << "wrote " << (out / "model.ckpt").string() << " (epoch " << result.best_epoch
            << ")\n";
  WriteText(out / "train_log.csv", TrainLogCsv(result.log));
  WriteText(out / "config.json", ExperimentConfigToJson(config));
  return 0;
}

int EvalVerb(const GlobalOptions& g, const std::string& checkpoint) {
  const ExperimentConfig config = LoadConfig(g);
  const fs::path out = OutDir(g);
  const BiFormer3D<float> model =
      LoadModel(checkpoint.empty() ? out / "model.ckpt" : fs::path(checkpoint));
  const CorpusSplit corpus = PrepareCorpus(config);
  if (model.config().hrir_length != config.model.hrir_length) {
    throw Error(ErrorCode::kData, "checkpoint K differs from the corpus K");
  }
  const auto rows =
      EvaluateModel(model, corpus.val, config.eval_sparsity, config.seed, config.threads);
  WriteText(out / "metrics.csv", MetricsCsv(rows));
  return 0;
}

int BaselineVerb(const GlobalOptions& g) {
  const ExperimentConfig config = LoadConfig(g);
  const fs::path out = OutDir(g);
  const CorpusSplit corpus = PrepareCorpus(config);
  const auto rows = EvaluateBaseline(corpus.val, config.eval_sparsity, config.seed,
                                     config.threads);
  WriteText(out / "baseline_metrics.csv", MetricsCsv(rows));
  return 0;
}

int AblateVerb(const GlobalOptions& g) {
  const ExperimentConfig config = LoadConfig(g);
  const fs::path out = OutDir(g);
  const auto rows = RunAblation(config, kAllVariants, [](const AblationRow& r) {
    std::printf("%-14s nmse %.3f dB  cd %.4f  itd_e %.2f us  ild_e %.3f dB\n",
                VariantName(r.variant), r.metrics.nmse_db, r.metrics.cd, r.metrics.itd_e_us,
                r.metrics.ild_e_db);
    std::fflush(stdout);
  });
  WriteText(out / "ablation.csv", AblationCsv(rows));
  return 0;
}

std::vector<Direction> ReadTargets(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadText(path));
    std::vector<Direction> targets;
    for (const auto& d : j) {
      const double r = d.size() > 2 ? d.at(2).get<double>() : kDefaultRadiusM;
      targets.emplace_back(d.at(0).get<double>(), d.at(1).get<double>(), r);
    }
    return targets;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kData, "targets must be a JSON array of [az, el, r]: " +
                                      std::string(e.what()));
  } catch (const Error& e) {
    throw Error(ErrorCode::kData, std::string("bad target direction: ") + e.what());
  }
}

int UpsampleVerb(const GlobalOptions& g, const std::string& checkpoint,
                 const std::string& bundle, const std::string& targets_path,
                 const std::string& output) {
  const fs::path out = OutDir(g);
  const BiFormer3D<float> model =
      LoadModel(checkpoint.empty() ? out / "model.ckpt" : fs::path(checkpoint));
  const SubjectField measured = ReadBundle(bundle);
  const std::vector<Direction> targets =
      targets_path.empty() ? std::vector<Direction>{} : ReadTargets(targets_path);
  const SubjectField result = Upsample(model, measured, targets);
  const fs::path path = output.empty() ? out / "upsampled.hrirb" : fs::path(output);
  WriteBundle(path, result);
  std::cout << "wrote " << path.string() << " (" << result.measured_count() << " measured, "
            << result.missing_count() << " predicted)\n";
  return 0;
}

int HeatmapVerb(const GlobalOptions& g, const std::string& bundle, const std::string& estimate,
                const std::string& output) {
  const fs::path out = OutDir(g);
  const SubjectField reference = ReadBundle(bundle);
  GrayImage image;
  if (estimate.empty()) {
    image = RenderHeatmap(StackAllRows(reference), reference.directions());
  } else {
    const SubjectField est = ReadBundle(estimate);
    if (est.directions() != reference.directions()) {
      throw Error(ErrorCode::kData, "estimate bundle directions differ from the reference");
    }
    image = RenderComparison(StackAllRows(reference), StackAllRows(est), reference.directions());
  }
  const fs::path path = output.empty() ? out / "heatmap.pgm" : fs::path(output);
  WritePgm(path, image);
  std::cout << "wrote " << path.string() << " (" << image.width << "x" << image.height << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BiFormer3D binaural HRIR spatial up-sampling"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic corpus of HRIR bundles");
  auto* train = app.add_subcommand("train", "Train a model and write model.ckpt");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the validation subjects");
  auto* ablate = app.add_subcommand("ablate", "Train and evaluate the ablation variants");
  auto* upsample = app.add_subcommand("upsample", "Predict HRIRs at new directions");
  auto* heatmap = app.add_subcommand("heatmap", "Render stacked HRIRs as a PGM image");
  auto* baseline = app.add_subcommand("baseline", "Evaluate the nearest-neighbor baseline");

  std::string checkpoint, bundle, targets, output, estimate;
  for (auto* sub : {eval, upsample}) {
    sub->add_option("--checkpoint", checkpoint, "Checkpoint (default <out-dir>/model.ckpt)");
  }
  upsample->add_option("--bundle", bundle, "Measured HRIR bundle")->required();
  upsample->add_option("--targets", targets, "JSON array of [az, el, r] target directions");
  upsample->add_option("--output", output, "Output bundle");
  heatmap->add_option("--bundle", bundle, "Reference HRIR bundle")->required();
  heatmap->add_option("--estimate", estimate, "Estimate bundle, drawn to the right");
  heatmap->add_option("--output", output, "Output PGM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return GenData(g);
    if (*train) return TrainVerb(g);
    if (*eval) return EvalVerb(g, checkpoint);
    if (*ablate) return AblateVerb(g);
    if (*upsample) return UpsampleVerb(g, checkpoint, bundle, targets, output);
    if (*heatmap) return HeatmapVerb(g, bundle, estimate, output);
    if (*baseline) return BaselineVerb(g);
  } catch (const Error& e) {
    std::cerr << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
