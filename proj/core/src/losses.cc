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

#include "biformer3d/losses.h"

#include <cmath>
#include <string>

#include "biformer3d/error.h"
#include "biformer3d/nn/ops.h"

namespace biformer3d {
namespace {

void RequireSameShape(const MatrixD& a, const MatrixD& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": shapes differ");
  }
}

std::vector<std::size_t> RequireMissing(std::span<const std::uint8_t> mask, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(mask.size()) != rows) {
    throw Error(ErrorCode::kShapeMismatch, "mask length does not match rows");
  }
  std::vector<std::size_t> missing = MissingIndices(mask);
  if (missing.empty()) throw Error(ErrorCode::kInvalidArgument, "no missing rows to supervise");
  return missing;
}

}  // namespace

void LossWeights::Validate() const {
  if (!(hrtf >= 0.0) || !(itd >= 0.0) || !(ild >= 0.0)) {
    throw Error(ErrorCode::kConfig, "loss weights must be nonnegative");
  }
}

double LossRec(const StackedHrirs& pred, const StackedHrirs& target,
               std::span<const std::uint8_t> mask) {
  RequireSameShape(pred, target, "LossRec");
  const auto missing = RequireMissing(mask, pred.rows());
  double sum = 0.0;
  for (std::size_t r : missing) sum += (pred.row(r) - target.row(r)).squaredNorm();
  return sum / static_cast<double>(missing.size());
}

double LossHrtf(const StackedHrirs& pred, const StackedHrirs& target) {
  RequireSameShape(pred, target, "LossHrtf");
  if (pred.cols() % 2 != 0) throw Error(ErrorCode::kShapeMismatch, "LossHrtf: odd width");
  const Eigen::Index k = pred.cols() / 2;
  double sum = 0.0;
  std::vector<double> diff(k);
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index ear = 0; ear < 2; ++ear) {
      for (Eigen::Index n = 0; n < k; ++n) diff[n] = pred(r, ear * k + n) - target(r, ear * k + n);
      for (const auto& bin : DftOrtho(diff)) sum += std::norm(bin);
    }
  }
  return sum;
}

CueLoss LossCues(const MatrixD& pred, const MatrixD& target, std::span<const std::uint8_t> mask) {
  RequireSameShape(pred, target, "LossCues");
  if (pred.cols() != 2) throw Error(ErrorCode::kShapeMismatch, "LossCues: expected 2 columns");
  const auto missing = RequireMissing(mask, pred.rows());
  CueLoss out;
  for (std::size_t r : missing) {
    out.itd += std::abs(pred(r, 0) - target(r, 0));
    out.ild += std::abs(pred(r, 1) - target(r, 1));
  }
  out.itd /= static_cast<double>(missing.size());
  out.ild /= static_cast<double>(missing.size());
  return out;
}

LossReport LossTotal(LossReport report, const LossWeights& weights) {
  report.total = report.rec + weights.hrtf * report.hrtf + weights.itd * report.itd +
                 weights.ild * report.ild;
  return report;
}

template <typename T>
Matrix<T> StandardizedCueTargets(const CueLabels& labels, const CueStats& stats) {
  if (labels.itd_us.size() != labels.ild_db.size()) {
    throw Error(ErrorCode::kShapeMismatch, "cue label columns differ in length");
  }
  Matrix<T> out(static_cast<Eigen::Index>(labels.size()), 2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out(i, 0) = static_cast<T>((labels.itd_us[i] - stats.itd_mean_us) / stats.itd_std_us);
    out(i, 1) = static_cast<T>((labels.ild_db[i] - stats.ild_mean_db) / stats.ild_std_db);
  }
  return out;
}

template <typename T>
nn::Var<T> LossRecVar(nn::Var<T> pred, nn::Var<T> target, std::span<const std::uint8_t> mask) {
  const auto missing = RequireMissing(mask, pred.rows());
  nn::Var<T> diff = nn::GatherRows<T>(nn::Sub(pred, target), missing);
  return nn::Scale(nn::SumSquares(diff), static_cast<T>(1.0 / missing.size()));
}

template <typename T>
nn::Var<T> LossHrtfVar(nn::Var<T> pred, nn::Var<T> target, const DftBasis<T>& basis) {
  const Eigen::Index k = basis.cos_part.rows();
  if (pred.cols() != 2 * k) throw Error(ErrorCode::kShapeMismatch, "LossHrtf: basis size != K");
  nn::Var<T> diff = nn::Sub(pred, target);
  nn::Var<T> total;
  for (Eigen::Index ear = 0; ear < 2; ++ear) {
    auto [re, im] = nn::DftRows(nn::SliceCols(diff, ear * k, k), basis);
    nn::Var<T> energy = nn::Add(nn::SumSquares(re), nn::SumSquares(im));
    total = total.valid() ? nn::Add(total, energy) : energy;
  }
  return total;
}

template <typename T>
std::pair<nn::Var<T>, nn::Var<T>> LossCuesVar(nn::Var<T> pred, nn::Var<T> target,
                                              std::span<const std::uint8_t> mask) {
  if (pred.cols() != 2) throw Error(ErrorCode::kShapeMismatch, "LossCues: expected 2 columns");
  const auto missing = RequireMissing(mask, pred.rows());
  nn::Var<T> diff = nn::GatherRows<T>(nn::Sub(pred, target), missing);
  const T inv_n = static_cast<T>(1.0 / missing.size());
  return {nn::Scale(nn::SumAbs(nn::SliceCols(diff, 0, 1)), inv_n),
          nn::Scale(nn::SumAbs(nn::SliceCols(diff, 1, 1)), inv_n)};
}

template <typename T>
LossReport LossGraph<T>::Report(const CueStats& stats) const {
  LossReport r;
  r.rec = rec.value()(0, 0);
  r.hrtf = hrtf.value()(0, 0);
  if (itd.valid()) {
    r.itd = itd.value()(0, 0);
    r.ild = ild.value()(0, 0);
    r.itd_mae_us = r.itd * stats.itd_std_us;
    r.ild_mae_db = r.ild * stats.ild_std_db;
  }
  r.total = total.value()(0, 0);
  return r;
}

template <typename T>
LossGraph<T> BuildLoss(const ForwardGraph<T>& graph, const SubjectField& field,
                       const CueLabels& labels, const CueStats& stats,
                       const LossWeights& weights, const DftBasis<T>& basis) {
  nn::Tape<T>& tape = graph.output.tape();
  nn::Var<T> target = tape.Constant(StackAllRows(field).template cast<T>());
  LossGraph<T> loss;
  loss.rec = LossRecVar(graph.output, target, field.mask());
  loss.hrtf = LossHrtfVar(graph.output, target, basis);
  loss.total = nn::Add(loss.rec, nn::Scale(loss.hrtf, static_cast<T>(weights.hrtf)));
  if (graph.cues.valid()) {
    if (labels.size() != field.size()) {
      throw Error(ErrorCode::kShapeMismatch, "cue labels do not match field rows");
    }
    nn::Var<T> cue_target = tape.Constant(StandardizedCueTargets<T>(labels, stats));
    std::tie(loss.itd, loss.ild) = LossCuesVar(graph.cues, cue_target, field.mask());
    loss.total = nn::Add(loss.total, nn::Scale(loss.itd, static_cast<T>(weights.itd)));
    loss.total = nn::Add(loss.total, nn::Scale(loss.ild, static_cast<T>(weights.ild)));
  }
  return loss;
}

#define BIFORMER3D_INSTANTIATE_LOSSES(T)                                                    \
  template Matrix<T> StandardizedCueTargets<T>(const CueLabels&, const CueStats&);         \
  template nn::Var<T> LossRecVar(nn::Var<T>, nn::Var<T>, std::span<const std::uint8_t>);   \
  template nn::Var<T> LossHrtfVar(nn::Var<T>, nn::Var<T>, const DftBasis<T>&);             \
  template std::pair<nn::Var<T>, nn::Var<T>> LossCuesVar(nn::Var<T>, nn::Var<T>,           \
                                                         std::span<const std::uint8_t>);   \
  template struct LossGraph<T>;                                                             \
  template LossGraph<T> BuildLoss(const ForwardGraph<T>&, const SubjectField&,              \
                                  const CueLabels&, const CueStats&, const LossWeights&,    \
                                  const DftBasis<T>&);

BIFORMER3D_INSTANTIATE_LOSSES(float)
BIFORMER3D_INSTANTIATE_LOSSES(double)

#undef BIFORMER3D_INSTANTIATE_LOSSES

}  // namespace biformer3d
