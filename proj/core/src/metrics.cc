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

#include "biformer3d/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "biformer3d/error.h"

namespace biformer3d {
namespace {

std::vector<std::size_t> EvaluatedRows(const StackedHrirs& pred, const StackedHrirs& target,
                                       std::span<const std::uint8_t> mask) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and reference shapes differ");
  }
  if (static_cast<Eigen::Index>(mask.size()) != pred.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "mask length does not match rows");
  }
  std::vector<std::size_t> rows = MissingIndices(mask);
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no missing rows to evaluate");
  return rows;
}

}  // namespace

double NmseDb(const StackedHrirs& pred, const StackedHrirs& target,
              std::span<const std::uint8_t> mask) {
  const auto rows = EvaluatedRows(pred, target, mask);
  double sum = 0.0;
  for (std::size_t r : rows) {
    const double energy = target.row(r).squaredNorm();
    if (energy == 0.0) {
      throw Error(ErrorCode::kInvalidField, "zero-energy reference row " + std::to_string(r));
    }
    sum += (pred.row(r) - target.row(r)).squaredNorm() / energy;
  }
  const double mean = sum / static_cast<double>(rows.size());
  if (mean == 0.0) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(mean));
}

double CosineDistance(const StackedHrirs& pred, const StackedHrirs& target,
                      std::span<const std::uint8_t> mask) {
  const auto rows = EvaluatedRows(pred, target, mask);
  double sum = 0.0;
  for (std::size_t r : rows) {
    const double np = pred.row(r).norm();
    const double nt = target.row(r).norm();
    if (np == 0.0 || nt == 0.0) {
      throw Error(ErrorCode::kInvalidField, "zero-norm row " + std::to_string(r));
    }
    const double cosine = std::clamp(pred.row(r).dot(target.row(r)) / (np * nt), -1.0, 1.0);
    sum += 1.0 - cosine;
  }
  return sum / static_cast<double>(rows.size());
}

CueErrors CueErrorsOf(const StackedHrirs& pred, const StackedHrirs& target,
                      std::span<const std::uint8_t> mask, int sample_rate_hz,
                      const CueLabels* target_cues) {
  const auto rows = EvaluatedRows(pred, target, mask);
  if (target_cues != nullptr && target_cues->size() != mask.size()) {
    throw Error(ErrorCode::kShapeMismatch, "reference cues do not match rows");
  }
  CueErrors out;
  for (std::size_t r : rows) {
    const BinauralHrir p = SplitRow(pred, r, sample_rate_hz);
    double itd_ref, ild_ref;
    if (target_cues != nullptr) {
      itd_ref = target_cues->itd_us[r];
      ild_ref = target_cues->ild_db[r];
    } else {
      const BinauralHrir t = SplitRow(target, r, sample_rate_hz);
      itd_ref = EstimateItdUs(t);
      ild_ref = EstimateIldDb(t);
    }
    out.itd_us += std::abs(EstimateItdUs(p) - itd_ref);
    out.ild_db += std::abs(EstimateIldDb(p) - ild_ref);
  }
  out.itd_us /= static_cast<double>(rows.size());
  out.ild_db /= static_cast<double>(rows.size());
  return out;
}

MetricSet ComputeMetrics(const StackedHrirs& pred, const StackedHrirs& target,
                         std::span<const std::uint8_t> mask, int sample_rate_hz,
                         const CueLabels* target_cues) {
  MetricSet m;
  m.nmse_db = NmseDb(pred, target, mask);
  m.cd = CosineDistance(pred, target, mask);
  const CueErrors cues = CueErrorsOf(pred, target, mask, sample_rate_hz, target_cues);
  m.itd_e_us = cues.itd_us;
  m.ild_e_db = cues.ild_db;
  return m;
}

MetricSet MeanMetrics(std::span<const MetricSet> sets) {
  MetricSet mean;
  if (sets.empty()) return mean;
  for (const MetricSet& s : sets) {
    mean.nmse_db += s.nmse_db;
    mean.cd += s.cd;
    mean.itd_e_us += s.itd_e_us;
    mean.ild_e_db += s.ild_e_db;
  }
  const double n = static_cast<double>(sets.size());
  mean.nmse_db /= n;
  mean.cd /= n;
  mean.itd_e_us /= n;
  mean.ild_e_db /= n;
  return mean;
}

}  // namespace biformer3d
