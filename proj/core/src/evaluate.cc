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

#include "biformer3d/evaluate.h"

#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "biformer3d/baseline.h"
#include "biformer3d/error.h"
#include "biformer3d/sparsity.h"

namespace biformer3d {

std::vector<std::uint8_t> ValidationMask(const SubjectField& field, std::size_t m,
                                         std::uint64_t seed) {
  return SampleSparsity(field, m, SparsityOptions{SparsityStrategy::kFarthestPoint, {}, seed});
}

SubjectField MaskedInput(const SubjectField& truth, std::vector<std::uint8_t> mask) {
  std::vector<BinauralHrir> hrirs = truth.hrirs();
  for (std::size_t i = 0; i < hrirs.size(); ++i) {
    if (i < mask.size() && mask[i] == 0) {
      std::fill(hrirs[i].left.begin(), hrirs[i].left.end(), 0.0);
      std::fill(hrirs[i].right.begin(), hrirs[i].right.end(), 0.0);
    }
  }
  return truth.WithHrirs(std::move(hrirs)).WithMask(std::move(mask));
}

std::vector<EvalRow> EvaluatePredictor(const Predictor& predictor,
                                       const std::vector<Subject>& subjects,
                                       std::span<const std::size_t> ms, std::uint64_t seed,
                                       std::size_t threads) {
  if (subjects.empty()) throw Error(ErrorCode::kInvalidArgument, "no subjects to evaluate");
  std::vector<std::vector<MetricSet>> per_subject(subjects.size());
  auto evaluate_one = [&](std::size_t i) {
    const Subject& s = subjects[i];
    const StackedHrirs truth = StackAllRows(s.field);
    for (std::size_t m : ms) {
      std::vector<std::uint8_t> mask = ValidationMask(s.field, m, seed);
      const StackedHrirs estimate = predictor(MaskedInput(s.field, mask));
      per_subject[i].push_back(
          ComputeMetrics(estimate, truth, mask, s.field.sample_rate_hz(), &s.labels));
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), subjects.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < subjects.size(); ++i) evaluate_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < subjects.size(); i = next++) evaluate_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<EvalRow> rows;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    for (std::size_t j = 0; j < ms.size(); ++j) {
      rows.push_back(EvalRow{subjects[i].field.subject_id(), ms[j], per_subject[i][j]});
    }
  }
  for (std::size_t j = 0; j < ms.size(); ++j) {
    std::vector<MetricSet> column;
    for (const auto& sets : per_subject) column.push_back(sets[j]);
    rows.push_back(EvalRow{kAggregateId, ms[j], MeanMetrics(column)});
  }
  return rows;
}

std::vector<EvalRow> EvaluateModel(const BiFormer3D<float>& model,
                                   const std::vector<Subject>& subjects,
                                   std::span<const std::size_t> ms, std::uint64_t seed,
                                   std::size_t threads) {
  return EvaluatePredictor(
      [&](const SubjectField& input) { return model.Forward(input).hrirs; }, subjects, ms, seed,
      threads);
}

std::vector<EvalRow> EvaluateBaseline(const std::vector<Subject>& subjects,
                                      std::span<const std::size_t> ms, std::uint64_t seed,
                                      std::size_t threads) {
  return EvaluatePredictor(NearestNeighborBaseline, subjects, ms, seed, threads);
}

MetricSet AggregateFor(const std::vector<EvalRow>& rows, std::size_t m) {
  for (const EvalRow& r : rows) {
    if (r.subject_id == kAggregateId && r.m == m) return r.metrics;
  }
  throw Error(ErrorCode::kInvalidArgument, "no aggregate row for M=" + std::to_string(m));
}

std::string MetricsCsv(const std::vector<EvalRow>& rows) {
  std::string out = "subject_id,M,nmse_db,cd,itd_e_us,ild_e_db\n";
  char buffer[256];
  for (const EvalRow& r : rows) {
    std::snprintf(buffer, sizeof(buffer), ",%zu,%.17g,%.17g,%.17g,%.17g\n", r.m,
                  r.metrics.nmse_db, r.metrics.cd, r.metrics.itd_e_us, r.metrics.ild_e_db);
    out += r.subject_id;
    out += buffer;
  }
  return out;
}

}  // namespace biformer3d
