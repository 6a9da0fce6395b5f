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

#ifndef BIFORMER3D_EVALUATE_H_
#define BIFORMER3D_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "biformer3d/biformer.h"
#include "biformer3d/corpus_io.h"
#include "biformer3d/metrics.h"

namespace biformer3d {

// subject_id of the per-M aggregate rows.
inline constexpr const char* kAggregateId = "ALL";

// The fixed evaluation mask for (M, seed): farthest-point selection.
std::vector<std::uint8_t> ValidationMask(const SubjectField& field, std::size_t m,
                                         std::uint64_t seed);

// `truth` restricted to `mask`: unmeasured rows are zeroed so a predictor
// cannot see them.
SubjectField MaskedInput(const SubjectField& truth, std::vector<std::uint8_t> mask);

// Maps a masked field to a full L x 2K estimate.
using Predictor = std::function<StackedHrirs(const SubjectField& input)>;

struct EvalRow {
  std::string subject_id;
  std::size_t m = 0;
  MetricSet metrics;
};

// One row per (subject, M), then one aggregate row per M (mean over
// subjects). Subjects are spread over `threads` workers; the result does not
// depend on the thread count.
std::vector<EvalRow> EvaluatePredictor(const Predictor& predictor,
                                       const std::vector<Subject>& subjects,
                                       std::span<const std::size_t> ms, std::uint64_t seed,
                                       std::size_t threads = 1);

std::vector<EvalRow> EvaluateModel(const BiFormer3D<float>& model,
                                   const std::vector<Subject>& subjects,
                                   std::span<const std::size_t> ms, std::uint64_t seed,
                                   std::size_t threads = 1);

std::vector<EvalRow> EvaluateBaseline(const std::vector<Subject>& subjects,
                                      std::span<const std::size_t> ms, std::uint64_t seed,
                                      std::size_t threads = 1);

// The aggregate row for M; throws kInvalidArgument if absent.
MetricSet AggregateFor(const std::vector<EvalRow>& rows, std::size_t m);

// Columns subject_id,M,nmse_db,cd,itd_e_us,ild_e_db at full precision.
std::string MetricsCsv(const std::vector<EvalRow>& rows);

}  // namespace biformer3d

#endif  // BIFORMER3D_EVALUATE_H_
