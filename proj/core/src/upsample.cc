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

#include "biformer3d/upsample.h"

#include <algorithm>

#include "biformer3d/error.h"

namespace biformer3d {

SubjectField Upsample(const BiFormer3D<float>& model, const SubjectField& measured,
                      std::span<const Direction> targets) {
  std::vector<Direction> directions;
  std::vector<BinauralHrir> hrirs;
  for (std::size_t i : MeasuredIndices(measured.mask())) {
    directions.push_back(measured.directions()[i]);
    hrirs.push_back(measured.hrirs()[i]);
  }
  if (directions.empty()) throw Error(ErrorCode::kInvalidField, "bundle has no measured rows");
  const std::size_t n_measured = directions.size();
  const BinauralHrir silent{std::vector<double>(measured.hrir_length(), 0.0),
                            std::vector<double>(measured.hrir_length(), 0.0),
                            measured.sample_rate_hz()};
  for (const Direction& d : targets) {
    if (std::find(directions.begin(), directions.end(), d) != directions.end()) continue;
    directions.push_back(d);
    hrirs.push_back(silent);
  }
  std::vector<std::uint8_t> mask(directions.size(), 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n_measured), 1);
  SubjectField combined(measured.subject_id(), std::move(directions), std::move(hrirs),
                        std::move(mask));
  if (combined.missing_count() == 0) return combined;
  const StackedHrirs predicted = model.Forward(combined).hrirs;
  std::vector<BinauralHrir> out = combined.hrirs();
  for (std::size_t i = n_measured; i < out.size(); ++i) {
    out[i] = SplitRow(predicted, i, combined.sample_rate_hz());
  }
  return combined.WithHrirs(std::move(out));
}

}  // namespace biformer3d
