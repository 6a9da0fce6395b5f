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

#include "biformer3d/baseline.h"

#include "biformer3d/error.h"

namespace biformer3d {

StackedHrirs NearestNeighborBaseline(const SubjectField& field) {
  const std::vector<std::size_t> measured = MeasuredIndices(field.mask());
  if (measured.empty()) throw Error(ErrorCode::kInvalidField, "no measured directions");
  StackedHrirs out = StackField(field);
  for (std::size_t row : MissingIndices(field.mask())) {
    std::size_t best = measured.front();
    double best_distance = GreatCircleDeg(field.directions()[row], field.directions()[best]);
    for (std::size_t i = 1; i < measured.size(); ++i) {
      const double d = GreatCircleDeg(field.directions()[row], field.directions()[measured[i]]);
      if (d < best_distance) {
        best_distance = d;
        best = measured[i];
      }
    }
    out.row(row) = out.row(best);
  }
  return out;
}

}  // namespace biformer3d
