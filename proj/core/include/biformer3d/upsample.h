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

#ifndef BIFORMER3D_UPSAMPLE_H_
#define BIFORMER3D_UPSAMPLE_H_

#include <span>

#include "biformer3d/biformer.h"
#include "biformer3d/hrir.h"

namespace biformer3d {

// Measured rows of `measured` (mask == 1) followed by one predicted row per
// distinct target that is not already measured. The result's mask marks the
// measured rows.
SubjectField Upsample(const BiFormer3D<float>& model, const SubjectField& measured,
                      std::span<const Direction> targets);

}  // namespace biformer3d

#endif  // BIFORMER3D_UPSAMPLE_H_
