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

#ifndef BIFORMER3D_NN_CHECKPOINT_H_
#define BIFORMER3D_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "biformer3d/nn/adamw.h"
#include "biformer3d/nn/parameters.h"

namespace biformer3d::nn {

// "BF3DCKPT1\n", a one-line JSON manifest
//   {"parameters":[{"name":..,"shape":[r,c]},...],"optimizer":{...},
//    "step":n,"metadata":{...}}
// then '\n' and every parameter as little-endian float32, manifest order.
inline constexpr const char* kCheckpointMagic = "BF3DCKPT1";

struct Checkpoint {
  ParameterSet<float> params;
  AdamWOptions optimizer;
  std::int64_t step = 0;
  // JSON object text (model configuration, target statistics, ...).
  std::string metadata_json = "{}";
};

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws kData on a malformed file.
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace biformer3d::nn

#endif  // BIFORMER3D_NN_CHECKPOINT_H_
