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

#ifndef BIFORMER3D_SRC_CONFIG_JSON_H_
#define BIFORMER3D_SRC_CONFIG_JSON_H_

#include "biformer3d/model_config.h"
#include "biformer3d/error.h"
#include "json.hpp"

namespace biformer3d::internal {

nlohmann::json ModelConfigJson(const ModelConfig& config);

// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig ParseModelConfig(const nlohmann::json& j);

// Reads `key` into `out` if present, throwing kConfig on a type mismatch.
template <typename V>
void ReadOptional(const nlohmann::json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config key '") + key + "': " + e.what());
  }
}

void RejectUnknownKeys(const nlohmann::json& j, std::initializer_list<const char*> known,
                       const char* where);

}  // namespace biformer3d::internal

#endif  // BIFORMER3D_SRC_CONFIG_JSON_H_
