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

#include "biformer3d/model_config.h"

#include <algorithm>
#include <string>

#include "biformer3d/error.h"
#include "config_json.h"

namespace biformer3d {
namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

}  // namespace

void ModelConfig::Validate() const {
  Require(hrir_length > 0, "K must be positive");
  Require(width > 0 && width % 2 == 0, "D must be positive and even");
  Require(heads > 0 && width % heads == 0, "D must be divisible by the head count");
  Require(layers > 0, "need at least one transformer layer");
  Require(ff_width > 0 && decoder_hidden > 0 && head_hidden > 0, "widths must be positive");
  Require(bands >= 1, "P must be at least 1");
  Require(conv_kernel % 2 == 1, "conv_kernel must be odd");
  Require(refine_layers >= 1, "refine_layers must be at least 1");
}

std::size_t ModelConfig::signal_width() const {
  return token_mode == TokenMode::kConcat ? width / 2 : width;
}

EncodingConfig ModelConfig::encoding() const {
  return EncodingConfig{bands, true, use_sinusoidal};
}

const char* TokenModeName(TokenMode mode) {
  return mode == TokenMode::kConcat ? "concat" : "add";
}

namespace internal {

void RejectUnknownKeys(const nlohmann::json& j, std::initializer_list<const char*> known,
                       const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return item.key() == k; });
    if (!ok) {
      throw Error(ErrorCode::kConfig,
                  "unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

nlohmann::json ModelConfigJson(const ModelConfig& c) {
  return {{"K", c.hrir_length},
          {"D", c.width},
          {"T", c.layers},
          {"n_heads", c.heads},
          {"d_ff", c.ff_width},
          {"P", c.bands},
          {"conv_kernel", c.conv_kernel},
          {"refine_layers", c.refine_layers},
          {"decoder_hidden", c.decoder_hidden},
          {"head_hidden", c.head_hidden},
          {"token_mode", TokenModeName(c.token_mode)},
          {"use_sinusoidal", c.use_sinusoidal},
          {"use_cue_heads", c.use_cue_heads},
          {"use_refine", c.use_refine},
          {"final_norm", c.final_norm}};
}

ModelConfig ParseModelConfig(const nlohmann::json& j) {
  RejectUnknownKeys(j,
                    {"K", "D", "T", "n_heads", "d_ff", "P", "conv_kernel", "refine_layers",
                     "decoder_hidden", "head_hidden", "token_mode", "use_sinusoidal",
                     "use_cue_heads", "use_refine", "final_norm"},
                    "model");
  ModelConfig c;
  ReadOptional(j, "K", c.hrir_length);
  ReadOptional(j, "D", c.width);
  ReadOptional(j, "T", c.layers);
  ReadOptional(j, "n_heads", c.heads);
  ReadOptional(j, "d_ff", c.ff_width);
  ReadOptional(j, "P", c.bands);
  ReadOptional(j, "conv_kernel", c.conv_kernel);
  ReadOptional(j, "refine_layers", c.refine_layers);
  ReadOptional(j, "decoder_hidden", c.decoder_hidden);
  ReadOptional(j, "head_hidden", c.head_hidden);
  std::string mode = TokenModeName(c.token_mode);
  ReadOptional(j, "token_mode", mode);
  if (mode == "concat") {
    c.token_mode = TokenMode::kConcat;
  } else if (mode == "add") {
    c.token_mode = TokenMode::kAdd;
  } else {
    throw Error(ErrorCode::kConfig, "token_mode must be 'concat' or 'add'");
  }
  ReadOptional(j, "use_sinusoidal", c.use_sinusoidal);
  ReadOptional(j, "use_cue_heads", c.use_cue_heads);
  ReadOptional(j, "use_refine", c.use_refine);
  ReadOptional(j, "final_norm", c.final_norm);
  c.Validate();
  return c;
}

}  // namespace internal

std::string ModelConfigToJson(const ModelConfig& config) {
  return internal::ModelConfigJson(config).dump();
}

ModelConfig ModelConfigFromJson(const std::string& text) {
  try {
    return internal::ParseModelConfig(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("model config is not JSON: ") + e.what());
  }
}

}  // namespace biformer3d
