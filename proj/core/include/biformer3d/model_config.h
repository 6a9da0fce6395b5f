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

#ifndef BIFORMER3D_MODEL_CONFIG_H_
#define BIFORMER3D_MODEL_CONFIG_H_

#include <cstddef>
#include <string>

#include "biformer3d/encoding.h"

namespace biformer3d {

enum class TokenMode {
  // o = [e, p], each half D/2 wide.
  kConcat,
  // o = e + p, both D wide.
  kAdd,
};

struct ModelConfig {
  std::size_t hrir_length = 64;  // K, samples per ear
  std::size_t width = 128;       // D
  std::size_t layers = 4;        // T
  std::size_t heads = 4;
  std::size_t ff_width = 256;
  int bands = 6;                 // P
  std::size_t conv_kernel = 3;
  std::size_t refine_layers = 1;
  std::size_t decoder_hidden = 256;
  std::size_t head_hidden = 64;
  TokenMode token_mode = TokenMode::kConcat;
  bool use_sinusoidal = true;
  bool use_cue_heads = true;
  bool use_refine = true;
  // LayerNorm on the encoder output (pre-norm stacks leave the residual
  // stream unnormalized otherwise).
  bool final_norm = true;

  // Throws kConfig on an inconsistent configuration.
  void Validate() const;

  std::size_t signal_width() const;
  EncodingConfig encoding() const;
};

std::string ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const std::string& text);

const char* TokenModeName(TokenMode mode);

}  // namespace biformer3d

#endif  // BIFORMER3D_MODEL_CONFIG_H_
