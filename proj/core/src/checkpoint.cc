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

#include "biformer3d/nn/checkpoint.h"

#include <bit>
#include <fstream>

#include "biformer3d/bundle.h"
#include "json.hpp"

namespace biformer3d::nn {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kData, path.string() + ": " + what);
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  json manifest;
  json params = json::array();
  for (std::size_t i = 0; i < checkpoint.params.size(); ++i) {
    params.push_back({{"name", checkpoint.params.name(i)},
                      {"shape", {checkpoint.params[i].rows(), checkpoint.params[i].cols()}}});
  }
  manifest["parameters"] = std::move(params);
  manifest["optimizer"] = {{"lr", checkpoint.optimizer.lr},
                           {"beta1", checkpoint.optimizer.beta1},
                           {"beta2", checkpoint.optimizer.beta2},
                           {"eps", checkpoint.optimizer.eps},
                           {"weight_decay", checkpoint.optimizer.weight_decay}};
  manifest["step"] = checkpoint.step;
  manifest["metadata"] = json::parse(checkpoint.metadata_json);

  std::string blob = std::string(kCheckpointMagic) + "\n" + manifest.dump() + "\n";
  for (std::size_t i = 0; i < checkpoint.params.size(); ++i) {
    const Tensor<float>& t = checkpoint.params[i];
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(t.data()[k]);
      for (int b = 0; b < 4; ++b) blob.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
  }
  WriteFileAtomic(path, blob);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(path, "cannot open");
  std::string magic, manifest_line;
  if (!std::getline(in, magic) || magic != kCheckpointMagic) Fail(path, "bad magic");
  if (!std::getline(in, manifest_line)) Fail(path, "missing manifest");

  Checkpoint ckpt;
  try {
    const json manifest = json::parse(manifest_line);
    const json& opt = manifest.at("optimizer");
    ckpt.optimizer.lr = opt.at("lr").get<double>();
    ckpt.optimizer.beta1 = opt.at("beta1").get<double>();
    ckpt.optimizer.beta2 = opt.at("beta2").get<double>();
    ckpt.optimizer.eps = opt.at("eps").get<double>();
    ckpt.optimizer.weight_decay = opt.at("weight_decay").get<double>();
    ckpt.step = manifest.at("step").get<std::int64_t>();
    ckpt.metadata_json = manifest.at("metadata").dump();
    for (const json& p : manifest.at("parameters")) {
      const auto shape = p.at("shape").get<std::vector<Eigen::Index>>();
      if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0) Fail(path, "bad shape");
      Tensor<float> t(shape[0], shape[1]);
      std::vector<unsigned char> raw(static_cast<std::size_t>(t.size()) * 4);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
      if (static_cast<std::size_t>(in.gcount()) != raw.size()) Fail(path, "short payload");
      for (Eigen::Index k = 0; k < t.size(); ++k) {
        const unsigned char* b = raw.data() + 4 * k;
        const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) |
                                   (static_cast<std::uint32_t>(b[3]) << 24);
        t.data()[k] = std::bit_cast<float>(bits);
      }
      ckpt.params.Add(p.at("name").get<std::string>(), std::move(t));
    }
  } catch (const json::exception& e) {
    Fail(path, std::string("malformed manifest: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) Fail(path, "trailing bytes after payload");
  return ckpt;
}

}  // namespace biformer3d::nn
