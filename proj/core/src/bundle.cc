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

#include "biformer3d/bundle.h"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "biformer3d/error.h"
#include "json.hpp"

namespace biformer3d {
namespace {

using nlohmann::json;

void PutFloatLE(std::string& out, float value) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(value);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

float GetFloatLE(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

[[noreturn]] void DataError(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kData, path.string() + ": " + what);
}

}  // namespace

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kData, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kData, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WriteBundle(const std::filesystem::path& path, const SubjectField& field) {
  const std::size_t k = field.hrir_length();
  json header;
  header["magic"] = kBundleMagic;
  header["subject_id"] = field.subject_id();
  header["sample_rate_hz"] = field.sample_rate_hz();
  header["K"] = k;
  header["L"] = field.size();
  json dirs = json::array();
  for (const Direction& d : field.directions()) {
    dirs.push_back({d.azimuth_deg(), d.elevation_deg(), d.radius_m()});
  }
  header["directions"] = std::move(dirs);
  header["mask"] = field.mask();

  std::string blob = header.dump();
  blob.push_back('\n');
  blob.reserve(blob.size() + field.size() * 2 * k * 4);
  for (const BinauralHrir& h : field.hrirs()) {
    for (double x : h.left) PutFloatLE(blob, static_cast<float>(x));
    for (double x : h.right) PutFloatLE(blob, static_cast<float>(x));
  }
  WriteFileAtomic(path, blob);
}

SubjectField ReadBundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) DataError(path, "missing header line");

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    DataError(path, std::string("header is not JSON: ") + e.what());
  }
  try {
    if (header.at("magic").get<std::string>() != kBundleMagic) {
      DataError(path, "bad magic");
    }
    const std::string subject_id = header.at("subject_id").get<std::string>();
    const int fs = header.at("sample_rate_hz").get<int>();
    const std::size_t k = header.at("K").get<std::size_t>();
    const std::size_t l = header.at("L").get<std::size_t>();
    const json& dirs = header.at("directions");
    if (!dirs.is_array() || dirs.size() != l) DataError(path, "directions length != L");
    if (k == 0 || l == 0) DataError(path, "empty bundle");

    std::vector<Direction> directions;
    directions.reserve(l);
    for (const json& d : dirs) {
      if (!d.is_array() || d.size() != 3) DataError(path, "direction must be [az,el,r]");
      directions.emplace_back(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
    }
    std::vector<std::uint8_t> mask(l, 1);
    if (header.contains("mask")) {
      mask = header.at("mask").get<std::vector<std::uint8_t>>();
      if (mask.size() != l) DataError(path, "mask length != L");
    }

    const std::size_t payload_bytes = l * 2 * k * 4;
    std::string payload(payload_bytes, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload_bytes));
    if (static_cast<std::size_t>(in.gcount()) != payload_bytes) DataError(path, "short payload");
    if (in.peek() != std::char_traits<char>::eof()) DataError(path, "trailing bytes after payload");

    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    std::vector<BinauralHrir> hrirs(l);
    for (std::size_t row = 0; row < l; ++row) {
      BinauralHrir& h = hrirs[row];
      h.sample_rate_hz = fs;
      h.left.resize(k);
      h.right.resize(k);
      for (std::size_t n = 0; n < k; ++n, p += 4) h.left[n] = GetFloatLE(p);
      for (std::size_t n = 0; n < k; ++n, p += 4) h.right[n] = GetFloatLE(p);
    }
    return SubjectField(subject_id, std::move(directions), std::move(hrirs), std::move(mask));
  } catch (const json::exception& e) {
    DataError(path, std::string("malformed header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kData) throw;
    DataError(path, e.what());
  }
}

}  // namespace biformer3d
