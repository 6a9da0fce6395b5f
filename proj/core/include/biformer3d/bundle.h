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

#ifndef BIFORMER3D_BUNDLE_H_
#define BIFORMER3D_BUNDLE_H_

#include <filesystem>

#include "biformer3d/hrir.h"

namespace biformer3d {

// HRIR bundle (".hrirb"): one line of JSON
//   {"magic":"HRIRB1","subject_id":...,"sample_rate_hz":...,"K":...,"L":...,
//    "directions":[[az,el,r],...],"mask":[0|1,...]}
// terminated by '\n', then L x 2K little-endian float32 samples, row-major,
// each row left || right. "mask" is optional and defaults to all ones.
//
// A SOFA importer maps Data.IR (M x 2 x N) to rows, SourcePosition
// (az, el, r in degrees/meters) to "directions", Data.SamplingRate to
// "sample_rate_hz", and must convert the corpus azimuth convention to
// counterclockwise-from-front before writing.
inline constexpr const char* kBundleMagic = "HRIRB1";

// Writes to a temporary file and renames it into place.
void WriteBundle(const std::filesystem::path& path, const SubjectField& field);

// Throws kData on any malformed header or short payload.
SubjectField ReadBundle(const std::filesystem::path& path);

// Atomic text write shared by the report writers.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace biformer3d

#endif  // BIFORMER3D_BUNDLE_H_
