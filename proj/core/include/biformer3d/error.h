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

#ifndef BIFORMER3D_ERROR_H_
#define BIFORMER3D_ERROR_H_

#include <stdexcept>
#include <string>

namespace biformer3d {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kInvalidField,
  kUndefinedCue,
  kGeneration,
  kConfig,
  kData,
  kNumeric,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported as this exception; the code lets the CLI
// map failures onto its exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace biformer3d

#endif  // BIFORMER3D_ERROR_H_
