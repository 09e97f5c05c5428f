// Copyright 2026 The gt2fls Authors
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

#include "gt2fls/error.hpp"

namespace gt2fls {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kDegenerateFiring: return "degenerate-firing";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kEmptySet: return "empty-set";
    case ErrorCode::kDegenerateRange: return "degenerate-range";
    case ErrorCode::kFlatCurve: return "flat-curve";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace gt2fls
