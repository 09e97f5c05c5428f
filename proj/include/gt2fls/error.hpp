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

#ifndef GT2FLS_ERROR_HPP_
#define GT2FLS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gt2fls {

enum class ErrorCode {
  kInvalidInput,
  kDomain,
  kDegenerateFiring,
  kInvalidConfig,
  kEmptySet,
  kDegenerateRange,
  kFlatCurve,
  kDivergence,
  kPrecondition,
  kIo,
  kSchema,
  kParse,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gt2fls

#endif  // GT2FLS_ERROR_HPP_
