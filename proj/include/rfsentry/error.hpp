// Copyright 2026 The RF Sentry Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfsentry {

enum class ErrorKind {
  kInvalidFrame,
  kInsufficientData,
  kDegenerateSpectrum,
  kDegenerateLeaf,
  kShape,
  kSchema,
  kParse,
  kFormat,
  kEmptyEvaluation,
  kInvalidArgument,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Exit code buckets used by the command line front end.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kData = 3,
  kIo = 4,
};

ExitCode exit_code_for(ErrorKind kind);

}  // namespace rfsentry
