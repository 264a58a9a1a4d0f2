// Copyright 2026 The neurotask Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neurotask {

enum class ErrorKind {
  // validation
  kMismatchedSamples,
  kNonFiniteValues,
  kEmptyMatrix,
  kParseError,
  kMissingFile,
  kSchemaViolation,
  kUnsupportedDtype,
  kUnsupportedRank,
  kCorruptHeader,
  kIoError,
  kInvalidK,
  kShapeMismatch,
  kTooFewSamples,
  kOutOfRangeP,
  kLengthMismatch,
  kEmptyInput,
  kMissingScores,
  kFilterEmpty,
  kInvalidArgument,
  // numeric
  kSingularSystem,
  kZeroVector,
  kZeroVariance,
  kDegenerateGroups,
  kZeroWithinVariance,
  // pipeline
  kMissingUpstream,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code for a failure of this kind: 1 validation, 2 numeric,
/// 3 missing upstream.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace neurotask
