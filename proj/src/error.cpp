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

#include "neurotask/error.hpp"

namespace neurotask {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kMismatchedSamples: return "MismatchedSamples";
    case ErrorKind::kNonFiniteValues: return "NonFiniteValues";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kMissingFile: return "MissingFile";
    case ErrorKind::kSchemaViolation: return "SchemaViolation";
    case ErrorKind::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorKind::kUnsupportedRank: return "UnsupportedRank";
    case ErrorKind::kCorruptHeader: return "CorruptHeader";
    case ErrorKind::kIoError: return "IoError";
    case ErrorKind::kInvalidK: return "InvalidK";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kTooFewSamples: return "TooFewSamples";
    case ErrorKind::kOutOfRangeP: return "OutOfRangeP";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kMissingScores: return "MissingScores";
    case ErrorKind::kFilterEmpty: return "FilterEmpty";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kZeroVector: return "ZeroVector";
    case ErrorKind::kZeroVariance: return "ZeroVariance";
    case ErrorKind::kDegenerateGroups: return "DegenerateGroups";
    case ErrorKind::kZeroWithinVariance: return "ZeroWithinVariance";
    case ErrorKind::kMissingUpstream: return "MissingUpstream";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kSingularSystem:
    case ErrorKind::kZeroVector:
    case ErrorKind::kZeroVariance:
    case ErrorKind::kDegenerateGroups:
    case ErrorKind::kZeroWithinVariance:
      return 2;
    case ErrorKind::kMissingUpstream:
      return 3;
    default:
      return 1;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace neurotask
