// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ajfuse Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ajfuse {

enum class ErrorCode {
  InvalidArgument,
  InvalidScheduleParams,
  StepOutOfRange,
  ShapeMismatch,
  NonFiniteScore,
  NonFiniteState,
  NoLinesFound,
  EmptyCorpus,
  DegenerateInput,
  RoiOutOfBounds,
  TimestampMismatch,
  WindowTooLarge,
  EmptyList,
  SpecInfeasible,
  IoError,
  ConfigError,
  CheckFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as this exception; `code()` is the
/// machine-readable kind, `what()` carries the human-readable context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ajfuse
