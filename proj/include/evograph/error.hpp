// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evograph {

enum class ErrorCode {
  ConfigInvalid,
  EdgeOutOfRange,
  SelfLoop,
  DuplicateEdge,
  FeatureRowMismatch,
  NonFiniteFeature,
  MaskWithoutLabels,
  MissingFile,
  ParseError,
  InconsistentDimension,
  DimensionMismatch,
  ZeroDegree,
  Disconnected,
  NodeNotPresent,
  UnsupportedComposite,
  EmptyMask,
  MissingLabels,
  InsufficientHistory,
  DegenerateFit,
  NotClassification,
  LabelAccessDenied,
  LabelIsolationViolation,
  ZeroActual,
  TooFewSamples,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evograph
