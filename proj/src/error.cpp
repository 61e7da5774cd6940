// SPDX-License-Identifier: Apache-2.0
#include "evograph/error.hpp"

namespace evograph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::EdgeOutOfRange: return "EdgeOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::FeatureRowMismatch: return "FeatureRowMismatch";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::MaskWithoutLabels: return "MaskWithoutLabels";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InconsistentDimension: return "InconsistentDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NodeNotPresent: return "NodeNotPresent";
    case ErrorCode::UnsupportedComposite: return "UnsupportedComposite";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::NotClassification: return "NotClassification";
    case ErrorCode::LabelAccessDenied: return "LabelAccessDenied";
    case ErrorCode::LabelIsolationViolation: return "LabelIsolationViolation";
    case ErrorCode::ZeroActual: return "ZeroActual";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
  }
  return "Unknown";
}

}  // namespace evograph
