#include "pdfevent/error.hpp"

namespace pdfevent {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::DuplicateChannel: return "DuplicateChannel";
    case ErrorCode::InvalidStepSize: return "InvalidStepSize";
    case ErrorCode::EventOutOfRange: return "EventOutOfRange";
    case ErrorCode::InvalidEvents: return "InvalidEvents";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ZeroKernel: return "ZeroKernel";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::EmptyTruth: return "EmptyTruth";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteParameters: return "NonFiniteParameters";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidFactor: return "InvalidFactor";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooFewSeries: return "TooFewSeries";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
  }
  return "Unknown";
}

}  // namespace pdfevent
