#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdfevent {

enum class ErrorCode {
  LengthMismatch,
  NonFiniteValue,
  EmptySeries,
  DuplicateChannel,
  InvalidStepSize,
  EventOutOfRange,
  InvalidEvents,
  NonFiniteInput,
  InvalidSpec,
  ZeroKernel,
  InvalidRange,
  InvalidProbability,
  EmptyTruth,
  ShapeMismatch,
  NonFiniteParameters,
  NonFiniteGradient,
  DivergedLoss,
  InvalidConfig,
  InvalidFactor,
  ParseError,
  IoError,
  TooFewSeries,
  EmptyGrid,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as this exception; the code lets
// callers (notably the CLI) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based position of the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace pdfevent
