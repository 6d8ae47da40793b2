#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geosep {

enum class ErrorCode {
  ParseError,
  TooFewRows,
  DimensionError,
  EmptyClassSet,
  EmptyComplement,
  DegenerateTriple,
  OrderingError,
  IndexError,
  EmptyInput,
  DegenerateFit,
  RangeError,
  MissingSignal,
  ShapeError,
  ReductionTooAggressive,
  ParameterError,
  ConfigError,
  IoError,
  NumericError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Broad failure class; the CLI maps these onto its exit codes.
enum class ErrorCategory { Config, Data, Numeric };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace geosep
