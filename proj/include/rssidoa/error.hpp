#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rssidoa {

enum class ErrorKind {
  EmptyCalibration,
  MissingCell,
  AllZero,
  SensorOutOfRange,
  InvalidK,
  DomainError,
  DimensionMismatch,
  DegenerateInput,
  TooFewPoints,
  SingularInformation,
  BadSpec,
  BadConfig,
  NoPulsesCaptured,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind so
/// callers (and tests) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rssidoa
