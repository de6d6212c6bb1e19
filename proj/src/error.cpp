#include "rssidoa/error.hpp"

namespace rssidoa {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyCalibration: return "EmptyCalibration";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::SensorOutOfRange: return "SensorOutOfRange";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::SingularInformation: return "SingularInformation";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::NoPulsesCaptured: return "NoPulsesCaptured";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rssidoa
