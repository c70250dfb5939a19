#include "dln/error.hpp"

namespace dln {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::DegenerateWidth: return "DegenerateWidth";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace dln
