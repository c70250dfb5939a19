#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dln {

enum class ErrorCode {
  NonFinite,
  NotOrthogonal,
  RankDeficient,
  NonPositive,
  DegenerateSpectrum,
  DegenerateWidth,
  DomainViolation,
  NoBracket,
  OutOfDomain,
  NoConvergence,
  Unsupported,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every numerical routine in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dln
