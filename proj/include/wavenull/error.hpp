#pragma once

#include <stdexcept>
#include <string>

namespace wavenull {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  parse,
  invalid_coefficient,
  inadmissible_coefficient,
  time_horizon,
  weight_overflow,
  domain,
  constraint_violation,
  not_spd,
  no_convergence,
  cfl,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wavenull
