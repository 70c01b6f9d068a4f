#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eulab {

/// Machine-readable failure categories. The CLI maps `validation` to exit
/// code 2 and everything else to 3.
enum class ErrorCode {
  chart_domain,
  near_link,
  evaluation,
  numeric,
  stiffness,
  section,
  amplitude,
  validation,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eulab
