#pragma once

#include <stdexcept>
#include <string>

namespace prftps {

enum class ErrorCode {
  invalid_argument,
  insufficient_data,
  not_strongly_connected,
  degenerate,
  divide_by_zero,
  zero_denominator,
  protocol_error,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; `code()` lets callers branch on the
// failure class (e.g. retry on `degenerate`).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace prftps
