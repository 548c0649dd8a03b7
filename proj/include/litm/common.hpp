#pragma once

#include <stdexcept>
#include <string>

namespace litm {

// Error classes. These map 1:1 onto litm_status values in the C API and onto
// CLI exit codes.
enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  io = 3,
  format_version = 4,
  truncated = 5,
  inconsistent = 6,
  config = 7,
  non_finite = 8,
  sampling = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace litm
