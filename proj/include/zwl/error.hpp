#pragma once

#include <stdexcept>
#include <string>

namespace zwl {

// Numeric values are shared with the C API status codes in zwl.h.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Computation = 2,
  Invariant = 3,
  Io = 4,
  CacheCorrupt = 5,
  CacheMismatch = 6,
  Overflow = 7,
  Singular = 8,
  EmptyFamily = 9,
  SieveConfig = 10,
  NotConverged = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace zwl
