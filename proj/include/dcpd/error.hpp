#pragma once

#include <stdexcept>
#include <string>

namespace dcpd {

enum class ErrorCode {
  config = 1,
  dimension = 2,
  capacity = 3,
  io = 4,
  internal = 5,
};

/// Thrown by every library entry point. The code maps one-to-one onto the
/// status values of the C API.
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

}  // namespace dcpd
