#pragma once

#include <stdexcept>
#include <string>

namespace kerrq {

/// Failure categories shared by the C++ API and the C error codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kTruncation = 2,
  kCoverage = 3,
  kNumericalFailure = 4,
  kConfig = 5,
  kIo = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

}  // namespace kerrq
