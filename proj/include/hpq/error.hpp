#pragma once

#include <stdexcept>
#include <string>

namespace hpq {

enum class ErrorCode {
  ParseError,
  DimensionMismatch,
  LengthMismatch,
  CountMismatch,
  Infeasible,
  SingularSystem,
  TooLarge,
  ZeroColumn,
  TrivialNullSpace,
  NonRealRoots,
  EmptySupport,
  OutOfRange,
  Internal,
};

/// Library error carrying a machine-readable code (the CLI maps codes to
/// process exit statuses).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace hpq
