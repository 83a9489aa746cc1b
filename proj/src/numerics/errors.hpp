#pragma once

#include <stdexcept>
#include <string>

namespace wml {

enum class ErrorCode {
  invalid_argument = 2,
  domain = 3,
  pole = 4,
  convergence = 5,
  overflow = 6,
  schema = 7,
  io = 8,
  precision = 9,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace wml
