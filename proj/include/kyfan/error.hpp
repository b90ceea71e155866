#pragma once

#include <stdexcept>
#include <string>

namespace kyfan {

enum class ErrorCode {
  InvalidInput,
  Unsupported,
  Undefined,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code)
{
  switch (code) {
  case ErrorCode::InvalidInput: return "InvalidInput";
  case ErrorCode::Unsupported: return "Unsupported";
  case ErrorCode::Undefined: return "Undefined";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what)
{
  if (!cond) fail(ErrorCode::InvalidInput, what);
}

} // namespace kyfan
