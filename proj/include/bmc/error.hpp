#pragma once

#include <stdexcept>
#include <string>

namespace bmc {

enum class ErrorCode
{
  invalid_argument = 1,
  out_of_range = 2,
  io = 3,
  runtime = 4
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what)
    , code_(code)
  {
  }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

//! Raised when a caller-supplied value violates a documented precondition.
class InvalidArgument : public Error
{
public:
  explicit InvalidArgument(const std::string& what)
    : Error(ErrorCode::invalid_argument, what)
  {
  }
};

class OutOfRange : public Error
{
public:
  explicit OutOfRange(const std::string& what)
    : Error(ErrorCode::out_of_range, what)
  {
  }
};

class IoError : public Error
{
public:
  explicit IoError(const std::string& what)
    : Error(ErrorCode::io, what)
  {
  }
};

inline void
require(bool condition, const std::string& message)
{
  if (!condition)
    throw InvalidArgument(message);
}

} // namespace bmc
