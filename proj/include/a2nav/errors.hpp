#pragma once

#include <stdexcept>
#include <string>

namespace a2nav {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaError : Error {
  using Error::Error;
};
struct InvariantError : Error {
  using Error::Error;
};
struct OutOfBoundsError : Error {
  using Error::Error;
};
struct UnreachableError : Error {
  using Error::Error;
};
struct ResourceUnavailableError : Error {
  using Error::Error;
};
struct RetriesExhaustedError : Error {
  using Error::Error;
};
struct EmptyInstructionError : Error {
  using Error::Error;
};
struct UnparseableError : Error {
  using Error::Error;
};
struct LlmUnavailableError : Error {
  using Error::Error;
};
struct FixtureMissError : Error {
  using Error::Error;
};
struct AuthError : Error {
  using Error::Error;
};
struct LandmarkNotFoundError : Error {
  using Error::Error;
};
struct EmptyResultSetError : Error {
  using Error::Error;
};
struct TraceFormatError : Error {
  using Error::Error;
};

}  // namespace a2nav
