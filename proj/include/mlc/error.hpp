#pragma once

#include <stdexcept>
#include <string>

namespace mlc {

enum class ErrorKind {
  invalid_input,
  not_expressible,
  not_computable_blackbox,
  unsupported,
  infeasible,
};

char const* to_string(ErrorKind kind) noexcept;

/// Exception type used throughout the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string const& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string const& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, std::string const& what) {
  if (!cond) {
    fail(kind, what);
  }
}

}  // namespace mlc
