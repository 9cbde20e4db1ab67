#pragma once

#include <stdexcept>
#include <string>

namespace mforge {

// Maps one-to-one onto the CLI exit codes and the C API status codes.
enum class ErrorKind { numeric = 1, usage = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// Raised for Gamma evaluated at a non-positive integer.
struct PoleError : NumericError {
  using NumericError::NumericError;
};

// Raised when a truncated series would need more coefficients than the form carries.
struct DepthError : NumericError {
  DepthError(const std::string& what, long long required)
      : NumericError(what), required_terms(required) {}
  long long required_terms;
};

}  // namespace mforge
