#pragma once

#include <stdexcept>
#include <string>

namespace stanceval {

// Raised for malformed or contract-violating inputs (bad rows, missing
// columns, precondition failures). CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation cannot proceed (disconnected graph with no
// regularization, non-finite intermediates, overflow). Exit code 2.
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stanceval
