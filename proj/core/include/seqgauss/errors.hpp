#pragma once

#include <stdexcept>
#include <string>

namespace seqgauss {

// Shapes of operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that must be symmetric positive definite is not.
class NotPositiveDefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input violates an operation's precondition (empty list, size limit, non-orthonormal basis, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Time integration failed: CFL bound exceeded or non-finite values produced.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structured-text document is malformed; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace seqgauss
