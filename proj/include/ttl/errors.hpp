#pragma once

#include <stdexcept>
#include <string>

namespace ttl {

/// Invalid parameters, mismatched dimensions, malformed files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong call sequence or arguments (e.g. mse on sequences of different length).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A state or loss became non-finite. `where` is a time stamp (s) or an
/// epoch index depending on the producer.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double where)
      : std::runtime_error(what + " (at " + std::to_string(where) + ")"),
        where_(where) {}

  double where() const noexcept { return where_; }

 private:
  double where_;
};

}  // namespace ttl
