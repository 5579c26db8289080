#pragma once

#include <stdexcept>
#include <string>

namespace redugoal {

/// Wrong vector length or malformed argument.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value outside its valid domain (e.g. a configuration outside joint limits).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The closed-form solver does not apply to this chain geometry.
class UnsupportedChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A planner precondition is violated (e.g. start in collision).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scene generation produced nothing usable.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace redugoal
