#pragma once

#include <stdexcept>
#include <string>

namespace mapface {

// A structure violates one of its invariants (bad rotation, bad matching, bad input file).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that the library declines: budget exceeded, argument
// outside the domain of a formula, unsupported symmetry reduction.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Signals a broken internal invariant. Never expected to fire on valid input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mapface
