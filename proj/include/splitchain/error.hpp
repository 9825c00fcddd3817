// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace splitchain {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax, missing or mistyped fields).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// No split, placement or tour satisfies the capacity and routing constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured split budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace splitchain
