#pragma once

#include <stdexcept>
#include <string>

namespace tgvflow {

/// Bad arguments or mismatched shapes.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or exploding iterate inside a solver.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace tgvflow
