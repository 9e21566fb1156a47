#pragma once

#include <stdexcept>
#include <string>

namespace tp {

// Operand shapes do not conform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (files, labels, missing classes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric self-check (gradient check, finiteness) failed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tp
