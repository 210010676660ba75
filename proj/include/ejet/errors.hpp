#pragma once

#include <stdexcept>
#include <string>

namespace ejet {

// Bad input data or file schema (CSV columns, model JSON version, label
// preconditions). CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric / fitting failure (single-class training set, non-finite loss,
// resample retry exhaustion, all-zero importance). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ejet
