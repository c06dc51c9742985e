// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gap {

/// Invalid scalar argument (non-positive sigma, degenerate interval, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coordinate or time lies outside the domain of its grid.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A sequence has the wrong length for the operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Central differences requested at the first or last sample.
class EdgeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Input document does not match its schema.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinate units within a document are inconsistent.
class UnitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario or configuration values that cannot be satisfied.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gap
