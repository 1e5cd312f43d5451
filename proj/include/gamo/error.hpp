#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gamo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor extents or network dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN/Inf appeared in a forward value, gradient or loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent dataset input (IDX, CSV, geometry, splits).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid model or training configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Run-spec parse failure; carries the offending field and source line.
class SpecError : public Error {
 public:
  SpecError(std::string field, std::size_t line, const std::string& message)
      : Error(field + (line ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + message),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

}  // namespace gamo
