#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qprecond {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of two operands disagree (spin vector vs. problem, state vs. problem).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied parameter is outside its documented domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// An index is outside [0, N).
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Internally inconsistent data (duplicate conflicting entries, stale prune maps).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A requested emulation or enumeration exceeds the configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace qprecond
