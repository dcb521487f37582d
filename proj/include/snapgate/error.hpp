#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snapgate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frame arrived with a timestamp that does not advance the stream.
class StreamOrderError : public Error {
 public:
  using Error::Error;
};

/// Channel count or feature dimension does not match the configured value.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A model file or configuration that cannot be used for the requested step.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Event accounting produced inconsistent counts (e.g. negative TN).
class AccountingError : public Error {
 public:
  using Error::Error;
};

/// Invalid synthetic-session specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace snapgate
