#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace packsell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed Matrix Market input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value cannot be represented by the selected codec (non-finite input or
/// overflow after rounding).
class CodecError : public Error {
 public:
  using Error::Error;
};

/// Scaling could not be applied; `row()` names the offending row.
class ScalingError : public Error {
 public:
  ScalingError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Invalid construction parameters or inconsistent storage.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ContainerError : public Error {
 public:
  using Error::Error;
};

}  // namespace packsell
