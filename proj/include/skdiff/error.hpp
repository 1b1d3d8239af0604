#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skdiff {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input document could not be read. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

/// A Melody (or Segment) violated one of its structural invariants.
class MelodyError : public Error {
 public:
  using Error::Error;
};

/// Segmentation, grid quantization or reduction is impossible for the given input.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A comparison was requested that is not defined (backward pair, unequal spans).
class ComparisonError : public Error {
 public:
  using Error::Error;
};

}  // namespace skdiff
