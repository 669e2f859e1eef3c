#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anycap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A record violates the line-delimited record schema.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t index, std::string field_path, const std::string& what)
      : Error("record " + std::to_string(index) + " (" + field_path + "): " + what),
        index_(index),
        field_path_(std::move(field_path)),
        detail_(what) {}
  std::size_t index() const { return index_; }
  const std::string& field_path() const { return field_path_; }
  /// The message without the record/field prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t index_;
  std::string field_path_;
  std::string detail_;
};

/// Inputs whose shapes or lengths do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Precondition on an argument does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace anycap
