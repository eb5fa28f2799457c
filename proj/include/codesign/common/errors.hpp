#pragma once

#include <stdexcept>
#include <string>

namespace codesign {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be parsed; carries the line number and offending field.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string field = {})
      : Error(format(what, line, field)), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string msg = "parse error at line " + std::to_string(line);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + what;
  }
  int line_;
  std::string field_;
};

/// Structurally invalid model (cycles, missing references, non-finite limits).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A mount hook names a joint that does not exist.
class MountHookMissing : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class UnknownFrame : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownTask : public Error {
 public:
  using Error::Error;
};

class BadParams : public Error {
 public:
  using Error::Error;
};

class EmptyLayout : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class BudgetTooSmall : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace codesign
