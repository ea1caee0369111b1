#ifndef CTXG_ERRORS_HPP
#define CTXG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctxg {

// Base for all user-facing failures (bad input data, bad config, malformed
// files). CLI maps these to exit code 2; anything else is an internal error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownConceptError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", col " +
              std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class MissingTypeError : public Error {
 public:
  using Error::Error;
};

class DuplicatePredicateError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& msg)
      : Error("row " + std::to_string(row) + ": " + msg), row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class TooSmallError : public Error {
 public:
  using Error::Error;
};

class VocabError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

class ZeroRateError : public Error {
 public:
  using Error::Error;
};

class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

class NoPositivesError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxg

#endif  // CTXG_ERRORS_HPP
