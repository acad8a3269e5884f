#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asa {

// Base for every error raised by the library. The CLI maps the three
// families below to exit codes 1 (usage), 2 (data) and 3 (numeric).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class MalformedRecordError : public DataError {
 public:
  MalformedRecordError(std::size_t line, const std::string& what)
      : DataError("malformed record at line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SequenceTooShortError : public DataError {
 public:
  using DataError::DataError;
};

class CannotExplainError : public DataError {
 public:
  using DataError::DataError;
};

class RankDeficientError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace asa
