#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poolbench {

/// Base for every failure caused by bad input data (files, tables, ids).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A malformed line in a text file. The message carries "<file>:<line>: ...".
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a measure is asked to score a topic that has no relevant document.
class UndefinedMeasure : public DataError {
 public:
  explicit UndefinedMeasure(const std::string& topic)
      : DataError("measure undefined for topic " + topic + ": no relevant documents"), topic_(topic) {}

  const std::string& topic() const noexcept { return topic_; }

 private:
  std::string topic_;
};

/// Statistical routine called outside its domain (too few observations, zero variance, ...).
class StatsError : public DataError {
 public:
  using DataError::DataError;
};

/// Unknown id (assessor, team, version, assignment).
class NotFound : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace poolbench
