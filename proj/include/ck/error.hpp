#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ck {

/// Base for every error raised by the engine. `exit_code()` maps onto the
/// CLI contract: 1 usage, 2 data, 3 backend.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// Input that could not be parsed. `offset` is a byte offset for XML input
/// and a 1-based line number for line-oriented formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Statistic undefined for the given input (constant raters, all-zero
/// differences, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside one pipeline stage.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, int code)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept override { return code_; }

 private:
  std::string stage_;
  int code_;
};

}  // namespace ck
