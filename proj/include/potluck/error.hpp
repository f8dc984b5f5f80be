#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace potluck {

// Base of every error thrown by the library. `code()` is a short stable
// identifier the CLI prints verbatim so scripts can match on it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Input rejected by an invariant check (bad simplex point, bad index, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

// Scenario or parameter combination that cannot be run as configured.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Expression syntax error. `offset` is the byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("expr_parse", what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Domain error while evaluating an expression (division by zero, log of a
// non-positive number, ...).
class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error("eval", what) {}
};

}  // namespace potluck
