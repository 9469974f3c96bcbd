#pragma once

#include <stdexcept>
#include <string>

namespace snpkit {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Syntax problem in a system document or guard expression, 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

// The system cannot be executed or checked as requested.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two rules of one neuron are enabled at once; deterministic execution only.
class NondeterminismError : public Error {
 public:
  using Error::Error;
};

// Delay pattern or topology the rewriter does not cover.
class OutOfScopeError : public Error {
 public:
  using Error::Error;
};

}  // namespace snpkit
