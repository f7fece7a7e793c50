#pragma once

#include <stdexcept>
#include <string>

namespace mep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a documented invariant. The message names it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class GoalInObstacle : public ValidationError {
 public:
  GoalInObstacle() : ValidationError("goal lies inside an obstacle") {}
};

class SourceInObstacle : public ValidationError {
 public:
  explicit SourceInObstacle(std::size_t index)
      : ValidationError("source " + std::to_string(index) + " lies inside an obstacle") {}
};

/// Triangulation input is collinear or contains duplicate points.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario or node file; carries the offending line (1-based) or field.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mep
