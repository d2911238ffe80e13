#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chase {

// Malformed input file (PLY, scenario). Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Geometric precondition failure, e.g. a look-at direction of zero length.
class DegenerateGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A layer of the viewpoint DAG has no vertex reachable from the root.
class InfeasiblePlan : public std::runtime_error {
 public:
  InfeasiblePlan(const std::string& what, std::size_t layer)
      : std::runtime_error(what), layer_(layer) {}
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

// Rank-deficient optimality system in the spline QP.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chase
