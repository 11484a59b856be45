#pragma once

#include <stdexcept>
#include <string>

namespace mcmix {

/// Input violates a documented precondition (bad parameters, bad dataset).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a special function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// NaN or Inf appeared in an objective during iteration.
class NumericalFailure : public std::runtime_error {
public:
  NumericalFailure(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

private:
  int iteration_;
};

/// An iterative computation did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

}  // namespace mcmix
