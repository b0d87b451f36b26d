#pragma once

/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every ainf component.
 *
 * Mathematical failures that a checker can localize (a relation that does not
 * hold, a non-cyclic element) are reported through dedicated types so that the
 * command-line driver can map them to exit codes without string matching.
 */

#include <stdexcept>
#include <string>

namespace ainf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-positive monoid generator, level outside the monoid, ...
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operands built over different truncations or bases.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

class NotAUnitError : public Error {
 public:
  using Error::Error;
};

/// A differential whose square is nonzero below the cutoff.
class NotAComplexError : public Error {
 public:
  NotAComplexError(const std::string& what, std::string witness, std::string level)
      : Error(what), witness_(std::move(witness)), level_(std::move(level)) {}
  const std::string& witness() const noexcept { return witness_; }
  const std::string& level() const noexcept { return level_; }

 private:
  std::string witness_;
  std::string level_;
};

/// Cyclic-element conditions: 1 = leading map invertible, 2 = n_0(1) in the ideal.
class NotCyclicError : public Error {
 public:
  NotCyclicError(const std::string& what, int condition) : Error(what), condition_(condition) {}
  int condition() const noexcept { return condition_; }

 private:
  int condition_;
};

/// An element that was required to satisfy the Maurer-Cartan equation does not.
class MaurerCartanError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure; signals inputs that were certified incorrectly.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& what, unsigned long long required)
      : Error(what), required_(required) {}
  unsigned long long required() const noexcept { return required_; }

 private:
  unsigned long long required_;
};

}  // namespace ainf
