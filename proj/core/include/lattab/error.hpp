#ifndef LATTAB_ERROR_HPP
#define LATTAB_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lattab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (unknown element, carrier mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A construction or search ran past its configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string const& what, std::size_t budget)
      : Error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
};

/// A mathematical invariant that must hold by construction was violated.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lattab

#endif  // LATTAB_ERROR_HPP
