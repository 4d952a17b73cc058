#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lambda_lab {

/// Precondition violated by the caller (bad R, bad exponent, wrong kind...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double required, double budget)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", budget " + std::to_string(budget) + ")"),
        required_(required),
        budget_(budget) {}

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  double required_;
  double budget_;
};

/// A randomized selection kept landing outside its size window.
class RetryExhausted : public std::runtime_error {
 public:
  RetryExhausted(const std::string& what, std::vector<std::size_t> size_history)
      : std::runtime_error(what), size_history_(std::move(size_history)) {}

  const std::vector<std::size_t>& size_history() const noexcept {
    return size_history_;
  }

 private:
  std::vector<std::size_t> size_history_;
};

/// A constructed object failed an audit (size window, invariant).
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported serialized input.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lambda_lab
