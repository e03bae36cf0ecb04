#pragma once

#include <stdexcept>
#include <string>

namespace incentive {

// Bad numeric input (non-finite values, efforts outside a cost model's range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A stored quantity broke one of its type invariants.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The MSE threshold cannot be met even with every agent at maximum effort.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double shortfall)
      : std::runtime_error(what), shortfall_(shortfall) {}
  // Missing precision, in units of 1/x^2.
  double shortfall() const { return shortfall_; }

 private:
  double shortfall_;
};

// Solver or experiment options that cannot be honoured.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No valid peer exists for a paid agent.
class PairingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace incentive
