#pragma once

#include <stdexcept>
#include <string>

namespace phm {

/// Failure inside a numerical routine. Carries the name of the module that
/// raised it so front ends can report provenance.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// The Fock-space truncation discards more probability than allowed.
class TruncationError : public NumericError {
 public:
  TruncationError(std::string module, const std::string& message, double discarded_mass)
      : NumericError(std::move(module), message), discarded_mass_(discarded_mass) {}

  double discarded_mass() const noexcept { return discarded_mass_; }

 private:
  double discarded_mass_;
};

}  // namespace phm
