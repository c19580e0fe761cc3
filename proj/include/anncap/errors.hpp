#pragma once

#include <stdexcept>
#include <string>

namespace anncap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (files, families, networks).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : Error(what + " (achieved error bound " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A theorem's hypothesis is not satisfied by the space or annulus.
class ApplicabilityError : public Error {
 public:
  ApplicabilityError(const std::string& bound, const std::string& hypothesis)
      : Error(bound + ": hypothesis not satisfied: " + hypothesis),
        hypothesis_(hypothesis) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

/// Boundary sets of a condenser are not connected through the network.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Carries the best feasible energy.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_energy)
      : Error(what), best_energy_(best_energy) {}

  double best_energy() const noexcept { return best_energy_; }

 private:
  double best_energy_;
};

}  // namespace anncap
