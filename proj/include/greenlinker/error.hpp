#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace greenlinker {

enum class ErrorKind {
  validation,
  overflow,
  non_convergence,
  not_certified,
  perturbation_required,
  julia_intersection,
  unsupported,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class OverflowError : public Error {
public:
  explicit OverflowError(const std::string& what) : Error(ErrorKind::overflow, what) {}
};

/// Simultaneous root iteration failed; carries the best iterates reached.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, std::vector<std::complex<double>> best)
      : Error(ErrorKind::non_convergence, what), best_(std::move(best)) {}
  const std::vector<std::complex<double>>& best_iterates() const noexcept { return best_; }

private:
  std::vector<std::complex<double>> best_;
};

class NotCertifiedError : public Error {
public:
  explicit NotCertifiedError(const std::string& what) : Error(ErrorKind::not_certified, what) {}
};

/// A critical value sits on (or within margin of) a loop, or two roots
/// collided during continuation. The caller may jitter the loop and retry.
class PerturbationRequiredError : public Error {
public:
  PerturbationRequiredError(const std::string& what, std::complex<double> critical_value)
      : Error(ErrorKind::perturbation_required, what), critical_value_(critical_value) {}
  std::complex<double> critical_value() const noexcept { return critical_value_; }

private:
  std::complex<double> critical_value_;
};

/// A loop sample failed to escape while its neighbours did: the loop meets
/// the Julia set at sampling resolution.
class JuliaIntersectionError : public Error {
public:
  JuliaIntersectionError(const std::string& what, double parameter, std::complex<double> point)
      : Error(ErrorKind::julia_intersection, what), parameter_(parameter), point_(point) {}
  double parameter() const noexcept { return parameter_; }
  std::complex<double> point() const noexcept { return point_; }

private:
  double parameter_;
  std::complex<double> point_;
};

class UnsupportedError : public Error {
public:
  explicit UnsupportedError(const std::string& what) : Error(ErrorKind::unsupported, what) {}
};

}  // namespace greenlinker
