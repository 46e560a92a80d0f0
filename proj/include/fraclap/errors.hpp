#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  using error::error;
};

/// Evaluation at a pole (Gamma at a nonpositive integer, kernel at x = y).
class pole_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Result not representable in double precision.
class overflow_error : public error {
 public:
  using error::error;
};

/// An improper integral or constant that does not exist for the given parameters.
class divergence_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Iterative method ran out of terms / subdivisions before reaching tolerance.
class convergence_error : public error {
 public:
  convergence_error(const std::string& what, double achieved_error)
      : error(what + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Inputs that are individually valid but inconsistent with each other
/// (mismatched meshes, slices with different measures, ...).
class mismatch_error : public error {
 public:
  using error::error;
};

}  // namespace fraclap
