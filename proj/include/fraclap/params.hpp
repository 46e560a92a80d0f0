#pragma once

#include <cmath>

#include "fraclap/errors.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

/// Fractional order alpha in (0,2) with the derived constants
/// kappa = 2^{1-alpha} Gamma(1-alpha/2) / Gamma(alpha/2) and beta = 2(alpha-1)/alpha.
struct FracParams {
  double alpha = 1.0;
  double kappa = 1.0;
  double beta = 0.0;

  FracParams() = default;
  explicit FracParams(double a) : alpha(a) {
    if (!(a > 0.0 && a < 2.0)) throw domain_error("FracParams: alpha must lie strictly in (0,2)");
    kappa = std::pow(2.0, 1.0 - a) * specfun::gamma_fn(1.0 - 0.5 * a) / specfun::gamma_fn(0.5 * a);
    beta = 2.0 * (a - 1.0) / a;
  }
};

/// Ball B(0,R) in R^N.
struct BallGeometry {
  int N = 1;
  double R = 1.0;
  double omega_N = 2.0;
  double measure = 2.0;

  BallGeometry() = default;
  BallGeometry(int n, double radius) : N(n), R(radius) {
    if (n < 1) throw domain_error("BallGeometry: N must be >= 1");
    if (!(radius > 0.0)) throw domain_error("BallGeometry: R must be > 0");
    omega_N = specfun::unit_ball_measure(n);
    measure = omega_N * std::pow(radius, n);
  }

  /// Ball with the same measure as a set of measure m.
  static BallGeometry with_measure(int n, double m) {
    if (!(m > 0.0)) throw domain_error("BallGeometry: measure must be > 0");
    const double r = std::pow(m / specfun::unit_ball_measure(n), 1.0 / n);
    BallGeometry g(n, r);
    g.measure = m;
    return g;
  }
};

}  // namespace fraclap
