#pragma once

// Closed-form Green function of the fractional Laplacian on a ball, its
// pointwise bound, the radial potential it generates, the profile psi whose
// L^{p'} norm gives the best constant of the L^p -> L^inf estimate, and the
// L^{N/alpha,1} -> L^inf bound.
//
// Kernel convention: G(x,y) = -c R^{-alpha} |x-y|^{alpha-N} I(z),
//   c = 2^{-alpha} Gamma(N/2) / (pi^{N/2} Gamma(alpha/2)^2),
//   I(z) = \int_0^z s^{alpha/2-1} (s/R^2 + 1)^{-N/2} ds,
//   z = (R^2-|x|^2)(R^2-|y|^2) / |x-y|^2.
// The factor R^{-alpha} makes G_R(x,y) = R^{alpha-N} G_1(x/R, y/R).

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/params.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/rearrange.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

using Point = std::array<double, 3>;

namespace ballgreen {

/// c = 2^{-alpha} Gamma(N/2) / (pi^{N/2} Gamma(alpha/2)^2).
inline double kernel_prefactor(int N, const FracParams& fp) {
  const double g = specfun::gamma_fn(0.5 * fp.alpha);
  return std::pow(2.0, -fp.alpha) * specfun::gamma_fn(0.5 * N) /
         (std::pow(std::numbers::pi, 0.5 * N) * g * g);
}

/// Positive kernel K = -G as a function of |x|, |y| and |x-y|.
inline double positive_kernel(double rx, double ry, double dist, const BallGeometry& geom,
                              const FracParams& fp) {
  const double R2 = geom.R * geom.R;
  const double z = (R2 - rx * rx) * (R2 - ry * ry) / (dist * dist);
  if (!(z > 0.0)) return 0.0;
  return kernel_prefactor(geom.N, fp) * std::pow(geom.R, -fp.alpha) *
         std::pow(dist, fp.alpha - geom.N) *
         specfun::kernel_integral_hypergeometric(z, fp.alpha, geom.N, geom.R);
}

inline double norm(const Point& x, int N) {
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

/// Green function G_{B(0,R)}(x, y) <= 0; only the first N coordinates are used.
inline double green_ball(const Point& x, const Point& y, const BallGeometry& geom,
                         const FracParams& fp) {
  double d2 = 0.0;
  for (int i = 0; i < geom.N; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  if (d2 == 0.0) throw pole_error("green_ball: kernel is singular at x = y");
  const double rx = norm(x, geom.N);
  const double ry = norm(y, geom.N);
  if (rx > geom.R || ry > geom.R) throw domain_error("green_ball: points must lie in the closed ball");
  return -positive_kernel(rx, ry, std::sqrt(d2), geom, fp);
}

struct BoundConstants {
  double a = 0.0;
  double b = 0.0;
};

/// Constants with |G(x,y)| <= a b |x-y|^{alpha-N}:
///   a = c R^{N-alpha},  b = \int_0^inf s^{alpha/2-1} (s+R^2)^{-N/2} ds = R^{alpha-N} B(alpha/2, (N-alpha)/2).
/// The product a b = 2^{-alpha} Gamma((N-alpha)/2) / (pi^{N/2} Gamma(alpha/2)) does not depend on R.
inline BoundConstants green_bound_constants(const BallGeometry& geom, const FracParams& fp) {
  if (!(geom.N > fp.alpha)) throw divergence_error("green_bound_constants: requires N > alpha");
  BoundConstants k;
  k.a = kernel_prefactor(geom.N, fp) * std::pow(geom.R, geom.N - fp.alpha);
  k.b = specfun::kernel_integral(INFINITY, fp.alpha, geom.N, geom.R) / std::pow(geom.R, geom.N);
  return k;
}

namespace detail {

// Measure of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / specfun::gamma_fn(0.5 * n);
}

}  // namespace detail

/// \int_{|y| = rho} K(x, y) dS(y) / rho^{N-1} for |x| = r, i.e. the kernel
/// integrated over the unit sphere of directions. Uses the angle theta
/// between x and y, with |x-y|^2 = (r-rho)^2 + 4 r rho sin^2(theta/2).
inline double angular_kernel(double r, double rho, const BallGeometry& geom, const FracParams& fp,
                             double rel_tol = 1e-10) {
  const int N = geom.N;
  if (N == 1) {
    const double d1 = std::abs(r - rho);
    const double near = d1 > 0.0 ? positive_kernel(r, rho, d1, geom, fp) : 0.0;
    return near + positive_kernel(r, rho, r + rho, geom, fp);
  }
  const double cap = detail::sphere_area(N - 1);
  if (r == 0.0 || rho == 0.0) {
    return detail::sphere_area(N) * positive_kernel(r, rho, std::max(r, rho), geom, fp);
  }
  auto f = [&](double theta) {
    const double sh = std::sin(0.5 * theta);
    const double d = std::sqrt((r - rho) * (r - rho) + 4.0 * r * rho * sh * sh);
    if (d == 0.0) return 0.0;
    return positive_kernel(r, rho, d, geom, fp) * std::pow(std::sin(theta), N - 2);
  };
  // The integrand peaks at theta ~ |r - rho| / sqrt(r rho); split there and
  // geometrically outward so each piece is resolved.
  const double pi = std::numbers::pi;
  double lo = 0.0;
  double hi = std::min(pi, 2.0 * std::abs(r - rho) / std::sqrt(r * rho));
  if (!(hi > 0.0)) hi = pi;
  double total = 0.0;
  while (true) {
    total += quad::tanh_sinh(f, lo, hi, rel_tol, 0.0, 14).value;
    if (hi >= pi) break;
    lo = hi;
    hi = std::min(pi, 16.0 * hi);
  }
  return cap * total;
}

/// phi(r) = \int_{B} K(x, y) f#(y) dy at |x| = r, where f# is the Schwarz
/// symmetrization of fstar on the ball geom. The radial integral is split at
/// r and at every jump of f#, and each piece is integrated by tanh-sinh so
/// the logarithmic / algebraic singularity at rho = r sits on an endpoint.
inline double radial_potential(const DecreasingProfile& fstar, const BallGeometry& geom,
                               const FracParams& fp, double r, double rel_tol = 1e-9) {
  if (!(r >= 0.0 && r < geom.R)) throw domain_error("radial_potential: r must lie in [0, R)");
  const RadialFunction fsharp(fstar, geom.N);
  std::vector<double> cuts;
  for (double s : fstar.breakpoints()) {
    const double rho = std::pow(s / geom.omega_N, 1.0 / geom.N);
    // A jump within rounding distance of r would leave a sliver on which
    // the kernel at rho == r is not integrable in angle.
    if (rho > 0.0 && rho < geom.R && std::abs(rho - r) > 1e-12 * geom.R) cuts.push_back(rho);
  }
  cuts.push_back(0.0);
  cuts.push_back(geom.R);
  if (r > 0.0) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double v = fsharp(0.5 * (lo + hi));
    if (v == 0.0) continue;
    auto f = [&](double rho) {
      if (rho == 0.0) return 0.0;
      if (r == 0.0) {
        // rho^{N-1} |x-y|^{alpha-N} = rho^{alpha-1}; avoids inf * 0 near rho = 0.
        const double R2 = geom.R * geom.R;
        const double z = R2 * (R2 - rho * rho) / (rho * rho);
        return detail::sphere_area(geom.N) * kernel_prefactor(geom.N, fp) * std::pow(geom.R, -fp.alpha) *
               std::pow(rho, fp.alpha - 1.0) *
               specfun::kernel_integral_hypergeometric(z, fp.alpha, geom.N, geom.R);
      }
      return std::pow(rho, geom.N - 1) * angular_kernel(r, rho, geom, fp, 0.1 * rel_tol);
    };
    try {
      total += v * quad::tanh_sinh(f, lo, hi, rel_tol, 0.0, 10).value;
    } catch (const convergence_error& e) {
      throw convergence_error("radial_potential: outer quadrature did not converge",
                              e.achieved_error());
    }
  }
  return total;
}

/// psi at radius t = (s/omega_N)^{1/N}:
///   psi(t) = -c R^{-alpha} t^{alpha-N} I((R^2/t^2)(R^2 - t^2)),
/// so that phi(0) = -\int_0^{|Omega|} psi((s/omega_N)^{1/N}) f*(s) ds.
inline double psi_profile(double s, const BallGeometry& geom, const FracParams& fp) {
  if (s < 0.0 || s > geom.measure * (1.0 + 1e-12)) {
    throw domain_error("psi_profile: s must lie in (0, |Omega|]");
  }
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  const double t = std::min(std::pow(s / geom.omega_N, 1.0 / geom.N), geom.R);
  const double R2 = geom.R * geom.R;
  const double w = R2 / (t * t) * (R2 - t * t);
  if (!(w > 0.0)) return 0.0;
  return -kernel_prefactor(geom.N, fp) * std::pow(geom.R, -fp.alpha) * std::pow(t, fp.alpha - geom.N) *
         specfun::kernel_integral(w, fp.alpha, geom.N, geom.R);
}

/// phi(0) through psi: -\int_0^{|Omega|} psi((s/omega_N)^{1/N}) f*(s) ds.
inline double center_value_via_psi(const DecreasingProfile& fstar, const BallGeometry& geom,
                                   const FracParams& fp, double rel_tol = 1e-11) {
  const auto& bp = fstar.breakpoints();
  double total = 0.0;
  for (std::size_t b = 0; b < fstar.blocks(); ++b) {
    const double v = fstar.values()[b];
    if (v == 0.0) continue;
    const double hi = std::min(bp[b + 1], geom.measure);
    if (bp[b] >= hi) break;
    auto f = [&](double s) { return -psi_profile(s, geom, fp); };
    total += v * quad::tanh_sinh(f, bp[b], hi, rel_tol).value;
  }
  return total;
}

/// Best constant of ||phi||_inf <= C ||f||_{L^p} on the ball:
///   C = ( \int_0^{|Omega|} |psi((s/omega_N)^{1/N})|^{p'} ds )^{1/p'},
/// computed by tanh-sinh with the incomplete kernel integral evaluated by
/// quadrature. Near s = 0 the integrand behaves like s^e, e = (alpha-N)p'/N;
/// the substitution s = |Omega| u^m, m = 1/(1+e), makes it bounded.
/// Requires p > N/alpha.
inline double best_constant(const BallGeometry& geom, const FracParams& fp, double p,
                            double rel_tol = 1e-12) {
  if (!(p > geom.N / fp.alpha)) {
    throw divergence_error("best_constant: the integral diverges unless p > N/alpha");
  }
  const double pp = std::isinf(p) ? 1.0 : p / (p - 1.0);
  const double e = (fp.alpha - geom.N) * pp / geom.N;
  const double m = std::max(1.0, 1.0 / (1.0 + e));
  const double log_pref = std::log(kernel_prefactor(geom.N, fp)) - fp.alpha * std::log(geom.R);
  const double R2 = geom.R * geom.R;
  // log |psi| from log t, so that s = |Omega| u^m may underflow harmlessly.
  auto f = [&](double u) {
    const double lt = (std::log(geom.measure) + m * std::log(u) - std::log(geom.omega_N)) / geom.N;
    const double t = std::exp(lt);
    if (t >= geom.R) return 0.0;
    const double w = t > 0.0 ? R2 / (t * t) * (R2 - t * t) : INFINITY;
    if (std::isinf(w) && !(geom.N > fp.alpha)) return 0.0;
    const double I = specfun::kernel_integral(w, fp.alpha, geom.N, geom.R);
    if (!(I > 0.0)) return 0.0;
    const double log_psi = log_pref + (fp.alpha - geom.N) * lt + std::log(I);
    return std::exp(pp * log_psi + (m - 1.0) * std::log(u)) * m * geom.measure;
  };
  const double integral = quad::tanh_sinh(f, 0.0, 1.0, rel_tol, 0.0, 14).value;
  return std::pow(integral, 1.0 / pp);
}

/// Closed form of the best constant for N = 3, alpha = 1, R = 1:
///   (2 pi)^{1/p'} / (2 pi^2) * B((p-3)/(2(p-1)), (3p-2)/(2(p-1)))^{(p-1)/p}.
inline double best_constant_n3_alpha1(double p) {
  if (!(p > 3.0)) throw divergence_error("best_constant_n3_alpha1: requires p > 3");
  const double pp = p / (p - 1.0);
  const double pi = std::numbers::pi;
  return std::pow(2.0 * pi, 1.0 / pp) / (2.0 * pi * pi) *
         std::pow(specfun::beta_fn((p - 3.0) / (2.0 * (p - 1.0)), (3.0 * p - 2.0) / (2.0 * (p - 1.0))),
                  (p - 1.0) / p);
}

/// ||  |x|^{alpha-N} ||_{L^{N/(N-alpha),inf}} = omega_N^{(N-alpha)/N}.
inline double riesz_weak_norm(int N, const FracParams& fp) {
  return std::pow(specfun::unit_ball_measure(N), (N - fp.alpha) / N);
}

/// Bound for sup phi = phi(0):
///   phi(0) <= a b \int |y|^{alpha-N} f#(y) dy = a b omega_N^{(N-alpha)/N} ||f||_{L^{N/alpha,1}}.
/// The factor omega_N^{(N-alpha)/N} is the weak-L^{N/(N-alpha)} norm of |x|^{alpha-N}.
inline double linfty_bound(const DecreasingProfile& fstar, const BallGeometry& geom, const FracParams& fp) {
  const auto k = green_bound_constants(geom, fp);
  return k.a * k.b * riesz_weak_norm(geom.N, fp) * lorentz_norm(fstar, {geom.N / fp.alpha, 1.0});
}

/// Classical (alpha = 2) Green function of the ball averaged over the sphere
/// |y| = rho, for |x| = r. Sign convention as above (<= 0).
inline double classical_sphere_average(double r, double rho, const BallGeometry& geom) {
  const int N = geom.N;
  const double m = std::max(r, rho);
  if (N == 1) return -0.5 * (geom.R - m);
  if (N == 2) return -std::log(geom.R / m) / (2.0 * std::numbers::pi);
  const double area = detail::sphere_area(N);
  return -(std::pow(m, 2 - N) - std::pow(geom.R, 2 - N)) / ((N - 2) * area);
}

/// Closed-form Green function averaged over the sphere |y| = rho, |x| = r.
inline double sphere_average(double r, double rho, const BallGeometry& geom, const FracParams& fp,
                             double rel_tol = 1e-10) {
  const double area = detail::sphere_area(geom.N);
  const double scale = geom.N == 1 ? 2.0 : area;
  return -angular_kernel(r, rho, geom, fp, rel_tol) / scale;
}

}  // namespace ballgreen
}  // namespace fraclap
