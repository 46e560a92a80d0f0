#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/ballgreen.hpp"

using namespace fraclap;
using namespace fraclap::ballgreen;

namespace {

constexpr double kPi = std::numbers::pi;

Point random_point(std::mt19937_64& gen, int N, double R, double frac = 0.98) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p{0, 0, 0};
  double n = 0;
  for (int i = 0; i < N; ++i) {
    p[i] = g(gen);
    n += p[i] * p[i];
  }
  const double rad = frac * R * std::pow(u(gen), 1.0 / N) / std::sqrt(n);
  for (int i = 0; i < N; ++i) p[i] *= rad;
  return p;
}

double dist(const Point& x, const Point& y, int N) {
  double s = 0;
  for (int i = 0; i < N; ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(KernelClosedForm, MatchesQuadrature) {
  for (int N : {1, 2, 3}) {
    for (double alpha : {0.4, 1.0, 1.6}) {
      for (double R : {0.6, 1.0, 1.7}) {
        for (double w : {1e-3, 0.2, 0.9 * R * R, 1.1 * R * R, 7.0, 300.0, 1e5}) {
          const double q = specfun::kernel_integral(w, alpha, N, R);
          const double h = specfun::kernel_integral_hypergeometric(w, alpha, N, R);
          EXPECT_LT(std::abs(q - h), 1e-10 * std::abs(q)) << N << " " << alpha << " " << R << " " << w;
        }
      }
    }
  }
}

TEST(GreenConstants, ThreeDimensionalUnitBall) {
  const BallGeometry g(3, 1.0);
  const FracParams fp(1.0);
  const auto k = green_bound_constants(g, fp);
  EXPECT_NEAR(k.b, 2.0, 1e-10);
  EXPECT_NEAR(k.a * k.b, 1.0 / (2.0 * kPi * kPi), 1e-10);
  // b by independent quadrature of s^{-1/2} (s+1)^{-3/2} with s = t^2.
  const double q = quad::tanh_sinh([](double t) { return 2.0 / std::pow(t * t + 1.0, 1.5); }, 0.0, 1.0).value +
                   quad::tanh_sinh([](double u) { return 2.0 * u / std::pow(1.0 + u * u, 1.5); }, 0.0, 1.0).value;
  EXPECT_NEAR(k.b, q, 1e-11);
}

TEST(GreenConstants, ProductIsRieszConstantForEveryRadius) {
  for (int N : {1, 2, 3}) {
    for (double alpha : {0.3, 0.8}) {
      const FracParams fp(alpha);
      const double riesz = std::pow(2.0, -alpha) * specfun::gamma_fn((N - alpha) / 2) /
                           (std::pow(kPi, N / 2.0) * specfun::gamma_fn(alpha / 2));
      for (double R : {0.5, 1.0, 2.0}) {
        const auto k = green_bound_constants(BallGeometry(N, R), fp);
        EXPECT_NEAR(k.a * k.b / riesz, 1.0, 1e-10);
      }
      const auto k1 = green_bound_constants(BallGeometry(N, 1.0), fp);
      const auto k2 = green_bound_constants(BallGeometry(N, 2.0), fp);
      EXPECT_NEAR(k2.a / k1.a, std::pow(2.0, N - alpha), 1e-12);
    }
  }
  EXPECT_THROW(green_bound_constants(BallGeometry(1, 1.0), FracParams(1.0)), divergence_error);
  EXPECT_THROW(green_bound_constants(BallGeometry(1, 1.0), FracParams(1.5)), divergence_error);
}

TEST(GreenBall, SignSymmetryAndBound) {
  std::mt19937_64 gen(5);
  for (int N : {2, 3}) {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const BallGeometry geom(N, 1.3);
      const FracParams fp(alpha);
      const auto k = green_bound_constants(geom, fp);
      for (int i = 0; i < 200; ++i) {
        const Point x = random_point(gen, N, geom.R);
        const Point y = random_point(gen, N, geom.R);
        const double gxy = green_ball(x, y, geom, fp);
        const double gyx = green_ball(y, x, geom, fp);
        EXPECT_LE(gxy, 0.0);
        EXPECT_NEAR(gxy, gyx, 1e-12 * std::abs(gxy));
        EXPECT_LE(std::abs(gxy) * std::pow(dist(x, y, N), N - alpha), k.a * k.b * (1 + 1e-12));
      }
    }
  }
  EXPECT_THROW(green_ball({0.1, 0, 0}, {0.1, 0, 0}, BallGeometry(3, 1.0), FracParams(1.0)), pole_error);
}

TEST(GreenBall, VanishesAtTheBoundary) {
  const BallGeometry geom(3, 1.0);
  const FracParams fp(0.8);
  const Point y{0.2, -0.1, 0.3};
  double prev = INFINITY;
  const double first = std::abs(green_ball({0.0, 0.9, 0.0}, y, geom, fp));
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const Point x{0.0, 1.0 - eps, 0.0};
    const double v = std::abs(green_ball(x, y, geom, fp));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-2 * first);
  EXPECT_EQ(green_ball({0.0, 1.0, 0.0}, y, geom, fp), 0.0);
}

TEST(GreenBall, ScalesWithRadius) {
  std::mt19937_64 gen(6);
  for (int N : {1, 2, 3}) {
    const double alpha = N == 1 ? 0.6 : 1.2;
    const FracParams fp(alpha);
    const BallGeometry g1(N, 1.0);
    const double R = 2.3;
    const BallGeometry gR(N, R);
    for (int i = 0; i < 30; ++i) {
      const Point x = random_point(gen, N, 1.0);
      const Point y = random_point(gen, N, 1.0);
      Point xR = x, yR = y;
      for (int j = 0; j < 3; ++j) {
        xR[j] *= R;
        yR[j] *= R;
      }
      const double lhs = green_ball(xR, yR, gR, fp);
      const double rhs = std::pow(R, alpha - N) * green_ball(x, y, g1, fp);
      EXPECT_NEAR(lhs, rhs, 1e-11 * std::abs(rhs));
    }
  }
}

TEST(GreenBall, ApproachesClassicalGreenFunctionAsAlphaTendsToTwo) {
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.999);
  const Point x{0.1, 0.2, 0.0};
  const Point y{-0.3, 0.1, 0.4};
  const double d = dist(x, y, 3);
  const double rx = 0.1 * 0.1 + 0.04;
  const double ry = 0.09 + 0.01 + 0.16;
  // Classical: 1/(4 pi) (1/|x-y| - 1/(|y| |x - y*|)), |y|^2 |x - y*|^2 = |x-y|^2 + (1-|x|^2)(1-|y|^2).
  const double classical = -(1.0 / d - 1.0 / std::sqrt(d * d + (1 - rx) * (1 - ry))) / (4 * kPi);
  EXPECT_NEAR(green_ball(x, y, geom, fp), classical, 2e-3 * std::abs(classical));
}

TEST(Psi, SignAndBoundary) {
  for (int N : {2, 3}) {
    const BallGeometry geom(N, 1.0);
    const FracParams fp(0.9);
    EXPECT_EQ(psi_profile(geom.measure, geom, fp), 0.0);
    for (int i = 1; i <= 100; ++i) EXPECT_LE(psi_profile(geom.measure * i / 100.0, geom, fp), 0.0);
    EXPECT_TRUE(std::isinf(psi_profile(0.0, geom, fp)));
  }
}

TEST(RadialPotential, ZeroSourceAndBoundary) {
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.0);
  EXPECT_EQ(radial_potential(DecreasingProfile::constant(0.0, geom.measure), geom, fp, 0.3), 0.0);
  const auto one = DecreasingProfile::constant(1.0, geom.measure);
  EXPECT_LT(radial_potential(one, geom, fp, 0.9999), 1e-2);
  EXPECT_THROW(radial_potential(one, geom, fp, 1.0), domain_error);
}

TEST(RadialPotential, ConstantSourceInThreeDimensions) {
  // For this kernel, f = 1 on the unit ball in R^3 with alpha = 1 gives
  // u = (1 - r^2)^{1/2} / 2.
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.0);
  const auto one = DecreasingProfile::constant(1.0, geom.measure);
  for (double r : {0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    EXPECT_NEAR(radial_potential(one, geom, fp, r), 0.5 * std::sqrt(1 - r * r), 1e-7) << r;
  }
}

TEST(RadialPotential, CenterValueMatchesPsiRepresentation) {
  std::mt19937_64 gen(8);
  for (int N : {2, 3}) {
    const BallGeometry geom(N, 1.0);
    const FracParams fp(N == 2 ? 0.7 : 1.3);
    for (int trial = 0; trial < 5; ++trial) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> s{0.0}, v;
      double level = 2.0;
      for (int b = 0; b < 4; ++b) {
        s.push_back(geom.measure * (b + 1) / 4.0 * (b < 3 ? 0.5 + 0.5 * u(gen) : 1.0));
        level *= u(gen);
        v.push_back(level);
      }
      std::sort(s.begin(), s.end());
      s.back() = geom.measure;
      const DecreasingProfile f(s, v);
      const double direct = radial_potential(f, geom, fp, 0.0);
      const double via_psi = center_value_via_psi(f, geom, fp);
      EXPECT_NEAR(direct, via_psi, 1e-6 * std::max(1.0, via_psi));
      EXPECT_LE(direct, linfty_bound(f, geom, fp) * (1 + 1e-9));
      double prev = INFINITY;
      for (double r = 0.0; r < 0.95; r += 0.19) {
        const double val = radial_potential(f, geom, fp, r);
        EXPECT_LE(val, prev + 1e-9);
        EXPECT_GE(val, 0.0);
        prev = val;
      }
    }
  }
}

TEST(LinftyBound, IndicatorClosedForm) {
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.0);
  EXPECT_EQ(linfty_bound(DecreasingProfile::constant(0.0, geom.measure), geom, fp), 0.0);
  const double m = 0.4 * geom.measure;
  const auto k = green_bound_constants(geom, fp);
  const double omega = 4.0 * kPi / 3.0;
  EXPECT_NEAR(linfty_bound(DecreasingProfile::indicator(m, geom.measure), geom, fp),
              k.a * k.b * std::pow(omega, 2.0 / 3.0) * 3.0 * std::pow(m, 1.0 / 3.0), 1e-13);
}

TEST(LinftyBound, WeakNormFactorIsNeeded) {
  // f = indicator of a centered ball of measure m: phi(0) = \int_{|y|<rho} K(0,y) dy
  // exceeds a b ||f||_{N/alpha,1} once omega_N > 1, and the weak-norm factor restores the bound.
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.0);
  const auto k = green_bound_constants(geom, fp);
  const auto f = DecreasingProfile::indicator(0.05 * geom.measure, geom.measure);
  const double phi0 = radial_potential(f, geom, fp, 0.0);
  EXPECT_GT(phi0, k.a * k.b * lorentz_norm(f, {3.0, 1.0}));
  EXPECT_LE(phi0, linfty_bound(f, geom, fp));
}

TEST(BestConstant, ClosedFormReproduction) {
  const BallGeometry geom(3, 1.0);
  const FracParams fp(1.0);
  for (double p : {4.0, 6.0, 10.0, 3.5, 25.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double c = best_constant(geom, fp, p);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(std::abs(c / best_constant_n3_alpha1(p) - 1.0), 1e-8) << p;
    EXPECT_LT(secs, 1.0);
  }
  EXPECT_NEAR(best_constant_n3_alpha1(4.0), 0.70645077285949247865, 1e-13);
  EXPECT_NEAR(best_constant_n3_alpha1(6.0), 0.549241353959536689, 1e-13);
  EXPECT_NEAR(best_constant_n3_alpha1(10.0), 0.511272860587400551, 1e-13);
  // p -> infinity: the L^1 norm of psi, which is 1/2 here.
  EXPECT_NEAR(best_constant(geom, fp, INFINITY), 0.5, 1e-9);
  EXPECT_THROW(best_constant(geom, fp, 3.0), divergence_error);
}

TEST(BestConstant, ContinuousInP) {
  // C(p) blows up as p -> N/alpha; check finiteness and a smooth second difference.
  const BallGeometry geom(2, 1.0);
  const FracParams fp(0.8);
  const double p_crit = 2.0 / 0.8;
  for (double p = p_crit + 0.11; p < 20.0; p += 0.5) {
    const double h = 0.05 * (p - p_crit);
    const double c = best_constant(geom, fp, p);
    const double lo = best_constant(geom, fp, p - h);
    const double hi = best_constant(geom, fp, p + h);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
    EXPECT_LT(std::abs(c - 0.5 * (lo + hi)), 0.01 * c) << p;
  }
}
