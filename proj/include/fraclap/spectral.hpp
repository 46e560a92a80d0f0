#pragma once

// Spectral fractional Dirichlet problem on domains with explicit Laplacian
// eigenpairs: unions of intervals, rectangles and balls (radial modes only).
//
//   u = sum_k a_k phi_k,   a_k = c_k lambda_k^{-alpha/2},   c_k = (f, phi_k),
//
// together with the extension w(x,y) = sum_k a_k phi_k(x) rho(sqrt(lambda_k) y)
// and, on a ball, the same extension written in z = (y/alpha)^alpha through
// the functions H_k(z) = sqrt(z) K_{alpha/2}(alpha sqrt(lambda_k) z^{1/alpha}).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
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

enum class DomainKind { interval_union, rectangle, ball };

/// Geometry of Omega. Rectangles are [0, Lx] x [0, Ly]; balls are centred at 0.
struct DomainSpec {
  DomainKind kind = DomainKind::interval_union;
  std::vector<std::pair<double, double>> intervals;
  std::array<double, 2> sides{1.0, 1.0};
  BallGeometry ball;
  int N = 1;
  double measure = 0.0;

  static DomainSpec interval_union(std::vector<std::pair<double, double>> iv) {
    if (iv.empty()) throw domain_error("DomainSpec: at least one interval is required");
    std::sort(iv.begin(), iv.end());
    DomainSpec d;
    d.kind = DomainKind::interval_union;
    d.N = 1;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      if (!(iv[i].second > iv[i].first)) throw domain_error("DomainSpec: intervals need b > a");
      if (i > 0 && iv[i].first < iv[i - 1].second) {
        throw domain_error("DomainSpec: intervals must be pairwise disjoint");
      }
      d.measure += iv[i].second - iv[i].first;
    }
    d.intervals = std::move(iv);
    return d;
  }

  static DomainSpec rectangle(double lx, double ly) {
    if (!(lx > 0.0 && ly > 0.0)) throw domain_error("DomainSpec: rectangle sides must be > 0");
    DomainSpec d;
    d.kind = DomainKind::rectangle;
    d.N = 2;
    d.sides = {lx, ly};
    d.measure = lx * ly;
    return d;
  }

  static DomainSpec unit_square() { return rectangle(1.0, 1.0); }

  static DomainSpec make_ball(const BallGeometry& g) {
    DomainSpec d;
    d.kind = DomainKind::ball;
    d.N = g.N;
    d.ball = g;
    d.measure = g.measure;
    return d;
  }

  /// The ball Omega^# centred at 0 with |Omega^#| = |Omega|.
  BallGeometry symmetrized() const { return BallGeometry::with_measure(N, measure); }

  bool contains(const Point& x) const {
    switch (kind) {
      case DomainKind::interval_union:
        for (const auto& [a, b] : intervals) {
          if (x[0] > a && x[0] < b) return true;
        }
        return false;
      case DomainKind::rectangle:
        return x[0] > 0.0 && x[0] < sides[0] && x[1] > 0.0 && x[1] < sides[1];
      case DomainKind::ball: {
        double r2 = 0.0;
        for (int i = 0; i < N; ++i) r2 += x[i] * x[i];
        return r2 < ball.R * ball.R;
      }
    }
    return false;
  }
};

/// One Dirichlet eigenpair. Interval unions: (i, j) = (component, sine index);
/// rectangles: (i, j) = sine indices in x and y; balls: i = radial index, theta = i-th zero.
struct Mode {
  double lambda = 0.0;
  int i = 0;
  int j = 0;
  double theta = 0.0;
  double scale = 1.0;  // normalisation constant of phi_k
};

class EigenBasis {
 public:
  EigenBasis() = default;
  EigenBasis(DomainSpec domain, std::vector<Mode> modes)
      : domain_(std::move(domain)), modes_(std::move(modes)) {}

  const DomainSpec& domain() const { return domain_; }
  const std::vector<Mode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  double eigenvalue(std::size_t k) const { return modes_[k].lambda; }

  /// (N-2)/2 for the ball basis.
  double bessel_order() const { return 0.5 * (domain_.N - 2); }

  /// X_k(r) for the ball basis.
  double radial_value(std::size_t k, double r) const {
    const Mode& m = modes_[k];
    const double R = domain_.ball.R;
    if (r >= R) return 0.0;
    const double a = m.theta / R;
    if (domain_.N == 1) return m.scale * std::cos(a * r);
    const double nu = bessel_order();
    if (r == 0.0) return m.scale * std::pow(0.5 * a, nu) / specfun::gamma_fn(nu + 1.0);
    return m.scale * std::pow(r, -nu) * specfun::bessel_j(nu, a * r);
  }

  double value(std::size_t k, const Point& x) const {
    const Mode& m = modes_[k];
    switch (domain_.kind) {
      case DomainKind::interval_union: {
        const auto [a, b] = domain_.intervals[m.i];
        if (!(x[0] > a && x[0] < b)) return 0.0;
        return m.scale * std::sin(m.j * std::numbers::pi * (x[0] - a) / (b - a));
      }
      case DomainKind::rectangle: {
        if (!domain_.contains(x)) return 0.0;
        const double pi = std::numbers::pi;
        return m.scale * std::sin(m.i * pi * x[0] / domain_.sides[0]) *
               std::sin(m.j * pi * x[1] / domain_.sides[1]);
      }
      case DomainKind::ball: {
        double r2 = 0.0;
        for (int i = 0; i < domain_.N; ++i) r2 += x[i] * x[i];
        return radial_value(k, std::sqrt(r2));
      }
    }
    return 0.0;
  }

  /// sup |phi_k|. For the ball the maximum of |X_k| is attained at r = 0.
  double sup_norm(std::size_t k) const {
    if (domain_.kind == DomainKind::ball) return std::abs(radial_value(k, 0.0));
    return modes_[k].scale;
  }

  /// Upper bound on |grad phi_k|.
  double lipschitz(std::size_t k) const {
    const Mode& m = modes_[k];
    const double pi = std::numbers::pi;
    switch (domain_.kind) {
      case DomainKind::interval_union: {
        const auto [a, b] = domain_.intervals[m.i];
        return m.scale * m.j * pi / (b - a);
      }
      case DomainKind::rectangle:
        return m.scale * std::hypot(m.i * pi / domain_.sides[0], m.j * pi / domain_.sides[1]);
      case DomainKind::ball: {
        // |d/dr r^{-nu} J_nu(a r)| = a^{nu+1} |x^{-nu} J_{nu+1}(x)|, x = a r, and
        // |x^{-nu} J_{nu+1}(x)| <= min(x / (2^{nu+1} Gamma(nu+2)), x^{-nu}) <= 1.
        const double a = m.theta / domain_.ball.R;
        if (domain_.N == 1) return m.scale * a;
        return m.scale * std::pow(a, bessel_order() + 1.0);
      }
    }
    return 0.0;
  }

 private:
  DomainSpec domain_;
  std::vector<Mode> modes_;
};

namespace spectral {

namespace detail {

inline bool mode_less(const Mode& a, const Mode& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

inline std::vector<Mode> rectangle_modes(double lx, double ly, std::size_t K) {
  const double pi = std::numbers::pi;
  const int base = static_cast<int>(2.0 * std::ceil(std::sqrt(static_cast<double>(K)))) + 8;
  int mx = std::max(64, static_cast<int>(std::ceil(base * std::max(1.0, lx / ly))));
  int my = std::max(64, static_cast<int>(std::ceil(base * std::max(1.0, ly / lx))));
  for (;;) {
    std::vector<Mode> all;
    all.reserve(static_cast<std::size_t>(mx) * my);
    for (int i = 1; i <= mx; ++i) {
      for (int j = 1; j <= my; ++j) {
        Mode m;
        m.i = i;
        m.j = j;
        m.lambda = (i * pi / lx) * (i * pi / lx) + (j * pi / ly) * (j * pi / ly);
        m.scale = 2.0 / std::sqrt(lx * ly);
        all.push_back(m);
      }
    }
    std::sort(all.begin(), all.end(), mode_less);
    // Every mode outside the raw box has lambda above this threshold.
    const double outside = std::min(std::pow((mx + 1) * pi / lx, 2), std::pow((my + 1) * pi / ly, 2));
    if (all.size() >= K && all[K - 1].lambda < outside) {
      all.resize(K);
      return all;
    }
    mx *= 2;
    my *= 2;
  }
}

}  // namespace detail

/// First K Dirichlet eigenpairs of -Delta on the domain, sorted by eigenvalue.
/// On a ball only radial eigenfunctions are produced.
inline EigenBasis build_basis(const DomainSpec& domain, std::size_t K) {
  if (K < 1) throw domain_error("build_basis: K must be >= 1");
  const double pi = std::numbers::pi;
  std::vector<Mode> modes;
  switch (domain.kind) {
    case DomainKind::interval_union: {
      for (std::size_t c = 0; c < domain.intervals.size(); ++c) {
        const double len = domain.intervals[c].second - domain.intervals[c].first;
        for (std::size_t j = 1; j <= K; ++j) {
          Mode m;
          m.i = static_cast<int>(c);
          m.j = static_cast<int>(j);
          m.lambda = std::pow(static_cast<double>(j) * pi / len, 2);
          m.scale = std::sqrt(2.0 / len);
          modes.push_back(m);
        }
      }
      std::sort(modes.begin(), modes.end(), detail::mode_less);
      modes.resize(K);
      break;
    }
    case DomainKind::rectangle:
      modes = detail::rectangle_modes(domain.sides[0], domain.sides[1], K);
      break;
    case DomainKind::ball: {
      const int N = domain.N;
      const double R = domain.ball.R;
      std::vector<double> zeros;
      if (N == 1) {
        for (std::size_t k = 1; k <= K; ++k) zeros.push_back((static_cast<double>(k) - 0.5) * pi);
      } else {
        zeros = specfun::bessel_j_zeros(0.5 * (N - 2), static_cast<int>(K));
      }
      const double pref = std::sqrt(2.0 / (N * domain.ball.omega_N));
      for (std::size_t k = 0; k < K; ++k) {
        Mode m;
        m.i = static_cast<int>(k + 1);
        m.theta = zeros[k];
        m.lambda = std::pow(zeros[k] / R, 2);
        m.scale = N == 1 ? 1.0 / std::sqrt(R)
                         : pref / (R * std::abs(specfun::bessel_j(0.5 * N, zeros[k])));
        modes.push_back(m);
      }
      break;
    }
  }
  return EigenBasis(domain, std::move(modes));
}

/// c_k = (f, phi_k) for a callable f(Point) by composite Gauss quadrature.
/// Ball bases treat f as radial and read f({r, 0, 0}).
template <class F>
std::vector<double> fourier_coefficients(const F& f, const EigenBasis& basis) {
  const DomainSpec& d = basis.domain();
  const std::size_t K = basis.size();
  std::vector<double> c(K, 0.0);
  constexpr std::size_t kOrder = 8;
  switch (d.kind) {
    case DomainKind::interval_union: {
      int jmax = 1;
      for (const auto& m : basis.modes()) jmax = std::max(jmax, m.j);
      const std::size_t panels = std::max<std::size_t>(64, 2 * static_cast<std::size_t>(jmax));
      std::vector<quad::Rule> rules;
      std::vector<std::vector<double>> fv;
      for (const auto& [a, b] : d.intervals) {
        rules.push_back(quad::composite_gauss(a, b, panels, kOrder));
        std::vector<double> vals;
        for (double x : rules.back().nodes) vals.push_back(f(Point{x, 0.0, 0.0}));
        fv.push_back(std::move(vals));
      }
      for (std::size_t k = 0; k < K; ++k) {
        const Mode& m = basis.modes()[k];
        const auto& rule = rules[m.i];
        double s = 0.0;
        for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
          s += rule.weights[n] * fv[m.i][n] * basis.value(k, Point{rule.nodes[n], 0.0, 0.0});
        }
        c[k] = s;
      }
      break;
    }
    case DomainKind::rectangle: {
      int imax = 1;
      int jmax = 1;
      for (const auto& m : basis.modes()) {
        imax = std::max(imax, m.i);
        jmax = std::max(jmax, m.j);
      }
      const double lx = d.sides[0];
      const double ly = d.sides[1];
      const auto rx = quad::composite_gauss(0.0, lx, std::max<std::size_t>(128, 2 * imax), kOrder);
      const auto ry = quad::composite_gauss(0.0, ly, std::max<std::size_t>(128, 2 * jmax), kOrder);
      const std::size_t nx = rx.nodes.size();
      const std::size_t ny = ry.nodes.size();
      const double pi = std::numbers::pi;
      // T[i][y] = sum_x w_x sin(i pi x / lx) f(x, y)
      std::vector<double> fvals(nx * ny);
      for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) fvals[ix * ny + iy] = f(Point{rx.nodes[ix], ry.nodes[iy], 0.0});
      }
      std::vector<double> T(static_cast<std::size_t>(imax) * ny, 0.0);
      for (int i = 1; i <= imax; ++i) {
        double* row = &T[static_cast<std::size_t>(i - 1) * ny];
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double w = rx.weights[ix] * std::sin(i * pi * rx.nodes[ix] / lx);
          const double* fr = &fvals[ix * ny];
          for (std::size_t iy = 0; iy < ny; ++iy) row[iy] += w * fr[iy];
        }
      }
      std::vector<double> sy(static_cast<std::size_t>(jmax) * ny);
      for (int j = 1; j <= jmax; ++j) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
          sy[static_cast<std::size_t>(j - 1) * ny + iy] = ry.weights[iy] * std::sin(j * pi * ry.nodes[iy] / ly);
        }
      }
      for (std::size_t k = 0; k < K; ++k) {
        const Mode& m = basis.modes()[k];
        const double* row = &T[static_cast<std::size_t>(m.i - 1) * ny];
        const double* col = &sy[static_cast<std::size_t>(m.j - 1) * ny];
        double s = 0.0;
        for (std::size_t iy = 0; iy < ny; ++iy) s += row[iy] * col[iy];
        c[k] = m.scale * s;
      }
      break;
    }
    case DomainKind::ball: {
      const int N = d.N;
      const auto rule = quad::composite_gauss(0.0, d.ball.R, std::max<std::size_t>(64, 2 * K), kOrder);
      const double area = N * d.ball.omega_N;
      std::vector<double> g(rule.nodes.size());
      for (std::size_t n = 0; n < g.size(); ++n) {
        const double r = rule.nodes[n];
        g[n] = area * rule.weights[n] * std::pow(r, N - 1) * f(Point{r, 0.0, 0.0});
      }
      for (std::size_t k = 0; k < K; ++k) {
        double s = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) s += g[n] * basis.radial_value(k, rule.nodes[n]);
        c[k] = s;
      }
      break;
    }
  }
  return c;
}

/// c_k of the Schwarz symmetrization f#(x) = fstar(omega_N |x|^N) on the ball
/// basis, integrated exactly block by block with
///   \int r^{N/2} J_{(N-2)/2}(a r) dr = r^{N/2} J_{N/2}(a r) / a.
inline std::vector<double> fourier_coefficients(const DecreasingProfile& fstar, const EigenBasis& basis) {
  const DomainSpec& d = basis.domain();
  if (d.kind != DomainKind::ball) {
    throw mismatch_error("fourier_coefficients: a radial profile needs a ball basis");
  }
  if (std::abs(fstar.domain_measure() - d.measure) > 1e-9 * d.measure) {
    throw mismatch_error("fourier_coefficients: profile measure differs from |ball|");
  }
  const int N = d.N;
  const double R = d.ball.R;
  const auto& bp = fstar.breakpoints();
  const auto& v = fstar.values();
  // Only breakpoints where the profile jumps contribute.
  std::vector<double> radii;
  std::vector<double> jumps;
  for (std::size_t b = 0; b < v.size(); ++b) {
    const double next = b + 1 < v.size() ? v[b + 1] : 0.0;
    const double jump = v[b] - next;
    if (jump == 0.0) continue;
    const double r = b + 1 < v.size() ? std::min(R, std::pow(bp[b + 1] / d.ball.omega_N, 1.0 / N)) : R;
    radii.push_back(r);
    jumps.push_back(jump);
  }
  const double area = N * d.ball.omega_N;
  std::vector<double> c(basis.size(), 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Mode& m = basis.modes()[k];
    const double a = m.theta / R;
    double s = 0.0;
    for (std::size_t n = 0; n < radii.size(); ++n) {
      const double r = radii[n];
      const double F = N == 1 ? std::sin(a * r) / a
                              : std::pow(r, 0.5 * N) * specfun::bessel_j(0.5 * N, a * r) / a;
      s += jumps[n] * F;
    }
    c[k] = area * m.scale * s;
  }
  return c;
}

/// Decay-fit estimate of the truncation tail sum_{k>K} a_k phi_k.
struct TailEstimate {
  double sup = 0.0;    // bound on sup |tail|
  double l2 = 0.0;     // bound on ||tail||_{L^2}
  double l1 = 0.0;     // |Omega|^{1/2} * l2
  double decay = 0.0;  // fitted exponent p of |a_k| sup|phi_k| ~ C k^{-p}
  bool at_noise_floor = false;
};

namespace detail {

// Fits env_k <= C k^{-p} on k in [K/4, K], where env is the nonincreasing
// majorant of t (running maximum from the right). The intercept is raised so
// the line majorizes the envelope on the fit range. Returns false when the
// envelope vanishes identically there.
inline bool power_fit(const std::vector<double>& t, double& C, double& p) {
  const std::size_t K = t.size();
  std::vector<double> env(K);
  double run = 0.0;
  for (std::size_t k = K; k-- > 0;) {
    run = std::max(run, std::abs(t[k]));
    env[k] = run;
  }
  const std::size_t lo = std::max<std::size_t>(1, K / 4);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = lo; k <= K; ++k) {
    const double e = env[k - 1];
    if (!(e > std::numeric_limits<double>::min())) continue;
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return false;
  const double den = n * sxx - sx * sx;
  p = den > 0.0 ? -(n * sxy - sx * sy) / den : 0.0;
  double logC = -std::numeric_limits<double>::infinity();
  for (std::size_t k = lo; k <= K; ++k) {
    const double e = env[k - 1];
    if (!(e > std::numeric_limits<double>::min())) continue;
    logC = std::max(logC, std::log(e) + p * std::log(static_cast<double>(k)));
  }
  C = std::exp(logC);
  return true;
}

}  // namespace detail

/// Tail estimate from coefficients a_k, mode sup norms and |Omega|.
/// Fields are +inf when the coefficients decay too slowly for the fitted
/// power law to be summable.
inline TailEstimate estimate_tail(const std::vector<double>& a, const std::vector<double>& sup_phi,
                                  double measure) {
  TailEstimate t;
  const std::size_t K = a.size();
  std::vector<double> ts(K);
  double amax = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    ts[k] = std::abs(a[k]) * sup_phi[k];
    amax = std::max(amax, ts[k]);
  }
  const std::size_t lo = std::max<std::size_t>(1, K / 4);
  double fit_max = 0.0;
  double fit_max2 = 0.0;
  for (std::size_t k = lo; k <= K; ++k) {
    fit_max = std::max(fit_max, ts[k - 1]);
    fit_max2 = std::max(fit_max2, std::abs(a[k - 1]));
  }
  if (fit_max <= 1e-13 * amax || K < 8) {
    t.at_noise_floor = fit_max <= 1e-13 * amax;
    if (t.at_noise_floor) {
      t.sup = static_cast<double>(K) * fit_max;
      t.l2 = std::sqrt(static_cast<double>(K)) * fit_max2;
      t.l1 = std::sqrt(measure) * t.l2;
      return t;
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double C = 0.0, p = 0.0;
  if (K < 8 || !detail::power_fit(ts, C, p)) {
    t.sup = t.l2 = t.l1 = kInf;
    return t;
  }
  t.decay = p;
  const double Kd = static_cast<double>(K);
  t.sup = p > 1.0 ? C * std::pow(Kd, 1.0 - p) / (p - 1.0) : kInf;
  double C2 = 0.0, q = 0.0;
  if (detail::power_fit(a, C2, q) && q > 0.5) {
    t.l2 = C2 * std::pow(Kd, 0.5 - q) / std::sqrt(2.0 * q - 1.0);
  } else {
    t.l2 = kInf;
  }
  t.l1 = std::sqrt(measure) * t.l2;
  return t;
}

inline std::vector<double> sup_norms(const EigenBasis& basis) {
  std::vector<double> s(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) s[k] = basis.sup_norm(k);
  return s;
}

}  // namespace spectral

/// u = sum_k a_k phi_k with its truncation tail estimate.
struct SpectralSolution {
  EigenBasis basis;
  std::vector<double> coeffs;
  FracParams fp;
  spectral::TailEstimate tail;

  double operator()(const Point& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * basis.value(k, x);
    return s;
  }

  /// Radial evaluation on a ball basis.
  double radial(double r) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * basis.radial_value(k, r);
    return s;
  }

  /// Same basis and order with new coefficients; the tail is re-estimated.
  SpectralSolution with_coeffs(std::vector<double> a) const {
    SpectralSolution out{basis, std::move(a), fp, {}};
    out.tail = spectral::estimate_tail(out.coeffs, spectral::sup_norms(basis), basis.domain().measure);
    return out;
  }
};

namespace spectral {

/// a_k = c_k lambda_k^{-alpha/2}.
inline SpectralSolution solve_fractional_dirichlet(const std::vector<double>& c, const EigenBasis& basis,
                                                   const FracParams& fp) {
  if (c.size() != basis.size()) throw mismatch_error("solve_fractional_dirichlet: coefficient count != K");
  std::vector<double> a(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) a[k] = c[k] * std::pow(basis.eigenvalue(k), -0.5 * fp.alpha);
  SpectralSolution u{basis, std::move(a), fp, {}};
  u.tail = estimate_tail(u.coeffs, sup_norms(basis), basis.domain().measure);
  return u;
}

template <class F>
SpectralSolution solve_fractional_dirichlet(const F& f, const EigenBasis& basis, const FracParams& fp) {
  return solve_fractional_dirichlet(fourier_coefficients(f, basis), basis, fp);
}

inline SpectralSolution solve_fractional_dirichlet(const DecreasingProfile& fstar, const EigenBasis& basis,
                                                   const FracParams& fp) {
  return solve_fractional_dirichlet(fourier_coefficients(fstar, basis), basis, fp);
}

/// Coefficients a_k lambda_k^{alpha/2} of (-Delta)^{alpha/2} u.
inline std::vector<double> apply_fractional_laplacian(const SpectralSolution& u) {
  std::vector<double> out(u.coeffs.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = u.coeffs[k] * std::pow(u.basis.eigenvalue(k), 0.5 * u.fp.alpha);
  }
  return out;
}

/// rho(s) = 2^{1-alpha/2} / Gamma(alpha/2) * s^{alpha/2} K_{alpha/2}(s):
/// the decaying solution of rho'' + ((1-alpha)/s) rho' = rho with rho(0) = 1.
inline double rho_profile(double s, const FracParams& fp) {
  if (!(s >= 0.0)) throw domain_error("rho_profile: s must be >= 0");
  if (s == 0.0) return 1.0;
  const double nu = 0.5 * fp.alpha;
  const double k = specfun::bessel_k(nu, s);
  if (k == 0.0) return 0.0;
  return std::pow(2.0, 1.0 - nu) / specfun::gamma_fn(nu) * std::pow(s, nu) * k;
}

/// rho'(s) = -2^{1-alpha/2} / Gamma(alpha/2) * s^{alpha/2} K_{1-alpha/2}(s);
/// s^{1-alpha} rho'(s) -> -kappa_alpha as s -> 0.
inline double rho_derivative(double s, const FracParams& fp) {
  if (!(s >= 0.0)) throw domain_error("rho_derivative: s must be >= 0");
  const double nu = 0.5 * fp.alpha;
  if (s == 0.0) {
    if (fp.alpha < 1.0) return -std::numeric_limits<double>::infinity();
    return fp.alpha == 1.0 ? -fp.kappa : 0.0;
  }
  const double k = specfun::bessel_k(1.0 - nu, s);
  if (k == 0.0) return 0.0;
  return -std::pow(2.0, 1.0 - nu) / specfun::gamma_fn(nu) * std::pow(s, nu) * k;
}

/// w(x, y) = sum_k a_k phi_k(x) rho(sqrt(lambda_k) y).
class ExtensionField {
 public:
  explicit ExtensionField(SpectralSolution u) : u_(std::move(u)) {}

  /// The trace of w at height y as a spectral expansion. Its tail bound is
  /// rho(sqrt(lambda_K) y) times the tail of u, since rho is decreasing.
  SpectralSolution slice(double y) const {
    if (!(y >= 0.0)) throw domain_error("ExtensionField: y must be >= 0");
    SpectralSolution s = u_;
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
      s.coeffs[k] *= rho_profile(std::sqrt(s.basis.eigenvalue(k)) * y, s.fp);
    }
    const double damp = rho_profile(std::sqrt(s.basis.eigenvalue(s.coeffs.size() - 1)) * y, s.fp);
    s.tail.sup *= damp;
    s.tail.l2 *= damp;
    s.tail.l1 *= damp;
    return s;
  }

  double operator()(const Point& x, double y) const {
    if (!(y >= 0.0)) throw domain_error("ExtensionField: y must be >= 0");
    double s = 0.0;
    for (std::size_t k = 0; k < u_.coeffs.size(); ++k) {
      s += u_.coeffs[k] * u_.basis.value(k, x) * rho_profile(std::sqrt(u_.basis.eigenvalue(k)) * y, u_.fp);
    }
    return s;
  }

  const SpectralSolution& trace() const { return u_; }

 private:
  SpectralSolution u_;
};

inline ExtensionField extension_field(const SpectralSolution& u) { return ExtensionField(u); }

/// H_k(z) = sqrt(z) K_{alpha/2}(alpha sqrt(lambda) z^{1/alpha}), with the
/// z -> 0 limit 2^{alpha/2-1} Gamma(alpha/2) (alpha sqrt(lambda))^{-alpha/2}.
inline double H_function(double z, double lambda, const FracParams& fp) {
  if (!(z >= 0.0)) throw domain_error("H_function: z must be >= 0");
  const double a = fp.alpha;
  const double g = a * std::sqrt(lambda);
  if (z == 0.0) return std::pow(2.0, 0.5 * a - 1.0) * specfun::gamma_fn(0.5 * a) * std::pow(g, -0.5 * a);
  return std::sqrt(z) * specfun::bessel_k(0.5 * a, g * std::pow(z, 1.0 / a));
}

/// H_k'(z) = -z^{(1-beta)/2} sqrt(lambda) K_{1-alpha/2}(alpha sqrt(lambda) z^{1/alpha}),
/// (1-beta)/2 = (2-alpha)/(2 alpha). At z = 0 the small-argument form
/// K_nu(t) ~ 2^{nu-1} Gamma(nu) t^{-nu} gives
///   H_k'(0) = -2^{-alpha/2} Gamma(1-alpha/2) alpha^{alpha/2-1} lambda^{alpha/4}.
inline double H_derivative(double z, double lambda, const FracParams& fp) {
  if (!(z >= 0.0)) throw domain_error("H_derivative: z must be >= 0");
  const double a = fp.alpha;
  if (z == 0.0) {
    return -std::pow(2.0, -0.5 * a) * specfun::gamma_fn(1.0 - 0.5 * a) * std::pow(a, 0.5 * a - 1.0) *
           std::pow(lambda, 0.25 * a);
  }
  const double g = a * std::sqrt(lambda);
  return -std::pow(z, (2.0 - a) / (2.0 * a)) * std::sqrt(lambda) *
         specfun::bessel_k(1.0 - 0.5 * a, g * std::pow(z, 1.0 / a));
}

/// v(r, z) = sum_k C_k H_k(z) X_k(r) on the ball, with C_k from
///   C_k H_k'(0) = -alpha^{alpha-1} kappa_alpha c_k,
/// which is the Neumann condition written with the ball Fourier coefficients
/// c_k of f#. The resulting trace sum_k C_k H_k(0) X_k equals the spectral
/// solution; construction fails if that identity is violated.
class SeparatedExtension {
 public:
  SeparatedExtension(EigenBasis basis, std::vector<double> c, std::vector<double> C, FracParams fp,
                     spectral::TailEstimate tail)
      : basis_(std::move(basis)), c_(std::move(c)), C_(std::move(C)), fp_(fp), tail_(tail) {}

  double operator()(double r, double z) const {
    double s = 0.0;
    for (std::size_t k = 0; k < C_.size(); ++k) {
      s += C_[k] * H_function(z, basis_.eigenvalue(k), fp_) * basis_.radial_value(k, r);
    }
    return s;
  }

  /// Equivalent physical height y = alpha z^{1/alpha}.
  static double height_from_z(double z, const FracParams& fp) { return fp.alpha * std::pow(z, 1.0 / fp.alpha); }
  static double z_from_height(double y, const FracParams& fp) { return std::pow(y / fp.alpha, fp.alpha); }

  const EigenBasis& basis() const { return basis_; }
  const std::vector<double>& source_coeffs() const { return c_; }
  const std::vector<double>& C() const { return C_; }
  /// Tail of the trace expansion; at z > 0 each term is damped further.
  const spectral::TailEstimate& tail() const { return tail_; }

 private:
  EigenBasis basis_;
  std::vector<double> c_;
  std::vector<double> C_;
  FracParams fp_;
  spectral::TailEstimate tail_;
};

inline SeparatedExtension ball_extension_separated(const DecreasingProfile& fstar, const BallGeometry& geom,
                                                   const FracParams& fp, std::size_t K,
                                                   double tail_tol = std::numeric_limits<double>::infinity()) {
  EigenBasis basis = build_basis(DomainSpec::make_ball(geom), K);
  std::vector<double> c = fourier_coefficients(fstar, basis);
  const double lead = std::pow(fp.alpha, fp.alpha - 1.0) * fp.kappa;
  std::vector<double> C(K);
  std::vector<double> a(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double lambda = basis.eigenvalue(k);
    C[k] = -lead * c[k] / H_derivative(0.0, lambda, fp);
    a[k] = c[k] * std::pow(lambda, -0.5 * fp.alpha);
    const double trace = C[k] * H_function(0.0, lambda, fp);
    if (std::abs(trace - a[k]) > 1e-10 * std::abs(a[k]) + 1e-300) {
      throw mismatch_error("ball_extension_separated: C_k H_k(0) disagrees with a_k");
    }
  }
  auto tail = estimate_tail(a, sup_norms(basis), geom.measure);
  if (tail.sup > tail_tol) {
    throw convergence_error("ball_extension_separated: K exhausted before the tail tolerance was met",
                            tail.sup);
  }
  return SeparatedExtension(std::move(basis), std::move(c), std::move(C), fp, tail);
}

}  // namespace spectral
}  // namespace fraclap
