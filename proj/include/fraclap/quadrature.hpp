#pragma once

// Quadrature rules used throughout the library: fixed Gauss-Legendre rules,
// globally adaptive Gauss-Kronrod (7/15) and tanh-sinh for integrands with
// algebraic or logarithmic endpoint singularities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"

namespace fraclap::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
inline Rule gauss_legendre(std::size_t n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Composite Gauss-Legendre rule on [a, b]: `panels` equal panels with
/// `order` points each.
inline Rule composite_gauss(double a, double b, std::size_t panels, std::size_t order) {
  const Rule ref = gauss_legendre(order);
  Rule out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    for (std::size_t i = 0; i < order; ++i) {
      out.nodes.push_back(lo + 0.5 * h * (ref.nodes[i] + 1.0));
      out.weights.push_back(0.5 * h * ref.weights[i]);
    }
  }
  return out;
}

namespace detail {

// Kronrod 15-point extension of the 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 quadrature of f over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
template <class F>
Result adaptive(F&& f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-12,
                std::size_t max_segments = 2000) {
  Result res;
  if (a == b) return res;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  res.evaluations = 15;
  double total = first.value;
  double err = first.error;
  heap.push(first);
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_segments) {
      throw convergence_error("adaptive quadrature: segment limit reached", err);
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the pieces to avoid drift from the running updates.
  total = 0.0;
  err = 0.0;
  std::vector<detail::Segment> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& s : pieces) {
    total += s.value;
    err += s.error;
  }
  res.value = total;
  res.error = err;
  return res;
}

/// Tanh-sinh (double exponential) quadrature on [a, b]. The integrand is
/// never evaluated at the endpoints, so integrable endpoint singularities are
/// fine. Step halving continues until successive estimates agree to
/// max(abs_tol, rel_tol*|I|).
template <class F>
Result tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                 int max_levels = 12) {
  Result res;
  if (a == b) return res;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  // Truncate the infinite sum where the node weight underflows or the node
  // collides with an endpoint in floating point.
  const double t_max = 6.5;

  // Each side is truncated independently once its node rounds onto the
  // endpoint or its weight underflows.
  auto term = [&](double t, double& out) -> bool {
    const double s = kHalfPi * std::sinh(t);
    const double ch = std::cosh(s);
    // 1 - tanh(s) computed without cancellation.
    const double one_minus = 1.0 / (std::exp(s) * ch);
    const double w = kHalfPi * std::cosh(t) / (ch * ch);
    if (w == 0.0) return false;
    const double x_right = b - half * one_minus;
    const double x_left = a + half * one_minus;
    bool any = false;
    out = 0.0;
    if (x_left > a) {
      out += w * f(x_left);
      ++res.evaluations;
      any = true;
    }
    if (x_right < b) {
      out += w * f(x_right);
      ++res.evaluations;
      any = true;
    }
    return any;
  };

  double h = 1.0;
  double sum = f(mid) * kHalfPi;  // t = 0 term
  res.evaluations = 1;
  for (double t = h; t <= t_max; t += h) {
    double v = 0.0;
    if (!term(t, v)) break;
    sum += v;
  }
  double estimate = sum * h * half;
  double previous = estimate;
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) {
      double v = 0.0;
      if (!term(t, v)) break;
      sum += v;
    }
    estimate = sum * h * half;
    const double diff = std::abs(estimate - previous);
    if (level >= 3 && diff <= std::max(abs_tol, rel_tol * std::abs(estimate))) {
      res.value = estimate;
      res.error = diff;
      return res;
    }
    previous = estimate;
  }
  throw convergence_error("tanh-sinh quadrature did not converge",
                          std::abs(estimate - previous));
}

}  // namespace fraclap::quad
