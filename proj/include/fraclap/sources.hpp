#pragma once

// Smooth nonnegative test sources with the derivative bounds that the
// comparison harness turns into sampling-error budgets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

/// A source f with |grad f| available pointwise and a global bound on the
/// operator norm of its Hessian.
struct Source {
  std::function<double(const Point&)> value;
  std::function<double(const Point&)> gradient_norm;
  double hessian_bound = 0.0;
  std::string description;

  double operator()(const Point& x) const { return value(x); }

  static Source zero() {
    return {[](const Point&) { return 0.0; }, [](const Point&) { return 0.0; }, 0.0, "zero"};
  }

  /// h exp(-|x-c|^2 / (2 sigma^2)) restricted to the domain.
  static Source gaussian(const Point& c, double sigma, double h, int N) {
    if (!(sigma > 0.0)) throw domain_error("Source::gaussian: sigma must be > 0");
    auto d2 = [c, N](const Point& x) {
      double s = 0.0;
      for (int i = 0; i < N; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
      return s;
    };
    const double inv = 1.0 / (2.0 * sigma * sigma);
    char buf[160];
    std::snprintf(buf, sizeof buf, "gaussian(c=(%.6g,%.6g,%.6g),sigma=%.6g,h=%.6g)", c[0], c[1], c[2], sigma, h);
    return {[=](const Point& x) { return h * std::exp(-d2(x) * inv); },
            [=](const Point& x) {
              const double r2 = d2(x);
              return h * std::exp(-r2 * inv) * std::sqrt(r2) / (sigma * sigma);
            },
            h / (sigma * sigma), buf};
  }
};

struct Bump {
  Point center{0.0, 0.0, 0.0};
  double width = 1.0;
  double height = 1.0;
};

/// f(x) = sum_b h_b (1 - |x - c_b|^2 / w_b^2)^3_+, a C^2 function.
class BumpSource {
 public:
  BumpSource(int N, std::vector<Bump> bumps) : N_(N), bumps_(std::move(bumps)) {
    for (const auto& b : bumps_) {
      if (!(b.width > 0.0) || !(b.height >= 0.0)) throw domain_error("BumpSource: need width > 0, height >= 0");
    }
  }

  /// Seeded corpus member for a domain: 1 to 3 bumps with heights in [0.5, 1.5),
  /// supported at distance >= 5% of the component size from the boundary.
  /// On a ball every bump is centred, so the source is radially decreasing.
  static BumpSource random(const DomainSpec& d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
    const int count = 1 + static_cast<int>(3.0 * uniform());
    std::vector<Bump> bumps;
    for (int n = 0; n < count; ++n) {
      Bump b;
      switch (d.kind) {
        case DomainKind::interval_union: {
          const auto comp = std::min(d.intervals.size() - 1,
                                     static_cast<std::size_t>(uniform() * static_cast<double>(d.intervals.size())));
          const auto [a, e] = d.intervals[comp];
          const double len = e - a;
          b.width = len * (0.15 + 0.2 * uniform());
          const double lo = a + b.width + 0.05 * len;
          const double hi = e - b.width - 0.05 * len;
          b.center[0] = lo + (hi - lo) * uniform();
          break;
        }
        case DomainKind::rectangle: {
          const double m = std::min(d.sides[0], d.sides[1]);
          b.width = m * (0.1 + 0.15 * uniform());
          for (int i = 0; i < 2; ++i) {
            const double lo = b.width + 0.05 * m;
            const double hi = d.sides[i] - b.width - 0.05 * m;
            b.center[i] = lo + (hi - lo) * uniform();
          }
          break;
        }
        case DomainKind::ball:
          b.width = d.ball.R * (0.3 + 0.5 * uniform());
          break;
      }
      b.height = 0.5 + uniform();
      bumps.push_back(b);
    }
    return BumpSource(d.N, std::move(bumps));
  }

  double operator()(const Point& x) const {
    double s = 0.0;
    for (const auto& b : bumps_) {
      const double q = dist2(x, b) / (b.width * b.width);
      if (q < 1.0) s += b.height * (1.0 - q) * (1.0 - q) * (1.0 - q);
    }
    return s;
  }

  /// |grad f(x)|, from grad h(1-q)^3 = -6 h (1-q)^2 (x-c) / w^2.
  double gradient_norm(const Point& x) const {
    Point g{0.0, 0.0, 0.0};
    for (const auto& b : bumps_) {
      const double w2 = b.width * b.width;
      const double q = dist2(x, b) / w2;
      if (q >= 1.0) continue;
      const double f = -6.0 * b.height * (1.0 - q) * (1.0 - q) / w2;
      for (int i = 0; i < N_; ++i) g[i] += f * (x[i] - b.center[i]);
    }
    return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  }

  /// sup ||D^2 f|| <= sum 8 h / w^2, since ||D^2 (1-q)^3|| <= 6 (1-q)(1+3q) / w^2 <= 8 / w^2.
  double hessian_bound() const {
    double s = 0.0;
    for (const auto& b : bumps_) s += 8.0 * b.height / (b.width * b.width);
    return s;
  }

  double sup_bound() const {
    double s = 0.0;
    for (const auto& b : bumps_) s += b.height;
    return s;
  }

  const std::vector<Bump>& bumps() const { return bumps_; }
  int dimension() const { return N_; }

  std::string describe() const {
    std::string out;
    char buf[160];
    for (const auto& b : bumps_) {
      if (!out.empty()) out += ';';
      if (N_ == 1) {
        std::snprintf(buf, sizeof buf, "bump(c=%.17g,w=%.17g,h=%.17g)", b.center[0], b.width, b.height);
      } else {
        std::snprintf(buf, sizeof buf, "bump(c=(%.17g,%.17g),w=%.17g,h=%.17g)", b.center[0], b.center[1],
                      b.width, b.height);
      }
      out += buf;
    }
    return out;
  }

  Source as_source() const {
    const BumpSource self = *this;
    return {[self](const Point& x) { return self(x); }, [self](const Point& x) { return self.gradient_norm(x); },
            hessian_bound(), describe()};
  }

 private:
  double dist2(const Point& x, const Bump& b) const {
    double s = 0.0;
    for (int i = 0; i < N_; ++i) s += (x[i] - b.center[i]) * (x[i] - b.center[i]);
    return s;
  }

  int N_;
  std::vector<Bump> bumps_;
};

}  // namespace fraclap
