#pragma once

// Distribution functions, decreasing and Schwarz rearrangements, Steiner
// symmetrization of slice data, concentration functionals and Lorentz norms.
//
// Functions are stored as measure-weighted cells, so every rearrangement is
// an exact sort and every integral of a step profile is a closed-form sum.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fraclap/errors.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

struct Cell {
  double measure = 0.0;
  double value = 0.0;
};

/// A function on a set of measure domain_measure, given as cells of
/// positive measure carrying constant values.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<Cell> cells, double domain_measure)
      : cells_(std::move(cells)), domain_measure_(domain_measure) {
    if (!(domain_measure_ > 0.0)) throw domain_error("SampledFunction: domain_measure must be > 0");
    double total = 0.0;
    for (const auto& c : cells_) {
      if (!(c.measure > 0.0)) throw domain_error("SampledFunction: every cell measure must be > 0");
      if (!std::isfinite(c.value)) throw domain_error("SampledFunction: cell values must be finite");
      total += c.measure;
    }
    if (std::abs(total - domain_measure_) > 1e-12 * domain_measure_) {
      throw mismatch_error("SampledFunction: cell measures do not sum to domain_measure");
    }
  }

  /// Builds the function from cells, taking the domain measure as their sum.
  static SampledFunction from_cells(std::vector<Cell> cells) {
    double total = 0.0;
    for (const auto& c : cells) total += c.measure;
    return SampledFunction(std::move(cells), total);
  }

  const std::vector<Cell>& cells() const { return cells_; }
  double domain_measure() const { return domain_measure_; }
  std::size_t size() const { return cells_.size(); }

 private:
  std::vector<Cell> cells_;
  double domain_measure_ = 0.0;
};

/// Nonincreasing nonnegative step function on (0, |Omega|); block b takes
/// value values[b] on [breakpoints[b], breakpoints[b+1]).
class DecreasingProfile {
 public:
  DecreasingProfile() = default;
  DecreasingProfile(std::vector<double> breakpoints, std::vector<double> values)
      : s_(std::move(breakpoints)), v_(std::move(values)) {
    if (s_.size() < 2 || v_.size() + 1 != s_.size()) {
      throw domain_error("DecreasingProfile: need M+1 breakpoints for M values, M >= 1");
    }
    if (s_.front() != 0.0) throw domain_error("DecreasingProfile: first breakpoint must be 0");
    for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
      if (!(s_[i + 1] > s_[i])) throw domain_error("DecreasingProfile: breakpoints must increase strictly");
    }
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!(v_[i] >= 0.0) || !std::isfinite(v_[i])) {
        throw domain_error("DecreasingProfile: values must be finite and nonnegative");
      }
      if (i > 0 && v_[i] > v_[i - 1]) throw domain_error("DecreasingProfile: values must be nonincreasing");
    }
  }

  /// Constant profile c on (0, m).
  static DecreasingProfile constant(double c, double m) { return DecreasingProfile({0.0, m}, {c}); }

  /// Indicator of (0, m) inside (0, total).
  static DecreasingProfile indicator(double m, double total) {
    if (m >= total) return constant(1.0, total);
    return DecreasingProfile({0.0, m, total}, {1.0, 0.0});
  }

  const std::vector<double>& breakpoints() const { return s_; }
  const std::vector<double>& values() const { return v_; }
  std::size_t blocks() const { return v_.size(); }
  double domain_measure() const { return s_.back(); }
  double sup() const { return v_.front(); }

  /// u*(s), right-continuous; 0 for s >= |Omega|.
  double operator()(double s) const {
    if (s < 0.0) throw domain_error("DecreasingProfile: s must be >= 0");
    if (s >= s_.back()) return 0.0;
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    return v_[static_cast<std::size_t>(it - s_.begin()) - 1];
  }

 private:
  std::vector<double> s_;
  std::vector<double> v_;
};

/// Exponents (p, q) of a Lorentz space; either may be +infinity.
struct LorentzExponents {
  double p = 2.0;
  double q = 2.0;

  LorentzExponents() = default;
  LorentzExponents(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 0.0) || !(q > 0.0)) throw domain_error("LorentzExponents: p and q must be > 0");
  }
};

/// mu_f(t) = measure of { |f| > t }.
inline double distribution_function(const SampledFunction& f, double t) {
  if (!(t >= 0.0)) throw domain_error("distribution_function: t must be >= 0");
  double m = 0.0;
  for (const auto& c : f.cells()) {
    if (std::abs(c.value) > t) m += c.measure;
  }
  return m;
}

/// Distribution function of a profile: measure of { u* > t }.
inline double distribution_function(const DecreasingProfile& u, double t) {
  if (!(t >= 0.0)) throw domain_error("distribution_function: t must be >= 0");
  const auto& v = u.values();
  std::size_t b = 0;
  while (b < v.size() && v[b] > t) ++b;
  return u.breakpoints()[b];
}

/// Decreasing rearrangement of |f|. Cells are ordered by |value| descending
/// (ties by measure ascending) and equal values are merged into one block,
/// so the result does not depend on the order of the input cells.
inline DecreasingProfile decreasing_rearrangement(const SampledFunction& f) {
  std::vector<Cell> sorted;
  sorted.reserve(f.size());
  for (const auto& c : f.cells()) sorted.push_back({c.measure, std::abs(c.value)});
  std::sort(sorted.begin(), sorted.end(), [](const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.measure < b.measure;
  });
  std::vector<double> s{0.0};
  std::vector<double> v;
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].value == sorted[i].value) acc += sorted[j++].measure;
    s.push_back(acc);
    v.push_back(sorted[i].value);
    i = j;
  }
  s.back() = f.domain_measure();
  // Forcing the last breakpoint can collapse a tiny trailing block.
  if (s.size() > 2 && !(s[s.size() - 1] > s[s.size() - 2])) {
    s.erase(s.end() - 2);
    v.pop_back();
  }
  return DecreasingProfile(std::move(s), std::move(v));
}

/// Schwarz symmetrization x -> u*(omega_N |x|^N) viewed as a radial function.
class RadialFunction {
 public:
  RadialFunction(DecreasingProfile profile, int N) : profile_(std::move(profile)), N_(N) {
    if (N < 1) throw domain_error("RadialFunction: N must be >= 1");
    omega_ = specfun::unit_ball_measure(N);
    radius_ = std::pow(profile_.domain_measure() / omega_, 1.0 / N);
  }

  double operator()(double r) const {
    if (r < 0.0) throw domain_error("RadialFunction: r must be >= 0");
    return profile_(omega_ * std::pow(r, N_));
  }

  /// Radius of the ball with the measure of the original domain.
  double radius() const { return radius_; }
  int dimension() const { return N_; }
  double omega() const { return omega_; }
  const DecreasingProfile& profile() const { return profile_; }

  /// Radii at which the function jumps (block boundaries).
  std::vector<double> jump_radii() const {
    std::vector<double> r;
    for (double s : profile_.breakpoints()) r.push_back(std::pow(s / omega_, 1.0 / N_));
    r.back() = radius_;
    return r;
  }

 private:
  DecreasingProfile profile_;
  int N_;
  double omega_ = 1.0;
  double radius_ = 0.0;
};

inline RadialFunction schwarz_profile_to_radial(const DecreasingProfile& profile, int N) {
  return RadialFunction(profile, N);
}

/// Slice-wise rearrangement of a field sampled at heights y.
inline std::vector<std::pair<double, DecreasingProfile>> steiner_rearrangement(
    const std::vector<std::pair<double, SampledFunction>>& field) {
  std::vector<std::pair<double, DecreasingProfile>> out;
  if (field.empty()) return out;
  const double m = field.front().second.domain_measure();
  for (const auto& [y, slice] : field) {
    if (!(y >= 0.0)) throw domain_error("steiner_rearrangement: heights must be >= 0");
    if (std::abs(slice.domain_measure() - m) > 1e-12 * m) {
      throw mismatch_error("steiner_rearrangement: slices have different domain measures");
    }
    out.emplace_back(y, decreasing_rearrangement(slice));
  }
  return out;
}

/// \int_0^s u*(sigma) d sigma.
inline double concentration(const DecreasingProfile& u, double s) {
  const auto& bp = u.breakpoints();
  const double total = bp.back();
  if (s < 0.0 || s > total * (1.0 + 1e-12)) throw domain_error("concentration: s outside [0, |Omega|]");
  s = std::min(s, total);
  const auto& v = u.values();
  double acc = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) {
    if (bp[b + 1] <= s) {
      acc += v[b] * (bp[b + 1] - bp[b]);
    } else {
      acc += v[b] * (s - bp[b]);
      break;
    }
  }
  return acc;
}

/// u**(t) = (1/t) \int_0^t u*; for t beyond |Omega| the profile is extended by 0.
inline double maximal_average(const DecreasingProfile& u, double t) {
  if (!(t > 0.0)) throw domain_error("maximal_average: t must be > 0");
  return concentration(u, std::min(t, u.domain_measure())) / t;
}

/// Lorentz quasi-norm ( \int_0^inf [t^{1/p} u*(t)]^q dt/t )^{1/q}, or
/// sup t^{1/p} u*(t) for q = infinity, evaluated block by block in closed form.
inline double lorentz_norm(const DecreasingProfile& u, const LorentzExponents& e) {
  const auto& s = u.breakpoints();
  const auto& v = u.values();
  if (v.front() == 0.0) return 0.0;
  const bool p_inf = std::isinf(e.p);
  if (std::isinf(e.q)) {
    double best = 0.0;
    for (std::size_t b = 0; b < v.size(); ++b) {
      best = std::max(best, v[b] * (p_inf ? 1.0 : std::pow(s[b + 1], 1.0 / e.p)));
    }
    return best;
  }
  if (p_inf) return std::numeric_limits<double>::infinity();
  const double r = e.q / e.p;
  double sum = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) {
    if (v[b] == 0.0) break;
    // s_b^r - s_{b-1}^r = s_b^r * (1 - (s_{b-1}/s_b)^r), without cancellation.
    const double hi = std::pow(s[b + 1], r);
    const double frac = s[b] == 0.0 ? 1.0 : -std::expm1(r * std::log(s[b] / s[b + 1]));
    sum += std::pow(v[b], e.q) * hi * frac / r;
  }
  return std::pow(sum, 1.0 / e.q);
}

/// Lorentz norm built on u**(t) = (1/t) \int_0^t u*, with u extended by zero
/// to the whole space, so t ranges over (0, inf) and u**(t) = ||u||_1 / t
/// beyond the profile's domain. Requires p > 1.
inline double lorentz_norm_maximal(const DecreasingProfile& u, const LorentzExponents& e) {
  if (!(e.p > 1.0)) throw divergence_error("lorentz_norm_maximal: requires p > 1");
  const auto& s = u.breakpoints();
  const auto& v = u.values();
  if (v.front() == 0.0) return 0.0;
  const double ip = std::isinf(e.p) ? 0.0 : 1.0 / e.p;
  std::vector<double> A(v.size() + 1, 0.0);
  for (std::size_t b = 0; b < v.size(); ++b) A[b + 1] = A[b] + v[b] * (s[b + 1] - s[b]);
  if (std::isinf(e.q)) {
    // t^{1/p} u**(t) increases on the first block and has no interior maximum
    // on the others, so the supremum sits at a breakpoint.
    double best = 0.0;
    for (std::size_t b = 1; b < s.size(); ++b) best = std::max(best, std::pow(s[b], ip) * A[b] / s[b]);
    return best;
  }
  const double q = e.q;
  double sum = std::pow(v[0], q) * std::pow(s[1], q * ip) / (q * ip);
  static const auto rule = quad::gauss_legendre(8);
  for (std::size_t b = 1; b < v.size(); ++b) {
    const double lo = std::log(s[b]);
    const double hi = std::log(s[b + 1]);
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
    const double h = (hi - lo) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double tau = lo + h * (pnl + 0.5 * (rule.nodes[i] + 1.0));
        const double t = std::exp(tau);
        const double ustar2 = (A[b] + v[b] * (t - s[b])) / t;
        sum += 0.5 * h * rule.weights[i] * std::pow(std::pow(t, ip) * ustar2, q);
      }
    }
  }
  const double M = s.back();
  sum += std::pow(A.back(), q) * std::pow(M, q * ip - q) / (q - q * ip);
  return std::pow(sum, 1.0 / q);
}

namespace detail {

// Visits the common refinement of two profiles' breakpoints, calling
// fn(width, u_value, v_value) on each piece of (0, max(|U|,|V|)).
template <class Fn>
void merged_blocks(const DecreasingProfile& u, const DecreasingProfile& v, Fn&& fn) {
  const auto& su = u.breakpoints();
  const auto& sv = v.breakpoints();
  std::size_t i = 0;
  std::size_t j = 0;
  double lo = 0.0;
  while (i + 1 < su.size() || j + 1 < sv.size()) {
    const double ui = i + 1 < su.size() ? su[i + 1] : std::numeric_limits<double>::infinity();
    const double vj = j + 1 < sv.size() ? sv[j + 1] : std::numeric_limits<double>::infinity();
    const double hi = std::min(ui, vj);
    const double uval = i + 1 < su.size() ? u.values()[i] : 0.0;
    const double vval = j + 1 < sv.size() ? v.values()[j] : 0.0;
    fn(hi - lo, uval, vval);
    lo = hi;
    if (ui == hi) ++i;
    if (vj == hi) ++j;
  }
}

}  // namespace detail

/// \int_0^inf |u*(s) - v*(s)| ds.
inline double l1_distance(const DecreasingProfile& u, const DecreasingProfile& v) {
  double acc = 0.0;
  detail::merged_blocks(u, v, [&](double w, double a, double b) { acc += w * std::abs(a - b); });
  return acc;
}

/// \int_0^{|Omega|} u* v* ds - \int_Omega |u v| dx, which is >= 0.
inline double hardy_littlewood_gap(const SampledFunction& u, const SampledFunction& v) {
  if (u.size() != v.size()) throw mismatch_error("hardy_littlewood_gap: meshes have different cell counts");
  double direct = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mu = u.cells()[i].measure;
    if (std::abs(mu - v.cells()[i].measure) > 1e-12 * mu) {
      throw mismatch_error("hardy_littlewood_gap: cell measures differ");
    }
    direct += mu * std::abs(u.cells()[i].value * v.cells()[i].value);
  }
  double rearranged = 0.0;
  detail::merged_blocks(decreasing_rearrangement(u), decreasing_rearrangement(v),
                        [&](double w, double a, double b) { rearranged += w * a * b; });
  return rearranged - direct;
}

}  // namespace fraclap
