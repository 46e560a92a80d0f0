#pragma once

// Numerical checks of the comparison and regularity inequalities for the
// spectral fractional Dirichlet problem, each with an explicit error budget.
//
// A TraceProblem holds everything that does not depend on alpha: the sample
// grid of Omega, the eigenbasis and source coefficients on Omega, the
// rearranged sampled source f_G* and its coefficients on the ball Omega^#.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/ballgreen.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/params.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/rearrange.hpp"
#include "fraclap/sources.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

enum class Verdict { pass, fail, diagnostic };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::diagnostic:
      return "diagnostic";
  }
  return "?";
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Concentrations U(s) = \int_0^s u*, V(s) = \int_0^s phi* and Z = U - V.
struct ComparisonReport {
  double y = 0.0;
  std::vector<double> s_grid;
  std::vector<double> U;
  std::vector<double> V;
  std::vector<double> Z;
  double max_violation = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::fail;
  Metadata metadata;
};

/// lhs <= rhs check; pass iff margin = rhs - lhs >= -1e-9 |rhs|.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::fail;
  Metadata metadata;
};

namespace comparelab {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline BoundReport make_bound(double lhs, double rhs, double constant, Metadata meta = {}) {
  BoundReport b{lhs, rhs, constant, rhs - lhs, Verdict::fail, std::move(meta)};
  b.verdict = b.margin >= -1e-9 * std::abs(rhs) ? Verdict::pass : Verdict::fail;
  return b;
}

/// Cells covering Omega. Interval unions: about G cells split by length;
/// rectangles: G x G; balls: M = 16 G equal-measure shells with centres at
/// the measure midpoint (diam is the radial thickness).
struct SampleGrid {
  DomainKind kind = DomainKind::interval_union;
  int N = 1;
  double measure = 0.0;
  std::vector<Point> centers;
  std::vector<double> measures;
  std::vector<double> diam;
  std::vector<int> component;  // interval unions
  std::size_t nx = 0;          // rectangles: cell (ix, iy) has index ix * nx + iy
  std::array<double, 2> cell{0.0, 0.0};  // rectangle cell sides
  std::vector<double> edges;   // balls: shell radii r_0 = 0 < ... < r_M = R

  std::size_t size() const { return centers.size(); }
};

inline SampleGrid make_grid(const DomainSpec& d, std::size_t G) {
  if (G < 1) throw domain_error("make_grid: G must be >= 1");
  SampleGrid g;
  g.kind = d.kind;
  g.N = d.N;
  g.measure = d.measure;
  switch (d.kind) {
    case DomainKind::interval_union:
      for (std::size_t c = 0; c < d.intervals.size(); ++c) {
        const auto [a, b] = d.intervals[c];
        const double len = b - a;
        const auto n = std::max<long long>(1, std::llround(static_cast<double>(G) * len / d.measure));
        const double h = len / static_cast<double>(n);
        for (long long i = 0; i < n; ++i) {
          g.centers.push_back({a + (static_cast<double>(i) + 0.5) * h, 0.0, 0.0});
          g.measures.push_back(h);
          g.diam.push_back(h);
          g.component.push_back(static_cast<int>(c));
        }
      }
      break;
    case DomainKind::rectangle: {
      const double hx = d.sides[0] / static_cast<double>(G);
      const double hy = d.sides[1] / static_cast<double>(G);
      g.nx = G;
      g.cell = {hx, hy};
      for (std::size_t ix = 0; ix < G; ++ix) {
        for (std::size_t iy = 0; iy < G; ++iy) {
          g.centers.push_back({(static_cast<double>(ix) + 0.5) * hx, (static_cast<double>(iy) + 0.5) * hy, 0.0});
          g.measures.push_back(hx * hy);
          g.diam.push_back(std::hypot(hx, hy));
        }
      }
      break;
    }
    case DomainKind::ball: {
      const std::size_t M = 16 * G;
      const double R = d.ball.R;
      const double invN = 1.0 / d.N;
      g.edges.resize(M + 1);
      for (std::size_t m = 0; m <= M; ++m) {
        g.edges[m] = R * std::pow(static_cast<double>(m) / static_cast<double>(M), invN);
      }
      g.edges[M] = R;
      const double cell = d.measure / static_cast<double>(M);
      for (std::size_t m = 0; m < M; ++m) {
        const double r = R * std::pow((static_cast<double>(m) + 0.5) / static_cast<double>(M), invN);
        g.centers.push_back({r, 0.0, 0.0});
        g.measures.push_back(cell);
        g.diam.push_back(g.edges[m + 1] - g.edges[m]);
      }
      break;
    }
  }
  return g;
}

/// X_k at the shell centres of a ball grid, row k.
struct RadialTable {
  std::size_t M = 0;
  std::vector<double> X;

  RadialTable() = default;
  RadialTable(const EigenBasis& basis, const SampleGrid& grid) : M(grid.size()), X(basis.size() * grid.size()) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      for (std::size_t m = 0; m < M; ++m) X[k * M + m] = basis.radial_value(k, grid.centers[m][0]);
    }
  }
};

struct GridValues {
  std::vector<double> value;
  std::vector<double> grad;  // |grad u| at the centres; empty on balls
};

/// u and |grad u| at the grid centres.
inline GridValues evaluate(const SpectralSolution& u, const SampleGrid& g, const RadialTable* table = nullptr) {
  GridValues out;
  const std::size_t n = g.size();
  out.value.assign(n, 0.0);
  const auto& modes = u.basis.modes();
  const DomainSpec& d = u.basis.domain();
  const double pi = std::numbers::pi;
  switch (g.kind) {
    case DomainKind::interval_union: {
      out.grad.assign(n, 0.0);
      std::vector<double> gs(n, 0.0);
      for (std::size_t k = 0; k < modes.size(); ++k) {
        const Mode& m = modes[k];
        const auto [a, b] = d.intervals[m.i];
        const double w = m.j * pi / (b - a);
        const double amp = u.coeffs[k] * m.scale;
        for (std::size_t c = 0; c < n; ++c) {
          if (g.component[c] != m.i) continue;
          const double t = w * (g.centers[c][0] - a);
          out.value[c] += amp * std::sin(t);
          gs[c] += amp * w * std::cos(t);
        }
      }
      for (std::size_t c = 0; c < n; ++c) out.grad[c] = std::abs(gs[c]);
      break;
    }
    case DomainKind::rectangle: {
      const std::size_t G = g.nx;
      const double lx = d.sides[0];
      const double ly = d.sides[1];
      int imax = 1;
      int jmax = 1;
      for (const auto& m : modes) {
        imax = std::max(imax, m.i);
        jmax = std::max(jmax, m.j);
      }
      auto table1d = [G](int count, double len, bool x_axis, const SampleGrid& grid, bool cosine) {
        std::vector<double> t(static_cast<std::size_t>(count) * G);
        for (int i = 1; i <= count; ++i) {
          for (std::size_t p = 0; p < G; ++p) {
            const double coord = x_axis ? grid.centers[p * G][0] : grid.centers[p][1];
            const double arg = i * std::numbers::pi * coord / len;
            t[static_cast<std::size_t>(i - 1) * G + p] = cosine ? std::cos(arg) : std::sin(arg);
          }
        }
        return t;
      };
      const auto sx = table1d(imax, lx, true, g, false);
      const auto cx = table1d(imax, lx, true, g, true);
      const auto sy = table1d(jmax, ly, false, g, false);
      const auto cy = table1d(jmax, ly, false, g, true);
      std::vector<double> gx(n, 0.0);
      std::vector<double> gy(n, 0.0);
      for (std::size_t k = 0; k < modes.size(); ++k) {
        const Mode& m = modes[k];
        const double amp = u.coeffs[k] * m.scale;
        if (amp == 0.0) continue;
        const double wx = m.i * pi / lx;
        const double wy = m.j * pi / ly;
        const double* sxr = &sx[static_cast<std::size_t>(m.i - 1) * G];
        const double* cxr = &cx[static_cast<std::size_t>(m.i - 1) * G];
        const double* syr = &sy[static_cast<std::size_t>(m.j - 1) * G];
        const double* cyr = &cy[static_cast<std::size_t>(m.j - 1) * G];
        for (std::size_t ix = 0; ix < G; ++ix) {
          const double a0 = amp * sxr[ix];
          const double a1 = amp * wx * cxr[ix];
          const double a2 = amp * wy * sxr[ix];
          double* v = &out.value[ix * G];
          double* px = &gx[ix * G];
          double* py = &gy[ix * G];
          for (std::size_t iy = 0; iy < G; ++iy) {
            v[iy] += a0 * syr[iy];
            px[iy] += a1 * syr[iy];
            py[iy] += a2 * cyr[iy];
          }
        }
      }
      out.grad.resize(n);
      for (std::size_t c = 0; c < n; ++c) out.grad[c] = std::hypot(gx[c], gy[c]);
      break;
    }
    case DomainKind::ball: {
      if (table == nullptr || table->M != n || table->X.size() < u.coeffs.size() * n) {
        throw mismatch_error("evaluate: ball grids need a radial table of matching size");
      }
      for (std::size_t k = 0; k < u.coeffs.size(); ++k) {
        const double a = u.coeffs[k];
        const double* row = &table->X[k * n];
        for (std::size_t m = 0; m < n; ++m) out.value[m] += a * row[m];
      }
      break;
    }
  }
  return out;
}

/// sup of |D^2 u| over the domain: sum_k |a_k| scale_k lambda_k.
inline double hessian_bound(const SpectralSolution& u) {
  double h = 0.0;
  for (std::size_t k = 0; k < u.coeffs.size(); ++k) {
    h += std::abs(u.coeffs[k]) * u.basis.modes()[k].scale * u.basis.eigenvalue(k);
  }
  return h;
}

/// Per-cell bound on sup_cell |u - u(c)|: |grad u(c)| diam/2 + H diam^2/8.
inline std::vector<double> cell_errors(const SampleGrid& g, const std::vector<double>& grad, double H) {
  std::vector<double> e(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    e[c] = grad[c] * 0.5 * g.diam[c] + H * g.diam[c] * g.diam[c] / 8.0;
  }
  return e;
}

inline DecreasingProfile rearrange_abs(const SampleGrid& g, const std::vector<double>& values) {
  std::vector<Cell> cells(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) cells[c] = {g.measures[c], std::abs(values[c])};
  return decreasing_rearrangement(SampledFunction(std::move(cells), g.measure));
}

/// Bound on ||T||_{1->1} = ||T||_{inf->inf} = sup T1 for T = (-Delta)^{-alpha/2} on
/// a ball of radius R: the torsion function is at most R^2/(2N), and
/// T1 = Gamma(alpha/2)^{-1} \int t^{alpha/2-1} e^{t Delta} 1 dt <= (R^2/(2N))^{alpha/2} / Gamma(1+alpha/2).
inline double inverse_norm_bound(const BallGeometry& g, const FracParams& fp) {
  return std::pow(g.R * g.R / (2.0 * g.N), 0.5 * fp.alpha) / specfun::gamma_fn(1.0 + 0.5 * fp.alpha);
}

/// Alpha-independent data of a comparison run.
struct TraceProblem {
  DomainSpec domain;
  std::size_t K = 0;
  std::size_t G = 0;
  SampleGrid grid;
  EigenBasis basis;
  std::vector<double> c;
  EigenBasis tail_basis;       // basis extended beyond K
  std::vector<double> c_tail;  // coefficients on tail_basis
  BallGeometry sym;
  SampleGrid sym_grid;
  EigenBasis sym_basis;
  std::vector<double> c_sym;
  EigenBasis sym_tail_basis;
  std::vector<double> c_sym_tail;
  RadialTable sym_table;
  std::vector<double> f_cells;
  std::vector<double> f_err;
  double f_sup = 0.0;
  double source_l1 = 0.0;   // bound on ||f* - f_M*||_1
  double source_sup = 0.0;  // bound on ||f* - f_M*||_inf
  double f_norm2 = 0.0;       // ||f||_2^2 on Omega, same quadrature as c
  double f_shells_norm2 = 0.0;  // ||f_M*||_2^2, exact
  DecreasingProfile f_star;    // rearranged grid samples f_G*
  DecreasingProfile f_shells;  // f_M*: shell averages of f_G* on the M shells of Omega^#
  DecreasingProfile f_lower_star;
  std::string description;
};

struct PrepareOptions {
  /// Coefficients are also computed up to tail_factor * K; the modes beyond
  /// K enter the truncation tails term by term.
  std::size_t tail_factor = 8;
  /// f_lower* is sampled on a grid lower_refine times finer than G.
  std::size_t lower_refine = 4;
};

/// Averages of a profile over M equal-measure blocks, with the L1 and sup
/// distances between the profile and the averaged one.
struct ShellAverage {
  DecreasingProfile profile;
  double l1 = 0.0;
  double sup = 0.0;
};

inline ShellAverage shell_average(const DecreasingProfile& u, std::size_t M) {
  const auto& bp = u.breakpoints();
  const auto& v = u.values();
  const double total = u.domain_measure();
  std::vector<double> edges(M + 1);
  for (std::size_t m = 0; m <= M; ++m) edges[m] = total * static_cast<double>(m) / static_cast<double>(M);
  edges[M] = total;
  ShellAverage out;
  std::vector<double> avg(M);
  std::size_t b = 0;
  for (std::size_t m = 0; m < M; ++m) {
    const double lo = edges[m];
    const double hi = edges[m + 1];
    while (b + 1 < v.size() && bp[b + 1] <= lo) ++b;
    std::vector<std::pair<double, double>> parts;
    double acc = 0.0;
    for (std::size_t j = b; j < v.size() && bp[j] < hi; ++j) {
      const double len = std::min(hi, bp[j + 1]) - std::max(lo, bp[j]);
      if (len <= 0.0) continue;
      parts.push_back({len, v[j]});
      acc += len * v[j];
    }
    avg[m] = acc / (hi - lo);
    if (m > 0) avg[m] = std::min(avg[m], avg[m - 1]);
    for (const auto& [len, val] : parts) {
      out.l1 += len * std::abs(val - avg[m]);
      out.sup = std::max(out.sup, std::abs(val - avg[m]));
    }
  }
  out.profile = DecreasingProfile(std::move(edges), std::move(avg));
  return out;
}

/// ||f||_2^2 by the composite Gauss rules that fourier_coefficients uses on
/// a basis of this size.
inline double l2_norm_squared(const Source& f, const EigenBasis& basis) {
  const DomainSpec& d = basis.domain();
  constexpr std::size_t kOrder = 8;
  int imax = 1;
  int jmax = 1;
  for (const auto& m : basis.modes()) {
    imax = std::max(imax, m.i);
    jmax = std::max(jmax, m.j);
  }
  double s = 0.0;
  switch (d.kind) {
    case DomainKind::interval_union:
      for (const auto& [a, b] : d.intervals) {
        const auto rule = quad::composite_gauss(a, b, std::max<std::size_t>(64, 2 * jmax), kOrder);
        for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
          const double v = f(Point{rule.nodes[n], 0.0, 0.0});
          s += rule.weights[n] * v * v;
        }
      }
      break;
    case DomainKind::rectangle: {
      const auto rx = quad::composite_gauss(0.0, d.sides[0], std::max<std::size_t>(128, 2 * imax), kOrder);
      const auto ry = quad::composite_gauss(0.0, d.sides[1], std::max<std::size_t>(128, 2 * jmax), kOrder);
      for (std::size_t ix = 0; ix < rx.nodes.size(); ++ix) {
        double row = 0.0;
        for (std::size_t iy = 0; iy < ry.nodes.size(); ++iy) {
          const double v = f(Point{rx.nodes[ix], ry.nodes[iy], 0.0});
          row += ry.weights[iy] * v * v;
        }
        s += rx.weights[ix] * row;
      }
      break;
    }
    case DomainKind::ball:
      throw domain_error("l2_norm_squared: ball sources are handled through their shell profile");
  }
  return s;
}

inline double l2_norm_squared(const DecreasingProfile& u) {
  const auto& bp = u.breakpoints();
  const auto& v = u.values();
  double s = 0.0;
  for (std::size_t b = 0; b < v.size(); ++b) s += (bp[b + 1] - bp[b]) * v[b] * v[b];
  return s;
}

/// Samples the source, rearranges it and computes both coefficient sets.
/// phi is computed from f_M*, the shell averages of f_G*. On a ball the
/// source must be radial and nonincreasing in |x|, and u is computed from
/// the same shell data as phi.
inline TraceProblem prepare(const DomainSpec& domain, const Source& f, std::size_t K, std::size_t G,
                            const PrepareOptions& opt = {}) {
  if (K < 1) throw domain_error("prepare: K must be >= 1");
  TraceProblem p;
  p.domain = domain;
  p.K = K;
  p.G = G;
  p.description = f.description;
  p.grid = make_grid(domain, G);
  const std::size_t n = p.grid.size();
  p.f_cells.resize(n);
  p.f_err.resize(n);
  std::vector<Cell> cells(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double v = f(p.grid.centers[c]);
    if (!(v >= 0.0)) throw domain_error("prepare: the source must be nonnegative");
    const double dm = p.grid.diam[c];
    p.f_cells[c] = v;
    p.f_err[c] = f.gradient_norm(p.grid.centers[c]) * 0.5 * dm + f.hessian_bound * dm * dm / 8.0;
    p.f_sup = std::max(p.f_sup, v);
    p.source_l1 += p.grid.measures[c] * p.f_err[c];
    p.source_sup = std::max(p.source_sup, p.f_err[c]);
    cells[c] = {p.grid.measures[c], v};
  }
  p.f_star = decreasing_rearrangement(SampledFunction(std::move(cells), domain.measure));
  {
    const SampleGrid fine = make_grid(domain, G * std::max<std::size_t>(1, opt.lower_refine));
    std::vector<Cell> lower(fine.size());
    for (std::size_t c = 0; c < fine.size(); ++c) {
      const Point& x = fine.centers[c];
      const double dm = fine.diam[c];
      const double e = f.gradient_norm(x) * 0.5 * dm + f.hessian_bound * dm * dm / 8.0;
      lower[c] = {fine.measures[c], std::max(0.0, f(x) - e)};
    }
    p.f_lower_star = decreasing_rearrangement(SampledFunction(std::move(lower), domain.measure));
  }

  if (domain.kind == DomainKind::ball) {
    for (std::size_t c = 1; c < n; ++c) {
      if (p.f_cells[c] > p.f_cells[c - 1] + 1e-12 * p.f_sup) {
        throw domain_error("prepare: on a ball the source must be radially nonincreasing");
      }
    }
    p.sym = domain.ball;
    p.sym_grid = p.grid;
  } else {
    p.sym = domain.symmetrized();
    p.sym_grid = make_grid(DomainSpec::make_ball(p.sym), G);
  }
  const DomainSpec sym_domain = domain.kind == DomainKind::ball ? domain : DomainSpec::make_ball(p.sym);
  const std::size_t KT = K * std::max<std::size_t>(1, opt.tail_factor);
  const ShellAverage shells = shell_average(p.f_star, p.sym_grid.size());
  p.f_shells = shells.profile;
  p.f_shells_norm2 = l2_norm_squared(p.f_shells);
  p.source_l1 += shells.l1;
  p.source_sup += shells.sup;
  p.sym_tail_basis = spectral::build_basis(sym_domain, KT);
  p.c_sym_tail = spectral::fourier_coefficients(p.f_shells, p.sym_tail_basis);
  p.sym_basis = EigenBasis(sym_domain, std::vector<Mode>(p.sym_tail_basis.modes().begin(),
                                                         p.sym_tail_basis.modes().begin() + K));
  p.c_sym.assign(p.c_sym_tail.begin(), p.c_sym_tail.begin() + K);
  p.sym_table = RadialTable(p.sym_basis, p.sym_grid);
  if (domain.kind == DomainKind::ball) {
    p.tail_basis = p.sym_tail_basis;
    p.c_tail = p.c_sym_tail;
    p.basis = p.sym_basis;
    p.c = p.c_sym;
    p.f_norm2 = p.f_shells_norm2;
  } else {
    p.tail_basis = spectral::build_basis(domain, KT);
    p.c_tail = spectral::fourier_coefficients([&f](const Point& x) { return f(x); }, p.tail_basis);
    p.basis = EigenBasis(domain, std::vector<Mode>(p.tail_basis.modes().begin(), p.tail_basis.modes().begin() + K));
    p.c.assign(p.c_tail.begin(), p.c_tail.begin() + K);
    p.f_norm2 = l2_norm_squared(f, p.tail_basis);
  }
  return p;
}

namespace detail {

inline std::string domain_name(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::interval_union: {
      std::string s = "interval-union";
      for (const auto& [a, b] : d.intervals) s += " (" + fmt(a) + "," + fmt(b) + ")";
      return s;
    }
    case DomainKind::rectangle:
      return "rectangle " + fmt(d.sides[0]) + "x" + fmt(d.sides[1]);
    case DomainKind::ball:
      return "ball N=" + std::to_string(d.N) + " R=" + fmt(d.ball.R);
  }
  return "?";
}

inline Metadata base_metadata(const TraceProblem& p, const FracParams& fp) {
  return {{"domain", domain_name(p.domain)},
          {"N", std::to_string(p.domain.N)},
          {"alpha", fmt(fp.alpha)},
          {"K", std::to_string(p.K)},
          {"grid", std::to_string(p.G)},
          {"source", p.description}};
}

/// The expansion at height y truncated to K modes.
/// sup tail: sum of |a_k| sup|phi_k| over the computed modes beyond K plus
/// the fitted remainder beyond the last one. L2 tail: by Bessel's
/// inequality, sum_{k >= KT} a_k^2 <= lambda^{-alpha} rho(sqrt(lambda) y)^2
/// (||f||^2 - sum_{k < KT} c_k^2) with lambda the last computed eigenvalue.
inline SpectralSolution truncated(const EigenBasis& full, const std::vector<double>& c, const EigenBasis& basis,
                                  std::size_t K, const FracParams& fp, double y, double norm2) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw domain_error("comparelab: heights must be finite and >= 0");
  const std::size_t KT = c.size();
  std::vector<double> a(KT);
  std::vector<double> sup(KT);
  double s = 0.0;
  double q = 0.0;
  double captured = 0.0;
  for (std::size_t k = 0; k < KT; ++k) {
    const double lambda = full.eigenvalue(k);
    a[k] = c[k] * std::pow(lambda, -0.5 * fp.alpha);
    if (y > 0.0) a[k] *= spectral::rho_profile(std::sqrt(lambda) * y, fp);
    sup[k] = full.sup_norm(k);
    captured += c[k] * c[k];
    if (k >= K) {
      s += std::abs(a[k]) * sup[k];
      q += a[k] * a[k];
    }
  }
  const double measure = full.domain().measure;
  const double lambda_last = full.eigenvalue(KT - 1);
  double damp = std::pow(lambda_last, -0.5 * fp.alpha);
  if (y > 0.0) damp *= spectral::rho_profile(std::sqrt(lambda_last) * y, fp);
  // Rounding in ||f||^2 - sum c_k^2 is bounded by a few ulps of ||f||^2.
  const double residual = std::max(0.0, norm2 - captured) + 4.0 * std::numeric_limits<double>::epsilon() * norm2;
  const double rest_l2 = damp * std::sqrt(residual);

  SpectralSolution u{basis, std::vector<double>(a.begin(), a.begin() + K), fp, {}};
  if (KT > K) {
    const auto rest = spectral::estimate_tail(a, sup, measure);
    u.tail = rest;
    u.tail.sup = s + rest.sup;
  } else {
    u.tail = spectral::estimate_tail(u.coeffs, spectral::sup_norms(basis), measure);
  }
  u.tail.l2 = std::sqrt(q + rest_l2 * rest_l2);
  u.tail.l1 = std::sqrt(measure) * u.tail.l2;
  return u;
}

inline SpectralSolution solution_u(const TraceProblem& p, const FracParams& fp, double y) {
  return truncated(p.tail_basis, p.c_tail, p.basis, p.K, fp, y, p.f_norm2);
}

inline SpectralSolution solution_phi(const TraceProblem& p, const FracParams& fp, double y) {
  return truncated(p.sym_tail_basis, p.c_sym_tail, p.sym_basis, p.K, fp, y, p.f_shells_norm2);
}

/// v(0, y) on Omega^# from every computed mode, with |S_n - S_{n/2}| as the
/// error estimate. The centre series need not converge absolutely when f#
/// has kinks, so this replaces the sup-norm tail there.
struct CenterValue {
  double value = 0.0;
  double error = 0.0;
};

inline CenterValue phi_center(const TraceProblem& p, const FracParams& fp, double y) {
  const std::size_t n = p.c_sym_tail.size();
  double s = 0.0;
  double half = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = p.sym_tail_basis.eigenvalue(k);
    double a = p.c_sym_tail[k] * std::pow(lambda, -0.5 * fp.alpha);
    if (y > 0.0) a *= spectral::rho_profile(std::sqrt(lambda) * y, fp);
    s += a * p.sym_tail_basis.radial_value(k, 0.0);
    if (k + 1 == n / 2) half = s;
  }
  return {s, std::abs(s - half)};
}

/// Upper bound for sup |v| of a radially decreasing field on the ball.
/// Estimate of sup|u| - sup|u_K| at height y. On a ball u is radial and
/// nonincreasing, so the centre value replaces the sup-norm tail.
inline double sup_tail(const TraceProblem& p, const SpectralSolution& u, const FracParams& fp, double y) {
  if (p.domain.kind != DomainKind::ball) return u.tail.sup;
  const CenterValue c = phi_center(p, fp, y);
  return std::abs(c.value - u.radial(0.0)) + c.error;
}

inline double radial_sup(const SpectralSolution& v, double fallback) {
  return std::isfinite(v.tail.sup) ? std::abs(v.radial(0.0)) + v.tail.sup : fallback;
}

struct Prefix {
  std::vector<double> s;
  std::vector<double> acc;
  std::vector<double> v;

  explicit Prefix(const DecreasingProfile& u) : s(u.breakpoints()), acc(s.size(), 0.0), v(u.values()) {
    for (std::size_t b = 0; b < v.size(); ++b) acc[b + 1] = acc[b] + v[b] * (s[b + 1] - s[b]);
  }

  double operator()(double t) const {
    if (t >= s.back()) return acc.back();
    const auto it = std::upper_bound(s.begin(), s.end(), t);
    const std::size_t b = static_cast<std::size_t>(it - s.begin()) - 1;
    return acc[b] + v[b] * (t - s[b]);
  }
};

}  // namespace detail

/// One report per height y; y = 0 is the trace comparison.
inline std::vector<ComparisonReport> compare_extension_slices(const TraceProblem& p, const FracParams& fp,
                                                              const std::vector<double>& heights) {
  const bool ball = p.domain.kind == DomainKind::ball;
  const double T = inverse_norm_bound(p.sym, fp);
  const double measure = p.domain.measure;
  const double shell = measure / static_cast<double>(p.sym_grid.size());
  const double quad = std::sqrt(static_cast<double>(p.K) * measure) * 1e-12 *
                      std::pow(p.sym_basis.eigenvalue(0), -0.5 * fp.alpha);
  constexpr std::size_t kPoints = 513;
  std::vector<ComparisonReport> out;
  for (double y : heights) {
    const SpectralSolution u = detail::solution_u(p, fp, y);
    const SpectralSolution phi = detail::solution_phi(p, fp, y);
    const GridValues ue = evaluate(u, p.grid, ball ? &p.sym_table : nullptr);
    const GridValues pe = evaluate(phi, p.sym_grid, &p.sym_table);
    const DecreasingProfile ustar = rearrange_abs(p.grid, ue.value);
    const DecreasingProfile pstar = rearrange_abs(p.sym_grid, pe.value);

    double grid_u = 0.0;
    if (ball) {
      grid_u = shell * detail::radial_sup(u, T * p.f_sup) + T * p.source_l1;
    } else {
      const auto e = cell_errors(p.grid, ue.grad, hessian_bound(u));
      for (std::size_t c = 0; c < e.size(); ++c) grid_u += p.grid.measures[c] * e[c];
    }
    const double grid_phi = shell * detail::radial_sup(phi, T * p.f_sup);
    const double source = T * p.source_l1;
    const double slack = u.tail.l1 + grid_u + phi.tail.l1 + grid_phi + source + quad;
    if (!std::isfinite(slack)) {
      throw error("compare: slack budget uncomputable (tail fit not summable at K = " + std::to_string(p.K) + ")");
    }

    ComparisonReport r;
    r.y = y;
    r.slack = slack;
    const detail::Prefix U(ustar);
    const detail::Prefix V(pstar);
    r.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kPoints; ++i) {
      const double s = i + 1 == kPoints ? measure : measure * static_cast<double>(i) / (kPoints - 1);
      r.s_grid.push_back(s);
      r.U.push_back(U(s));
      r.V.push_back(V(s));
      r.Z.push_back(r.U.back() - r.V.back());
      r.max_violation = std::max(r.max_violation, r.Z.back());
    }
    r.verdict = r.max_violation <= slack ? Verdict::pass : Verdict::fail;
    r.metadata = detail::base_metadata(p, fp);
    r.metadata.insert(r.metadata.end(), {{"y", fmt(y)},
                                         {"slack", fmt(slack)},
                                         {"slack_tail_u", fmt(u.tail.l1)},
                                         {"slack_grid_u", fmt(grid_u)},
                                         {"slack_tail_phi", fmt(phi.tail.l1)},
                                         {"slack_grid_phi", fmt(grid_phi)},
                                         {"slack_source", fmt(source)},
                                         {"slack_quadrature", fmt(quad)},
                                         {"tail_decay_u", fmt(u.tail.decay)},
                                         {"tail_decay_phi", fmt(phi.tail.decay)},
                                         {"max_violation", fmt(r.max_violation)},
                                         {"verdict", to_string(r.verdict)}});
    out.push_back(std::move(r));
  }
  return out;
}

inline ComparisonReport compare_trace(const TraceProblem& p, const FracParams& fp) {
  return compare_extension_slices(p, fp, {0.0}).front();
}

inline ComparisonReport compare_trace(const DomainSpec& d, const Source& f, const FracParams& fp, std::size_t K,
                                      std::size_t G) {
  return compare_trace(prepare(d, f, K, G), fp);
}

inline std::vector<ComparisonReport> compare_extension_slices(const DomainSpec& d, const Source& f,
                                                              const FracParams& fp, std::size_t K, std::size_t G,
                                                              const std::vector<double>& heights) {
  return compare_extension_slices(prepare(d, f, K, G), fp, heights);
}

namespace detail {

/// Per-cell upper bounds of |u| from the grid values, excluding the tail.
inline std::vector<double> cell_upper(const TraceProblem& p, const SpectralSolution& u, const GridValues& ue) {
  std::vector<double> up(ue.value.size());
  if (p.domain.kind == DomainKind::ball) {
    // Radially decreasing: on shell m, |u| <= |u(c_{m-1})|, and <= |u(0)| on the first.
    for (std::size_t m = 0; m < up.size(); ++m) {
      up[m] = m == 0 ? std::max(std::abs(u.radial(0.0)), std::abs(ue.value[0])) : std::abs(ue.value[m - 1]);
    }
  } else {
    const auto e = cell_errors(p.grid, ue.grad, hessian_bound(u));
    for (std::size_t c = 0; c < up.size(); ++c) up[c] = std::abs(ue.value[c]) + e[c];
  }
  return up;
}

inline const RadialTable* table_for(const TraceProblem& p) {
  return p.domain.kind == DomainKind::ball ? &p.sym_table : nullptr;
}

/// u and |grad u| at one point of an interval union or rectangle.
inline std::pair<double, double> value_gradient(const SpectralSolution& u, const Point& x) {
  const DomainSpec& d = u.basis.domain();
  const double pi = std::numbers::pi;
  double v = 0.0;
  double gx = 0.0;
  double gy = 0.0;
  for (std::size_t k = 0; k < u.coeffs.size(); ++k) {
    const Mode& m = u.basis.modes()[k];
    const double amp = u.coeffs[k] * m.scale;
    if (d.kind == DomainKind::interval_union) {
      const auto [a, b] = d.intervals[m.i];
      if (!(x[0] >= a && x[0] <= b)) continue;
      const double w = m.j * pi / (b - a);
      v += amp * std::sin(w * (x[0] - a));
      gx += amp * w * std::cos(w * (x[0] - a));
    } else {
      const double wx = m.i * pi / d.sides[0];
      const double wy = m.j * pi / d.sides[1];
      const double sx = std::sin(wx * x[0]);
      const double sy = std::sin(wy * x[1]);
      v += amp * sx * sy;
      gx += amp * wx * std::cos(wx * x[0]) * sy;
      gy += amp * wy * sx * std::cos(wy * x[1]);
    }
  }
  return {v, std::hypot(gx, gy)};
}

/// Upper bound of sup |u_K| over Omega by branch and bound: a cell with
/// centre c and diameter h is discarded once |u(c)| + |grad u(c)| h/2 + H h^2/8
/// is below the largest sampled |u|, and subdivided otherwise.
inline double truncated_sup(const TraceProblem& p, const SpectralSolution& u, const GridValues& ue) {
  if (p.domain.kind == DomainKind::ball) {
    double best = std::abs(u.radial(0.0));
    for (double x : ue.value) best = std::max(best, std::abs(x));
    return best;
  }
  struct Box {
    Point c;
    double hx;
    double hy;
    double bound;
  };
  const double H = hessian_bound(u);
  const bool rect = p.domain.kind == DomainKind::rectangle;
  auto bound = [H](double v, double g, double diam) { return std::abs(v) + g * 0.5 * diam + H * diam * diam / 8.0; };
  double lower = 0.0;
  for (double x : ue.value) lower = std::max(lower, std::abs(x));
  std::vector<Box> live;
  for (std::size_t c = 0; c < ue.value.size(); ++c) {
    const double hx = rect ? p.grid.cell[0] : p.grid.measures[c];
    const double hy = rect ? p.grid.cell[1] : 0.0;
    const double bd = bound(ue.value[c], ue.grad[c], p.grid.diam[c]);
    if (bd > lower) live.push_back({p.grid.centers[c], hx, hy, bd});
  }
  constexpr int kSplit = 4;
  constexpr std::size_t kMaxBoxes = 4096;
  for (int level = 0; level < 4 && !live.empty() && live.size() <= kMaxBoxes; ++level) {
    std::vector<Box> next;
    for (const Box& b : live) {
      const int ny = rect ? kSplit : 1;
      const double sx = b.hx / kSplit;
      const double sy = rect ? b.hy / kSplit : 0.0;
      for (int i = 0; i < kSplit; ++i) {
        for (int j = 0; j < ny; ++j) {
          Point c = b.c;
          c[0] += (i + 0.5) * sx - 0.5 * b.hx;
          if (rect) c[1] += (j + 0.5) * sy - 0.5 * b.hy;
          const auto [v, g] = value_gradient(u, c);
          lower = std::max(lower, std::abs(v));
          next.push_back({c, sx, sy, bound(v, g, std::hypot(sx, sy))});
        }
      }
    }
    live.clear();
    for (const Box& b : next) {
      if (b.bound > lower) live.push_back(b);
    }
  }
  double sup = lower;
  for (const Box& b : live) sup = std::max(sup, b.bound);
  return sup;
}

}  // namespace detail

/// sup |u| <= a b omega_N^{(N-alpha)/N} ||f||_{L^{N/alpha,1}}.
inline BoundReport verify_linfty(const TraceProblem& p, const FracParams& fp) {
  const int N = p.domain.N;
  if (!(N > fp.alpha)) throw divergence_error("verify_linfty: requires N > alpha");
  const SpectralSolution u = detail::solution_u(p, fp, 0.0);
  const GridValues ue = evaluate(u, p.grid, detail::table_for(p));
  const double tail = detail::sup_tail(p, u, fp, 0.0);
  double lhs = detail::truncated_sup(p, u, ue) + tail;
  if (p.domain.kind == DomainKind::ball) lhs += inverse_norm_bound(p.sym, fp) * p.source_sup;
  const auto k = ballgreen::green_bound_constants(p.sym, fp);
  const double weak = ballgreen::riesz_weak_norm(N, fp);
  const double rhs = ballgreen::linfty_bound(p.f_lower_star, p.sym, fp);
  const double literal = k.a * k.b * lorentz_norm(p.f_lower_star, {N / fp.alpha, 1.0});
  Metadata meta = detail::base_metadata(p, fp);
  meta.insert(meta.end(), {{"check", "linfty"},
                           {"tail_sup", fmt(tail)},
                           {"weak_norm_factor", fmt(weak)},
                           {"rhs_without_weak_factor", fmt(literal)},
                           {"margin_without_weak_factor", fmt(literal - lhs)}});
  return make_bound(lhs, rhs, k.a * k.b * weak, std::move(meta));
}

/// sup_x |w(x, y)| <= sup_x |v(x, y)| = v(0, y) per height, with the
/// truncation and source budgets added to the right-hand side.
inline std::vector<BoundReport> verify_extension_linfty(const TraceProblem& p, const FracParams& fp,
                                                        const std::vector<double>& heights) {
  const bool ball = p.domain.kind == DomainKind::ball;
  const double source = inverse_norm_bound(p.sym, fp) * p.source_sup * (ball ? 2.0 : 1.0);
  std::vector<BoundReport> out;
  for (double y : heights) {
    const SpectralSolution w = detail::solution_u(p, fp, y);
    const detail::CenterValue v = detail::phi_center(p, fp, y);
    const GridValues we = evaluate(w, p.grid, detail::table_for(p));
    const double lhs = detail::truncated_sup(p, w, we);
    const double tail_w = detail::sup_tail(p, w, fp, y);
    const double budget = tail_w + v.error + source;
    if (!std::isfinite(budget)) {
      throw error("verify_extension_linfty: budget uncomputable (tail fit not summable)");
    }
    const double v0 = std::abs(v.value);
    Metadata meta = detail::base_metadata(p, fp);
    meta.insert(meta.end(), {{"check", "extension-linfty"},
                             {"y", fmt(y)},
                             {"sup_v", fmt(v0)},
                             {"sup_v_error", fmt(v.error)},
                             {"tail_sup_w", fmt(tail_w)},
                             {"budget", fmt(budget)}});
    out.push_back(make_bound(lhs, v0 + budget, 1.0, std::move(meta)));
  }
  return out;
}

/// ||u||_{L^{q,r}} <= 3q a b max(omega_N^{(N-alpha)/N}, 1) ||f||_{L^{p,r}}, q = Np/(N - alpha p).
inline BoundReport verify_lorentz_regularity(const TraceProblem& p, const FracParams& fp, double pe, double r) {
  const int N = p.domain.N;
  if (!(N > fp.alpha)) throw divergence_error("verify_lorentz_regularity: requires N > alpha");
  if (!(pe > 1.0 && pe < N / fp.alpha)) {
    throw domain_error("verify_lorentz_regularity: requires 1 < p < N/alpha, got p = " + fmt(pe));
  }
  if (!(r >= 1.0)) throw domain_error("verify_lorentz_regularity: requires r >= 1");
  const double q = N * pe / (N - fp.alpha * pe);
  const SpectralSolution u = detail::solution_u(p, fp, 0.0);
  const GridValues ue = evaluate(u, p.grid, detail::table_for(p));
  auto up = detail::cell_upper(p, u, ue);
  double shift = detail::sup_tail(p, u, fp, 0.0);
  if (p.domain.kind == DomainKind::ball) shift += inverse_norm_bound(p.sym, fp) * p.source_sup;
  for (double& x : up) x += shift;
  const double lhs = lorentz_norm(rearrange_abs(p.grid, up), {q, r});
  const auto k = ballgreen::green_bound_constants(p.sym, fp);
  const double weak = ballgreen::riesz_weak_norm(N, fp);
  const double base = 3.0 * q * k.a * k.b;
  const double constant = base * std::max(weak, 1.0);
  const double fnorm = lorentz_norm(p.f_lower_star, {pe, r});
  Metadata meta = detail::base_metadata(p, fp);
  meta.insert(meta.end(), {{"check", "lorentz"},
                           {"p", fmt(pe)},
                           {"q", fmt(q)},
                           {"r", fmt(r)},
                           {"weak_norm_factor", fmt(weak)},
                           {"constant_without_weak_factor", fmt(base)},
                           {"rhs_without_weak_factor", fmt(base * fnorm)}});
  return make_bound(lhs, constant * fnorm, constant, std::move(meta));
}

/// Uniform grid function on {0, ..., n-1}^N with spacing h, extended by zero.
struct GridFunction {
  int N = 1;
  std::size_t n = 0;
  double h = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// f * g on the (2n-1)^N grid: (f*g)_i = h^N sum_j f_j g_{i-j}.
inline GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  if (f.N != g.N || f.n != g.n || f.h != g.h) throw mismatch_error("convolve: grids differ");
  const int N = f.N;
  if (N < 1 || N > 3) throw domain_error("convolve: N must be 1, 2 or 3");
  std::size_t expect = 1;
  for (int d = 0; d < N; ++d) expect *= f.n;
  if (f.values.size() != expect || g.values.size() != expect) throw mismatch_error("convolve: size != n^N");
  const std::size_t n = f.n;
  const std::size_t m = 2 * n - 1;
  std::size_t out_size = 1;
  for (int d = 0; d < N; ++d) out_size *= m;
  GridFunction out{N, m, f.h, std::vector<double>(out_size, 0.0)};
  const double w = std::pow(f.h, N);
  auto digits = [N](std::size_t idx, std::size_t base, std::size_t* dgt) {
    for (int d = N - 1; d >= 0; --d) {
      dgt[d] = idx % base;
      idx /= base;
    }
  };
  std::size_t a[3];
  std::size_t b[3];
  for (std::size_t i = 0; i < expect; ++i) {
    if (f.values[i] == 0.0) continue;
    digits(i, n, a);
    for (std::size_t j = 0; j < expect; ++j) {
      if (g.values[j] == 0.0) continue;
      digits(j, n, b);
      std::size_t o = 0;
      for (int d = 0; d < N; ++d) o = o * m + a[d] + b[d];
      out.values[o] += w * f.values[i] * g.values[j];
    }
  }
  return out;
}

inline DecreasingProfile grid_rearrangement(const GridFunction& f) {
  const double cell = std::pow(f.h, f.N);
  std::vector<Cell> cells(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) cells[i] = {cell, f.values[i]};
  return decreasing_rearrangement(SampledFunction(std::move(cells), cell * static_cast<double>(f.size())));
}

struct OneilExponents {
  double p1 = 2.0;
  double q1 = 2.0;
  double p2 = 2.0;
  double q2 = 2.0;
  double t = 1.0;
};

/// ||f * g||**_{r,t} <= 3r ||f||**_{p1,q1} ||g||**_{p2,q2} with 1/r = 1/p1 + 1/p2 - 1.
inline BoundReport verify_oneil(const GridFunction& f, const GridFunction& g, const OneilExponents& e) {
  if (!(e.p1 > 1.0 && e.p2 > 1.0)) throw domain_error("verify_oneil: requires p1, p2 > 1");
  const double inv_r = 1.0 / e.p1 + 1.0 / e.p2 - 1.0;
  if (!(inv_r > 0.0 && inv_r < 1.0)) {
    throw domain_error("verify_oneil: requires 1 < 1/p1 + 1/p2 < 2 so that 1 < r < inf");
  }
  if (!(e.q1 >= 1.0 && e.q2 >= 1.0 && e.t >= 1.0)) throw domain_error("verify_oneil: requires q1, q2, t >= 1");
  const double inv_q = (std::isinf(e.q1) ? 0.0 : 1.0 / e.q1) + (std::isinf(e.q2) ? 0.0 : 1.0 / e.q2);
  const double inv_t = std::isinf(e.t) ? 0.0 : 1.0 / e.t;
  if (inv_t > inv_q * (1.0 + 1e-15)) throw domain_error("verify_oneil: requires 1/t <= 1/q1 + 1/q2");
  const double r = 1.0 / inv_r;
  const double lhs = lorentz_norm_maximal(grid_rearrangement(convolve(f, g)), {r, e.t});
  const double nf = lorentz_norm_maximal(grid_rearrangement(f), {e.p1, e.q1});
  const double ng = lorentz_norm_maximal(grid_rearrangement(g), {e.p2, e.q2});
  Metadata meta = {{"check", "oneil"},
                   {"r", fmt(r)},
                   {"t", fmt(e.t)},
                   {"norms", "maximal (double star), zero extension"},
                   {"indexing", "1/r = 1/p1 + 1/p2 - 1, constant 3r"}};
  return make_bound(lhs, 3.0 * r * nf * ng, 3.0 * r, std::move(meta));
}

struct GreenRow {
  double r = 0.0;
  double rho = 0.0;
  double series = 0.0;
  double closed = 0.0;
  double classical = 0.0;
  double tail = 0.0;
};

struct GreenComparison {
  std::vector<GreenRow> rows;
  BoundReport report;
};

/// Sphere-averaged Green functions at |x| = r, |y| = rho: the eigen-series
/// -sum X_k(r) X_k(rho) lambda_k^{-alpha/2}, the closed-form ball kernel and
/// the classical (alpha = 2) kernel. A diagnostic, not an assertion.
inline GreenComparison verify_green_vs_spectral(const BallGeometry& geom, const FracParams& fp, std::size_t K,
                                                const std::vector<std::pair<double, double>>& points) {
  const EigenBasis basis = spectral::build_basis(DomainSpec::make_ball(geom), K);
  GreenComparison out;
  double max_gap = 0.0;
  double max_tail = 0.0;
  double max_series_classical = 0.0;
  double max_closed_classical = 0.0;
  for (const auto& [r, rho] : points) {
    if (!(r >= 0.0 && r < geom.R && rho >= 0.0 && rho < geom.R)) {
      throw domain_error("verify_green_vs_spectral: radii must lie in [0, R)");
    }
    std::vector<double> t(K);
    double s = 0.0;
    double half = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      t[k] = basis.radial_value(k, r) * basis.radial_value(k, rho) * std::pow(basis.eigenvalue(k), -0.5 * fp.alpha);
      s += t[k];
      if (k + 1 == K / 2) half = s;
    }
    GreenRow row{r, rho, -s, ballgreen::sphere_average(r, rho, geom, fp),
                 ballgreen::classical_sphere_average(r, rho, geom), std::abs(s - half)};
    double C = 0.0;
    double pw = 0.0;
    if (K >= 8 && spectral::detail::power_fit(t, C, pw) && pw > 1.0) {
      row.tail = C * std::pow(static_cast<double>(K), 1.0 - pw) / (pw - 1.0);
    }
    max_gap = std::max(max_gap, std::abs(row.series - row.closed));
    max_tail = std::max(max_tail, row.tail);
    max_series_classical = std::max(max_series_classical, std::abs(row.series - row.classical));
    max_closed_classical = std::max(max_closed_classical, std::abs(row.closed - row.classical));
    out.rows.push_back(row);
  }
  out.report.lhs = max_gap;
  out.report.rhs = max_tail;
  out.report.constant = 1.0;
  out.report.margin = max_tail - max_gap;
  out.report.verdict = Verdict::diagnostic;
  out.report.metadata = {{"check", "green-vs-spectral"},
                         {"N", std::to_string(geom.N)},
                         {"R", fmt(geom.R)},
                         {"alpha", fmt(fp.alpha)},
                         {"K", std::to_string(K)},
                         {"max_series_minus_closed", fmt(max_gap)},
                         {"max_series_minus_classical", fmt(max_series_classical)},
                         {"max_closed_minus_classical", fmt(max_closed_classical)},
                         {"max_series_tail", fmt(max_tail)}};
  return out;
}

}  // namespace comparelab
}  // namespace fraclap
