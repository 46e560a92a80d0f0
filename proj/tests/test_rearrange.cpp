#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fraclap/quadrature.hpp"
#include "fraclap/rearrange.hpp"

using namespace fraclap;

namespace {

SampledFunction random_function(std::mt19937_64& gen, std::size_t n, bool signed_values = true,
                                int levels = 0) {
  std::uniform_real_distribution<double> meas(0.1, 1.0);
  std::uniform_real_distribution<double> val(signed_values ? -3.0 : 0.0, 3.0);
  std::uniform_int_distribution<int> lev(0, std::max(levels, 1) - 1);
  std::vector<Cell> cells(n);
  for (auto& c : cells) {
    c.measure = meas(gen);
    c.value = levels > 0 ? 0.5 * lev(gen) : val(gen);
  }
  return SampledFunction::from_cells(std::move(cells));
}

SampledFunction with_values(const SampledFunction& mesh, const std::vector<double>& values) {
  std::vector<Cell> cells = mesh.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i].value = values[i];
  return SampledFunction(std::move(cells), mesh.domain_measure());
}

}  // namespace

TEST(SampledFunction, Validation) {
  EXPECT_THROW(SampledFunction({{0.0, 1.0}}, 0.0), domain_error);
  EXPECT_THROW(SampledFunction({{-1.0, 1.0}}, 1.0), domain_error);
  EXPECT_THROW(SampledFunction({{0.5, 1.0}}, 1.0), mismatch_error);
  EXPECT_NO_THROW(SampledFunction({{0.5, 1.0}, {0.5, 2.0}}, 1.0));
}

TEST(DistributionFunction, TrivialCases) {
  const SampledFunction zero({{0.3, 0.0}, {0.7, 0.0}}, 1.0);
  EXPECT_EQ(distribution_function(zero, 0.0), 0.0);
  EXPECT_EQ(distribution_function(zero, 2.0), 0.0);
  const SampledFunction ind({{0.25, 1.0}, {0.75, 0.0}}, 1.0);
  EXPECT_EQ(distribution_function(ind, 0.5), 0.25);
}

TEST(DistributionFunction, MatchesLinearScan) {
  std::mt19937_64 gen(11);
  const auto f = random_function(gen, 1000);
  std::uniform_real_distribution<double> tdist(0.0, 3.2);
  for (int i = 0; i < 20; ++i) {
    const double t = tdist(gen);
    double oracle = 0.0;
    for (const auto& c : f.cells()) oracle += (std::abs(c.value) > t) ? c.measure : 0.0;
    EXPECT_EQ(distribution_function(f, t), oracle);
  }
}

TEST(DecreasingRearrangement, IndicatorAndLinear) {
  const SampledFunction ind({{0.5, 0.0}, {0.25, 1.0}, {0.25, 0.0}}, 1.0);
  const auto p = decreasing_rearrangement(ind);
  EXPECT_EQ(p.breakpoints(), (std::vector<double>{0.0, 0.25, 1.0}));
  EXPECT_EQ(p.values(), (std::vector<double>{1.0, 0.0}));

  for (int M : {10, 100, 1000}) {
    std::vector<Cell> cells;
    for (int i = 0; i < M; ++i) cells.push_back({1.0 / M, (i + 0.5) / M});
    const auto u = decreasing_rearrangement(SampledFunction::from_cells(cells));
    double err = 0.0;
    for (double s = 0.0; s < 1.0; s += 0.0007) err = std::max(err, std::abs(u(s) - (1.0 - s)));
    EXPECT_LE(err, 1.0 / M + 1e-12);
  }
}

TEST(DecreasingRearrangement, SignIsIgnored) {
  const SampledFunction f({{0.5, -2.0}, {0.5, 1.0}}, 1.0);
  const auto p = decreasing_rearrangement(f);
  EXPECT_EQ(p(0.0), 2.0);
  EXPECT_EQ(p(0.6), 1.0);
}

TEST(DecreasingRearrangement, EquimeasurabilityIsExact) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_function(gen, 300, true, trial % 2 ? 7 : 0);
    const auto u = decreasing_rearrangement(f);
    std::vector<double> thresholds;
    for (const auto& c : f.cells()) thresholds.push_back(std::abs(c.value));
    std::uniform_real_distribution<double> tdist(0.0, 3.5);
    for (int i = 0; i < 50; ++i) thresholds.push_back(tdist(gen));
    for (double t : thresholds) {
      const double mf = distribution_function(f, t);
      const double mu = distribution_function(u, t);
      EXPECT_NEAR(mu, mf, 1e-12 * f.domain_measure());
    }
  }
}

TEST(DecreasingRearrangement, ShuffleInvariantBitExact) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_function(gen, 400, true, trial % 3 == 0 ? 5 : 0);
    auto cells = f.cells();
    std::shuffle(cells.begin(), cells.end(), gen);
    const SampledFunction g(cells, f.domain_measure());
    const auto uf = decreasing_rearrangement(f);
    const auto ug = decreasing_rearrangement(g);
    EXPECT_EQ(uf.breakpoints(), ug.breakpoints());
    EXPECT_EQ(uf.values(), ug.values());
    for (auto e : {LorentzExponents(2, 2), LorentzExponents(1.5, 3), LorentzExponents(3, 1),
                   LorentzExponents(2, INFINITY)}) {
      EXPECT_EQ(lorentz_norm(uf, e), lorentz_norm(ug, e));
    }
  }
}

TEST(SchwarzRadial, ConstantAndOneDimensional) {
  const auto c = schwarz_profile_to_radial(DecreasingProfile::constant(3.0, 2.0), 2);
  for (double r = 0.0; r < c.radius(); r += 0.05) EXPECT_EQ(c(r), 3.0);

  // Profile 1 - s on (0,1), N = 1: u#(x) = 1 - 2|x| on (-1/2, 1/2).
  const int M = 2000;
  std::vector<Cell> cells;
  for (int i = 0; i < M; ++i) cells.push_back({1.0 / M, (i + 0.5) / M});
  const auto rad = schwarz_profile_to_radial(decreasing_rearrangement(SampledFunction::from_cells(cells)), 1);
  EXPECT_NEAR(rad.radius(), 0.5, 1e-12);
  for (double x = 0.0; x < 0.5; x += 0.01) EXPECT_NEAR(rad(x), 1.0 - 2.0 * x, 1.0 / M + 1e-12);
}

TEST(SchwarzRadial, EquimeasurableInTwoDimensions) {
  std::mt19937_64 gen(41);
  const auto u = decreasing_rearrangement(random_function(gen, 40, false, 6));
  const auto rad = schwarz_profile_to_radial(u, 2);
  // Measure of {u# > t} by radial quadrature of the level set indicator.
  for (double t : {0.1, 0.6, 1.1, 2.2}) {
    const auto jumps = rad.jump_radii();
    double m = 0.0;
    for (std::size_t b = 0; b + 1 < jumps.size(); ++b) {
      auto f = [&](double r) { return rad(r) > t ? 2.0 * std::numbers::pi * r : 0.0; };
      m += quad::adaptive(f, jumps[b], jumps[b + 1], 1e-13, 1e-13).value;
    }
    EXPECT_NEAR(m, distribution_function(u, t), 1e-10);
  }
  double prev = INFINITY;
  for (double r = 0.0; r < rad.radius(); r += 0.01) {
    EXPECT_LE(rad(r), prev);
    prev = rad(r);
  }
}

TEST(Steiner, SliceWise) {
  std::mt19937_64 gen(51);
  const auto f = random_function(gen, 100);
  const auto single = steiner_rearrangement({{0.0, f}});
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].second.values(), decreasing_rearrangement(f).values());

  const auto same = steiner_rearrangement({{0.0, f}, {0.5, f}, {1.0, f}});
  for (const auto& [y, p] : same) EXPECT_EQ(p.values(), same[0].second.values());

  std::vector<std::pair<double, SampledFunction>> field;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> vals;
    for (const auto& c : f.cells()) vals.push_back(c.value * std::exp(-k * 0.3 * std::abs(c.value)));
    field.emplace_back(0.2 * k, with_values(f, vals));
  }
  const auto st = steiner_rearrangement(field);
  for (std::size_t k = 0; k < field.size(); ++k) {
    EXPECT_EQ(st[k].first, field[k].first);
    std::vector<double> sorted;
    for (const auto& c : field[k].second.cells()) sorted.push_back(std::abs(c.value));
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    EXPECT_EQ(st[k].second.sup(), sorted.front());
  }
  const SampledFunction other({{1.0, 1.0}}, 1.0);
  EXPECT_THROW(steiner_rearrangement({{0.0, f}, {1.0, other}}), mismatch_error);
}

TEST(Concentration, ExactBlockSums) {
  const auto ind = DecreasingProfile::indicator(0.3, 1.0);
  EXPECT_EQ(concentration(ind, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(concentration(ind, 0.5), 0.3);
  EXPECT_THROW(concentration(ind, 1.5), domain_error);

  std::mt19937_64 gen(61);
  const auto u = decreasing_rearrangement(random_function(gen, 200));
  std::uniform_real_distribution<double> sd(0.0, u.domain_measure());
  for (int i = 0; i < 20; ++i) {
    const double s = sd(gen);
    double oracle = 0.0;
    const auto& bp = u.breakpoints();
    for (std::size_t b = 0; b < u.blocks(); ++b) {
      const double lo = bp[b];
      const double hi = std::min(bp[b + 1], s);
      if (hi > lo) oracle += (hi - lo) * u.values()[b];
    }
    EXPECT_NEAR(concentration(u, s), oracle, 1e-12 * oracle);
    // Lipschitz with constant u*(0), concave.
    const double h = 1e-3;
    if (s + h < u.domain_measure()) {
      EXPECT_LE(concentration(u, s + h) - concentration(u, s), u.sup() * h * (1 + 1e-12));
    }
  }
}

TEST(MaximalAverage, Basics) {
  EXPECT_DOUBLE_EQ(maximal_average(DecreasingProfile::constant(2.5, 3.0), 1.7), 2.5);
  EXPECT_DOUBLE_EQ(maximal_average(DecreasingProfile::indicator(0.2, 1.0), 0.4), 0.5);
  EXPECT_THROW(maximal_average(DecreasingProfile::constant(1.0, 1.0), 0.0), domain_error);
  std::mt19937_64 gen(71);
  const auto u = decreasing_rearrangement(random_function(gen, 150));
  for (int i = 1; i <= 100; ++i) {
    const double t = u.domain_measure() * i / 100.0;
    EXPECT_GE(maximal_average(u, t), u(t));
  }
}

TEST(Lorentz, IndicatorClosedForms) {
  const double m = 0.37;
  const auto ind = DecreasingProfile::indicator(m, 1.0);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    EXPECT_NEAR(lorentz_norm(ind, {p, p}), std::pow(m, 1.0 / p), 1e-14);
    for (double q : {0.5, 1.0, 3.0}) {
      EXPECT_NEAR(lorentz_norm(ind, {p, q}), std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p), 1e-13);
    }
    EXPECT_NEAR(lorentz_norm(ind, {p, INFINITY}), std::pow(m, 1.0 / p), 1e-14);
  }
  EXPECT_EQ(lorentz_norm(DecreasingProfile::constant(0.0, 1.0), {2, 3}), 0.0);
  EXPECT_EQ(lorentz_norm(ind, {INFINITY, INFINITY}), 1.0);
}

TEST(Lorentz, EqualsLpForPEqualsQ) {
  std::mt19937_64 gen(81);
  const auto f = random_function(gen, 300);
  const auto u = decreasing_rearrangement(f);
  for (double p : {1.0, 2.0, 3.5}) {
    double lp = 0.0;
    for (const auto& c : f.cells()) lp += c.measure * std::pow(std::abs(c.value), p);
    EXPECT_NEAR(lorentz_norm(u, {p, p}), std::pow(lp, 1.0 / p), 1e-12 * std::pow(lp, 1.0 / p));
  }
}

TEST(Lorentz, NestedInSecondExponent) {
  // ||f||_{p,r} <= (q/p)^{1/q - 1/r} ||f||_{p,q} for q <= r. Indicators show
  // the constant cannot be dropped.
  std::mt19937_64 gen(91);
  std::uniform_real_distribution<double> pd(1.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = decreasing_rearrangement(random_function(gen, 60));
    const double p = pd(gen);
    const double q = pd(gen);
    const double r = q + pd(gen);
    const double c = std::pow(q / p, 1.0 / q - 1.0 / r);
    const double c_inf = std::pow(q / p, 1.0 / q);
    EXPECT_LE(lorentz_norm(u, {p, r}), c * lorentz_norm(u, {p, q}) * (1 + 1e-10));
    EXPECT_LE(lorentz_norm(u, {p, INFINITY}), c_inf * lorentz_norm(u, {p, q}) * (1 + 1e-10));
  }
  const auto ind = DecreasingProfile::indicator(1.0, 2.0);
  EXPECT_GT(lorentz_norm(ind, {1.1, 8.0}), lorentz_norm(ind, {1.1, 3.0}));
}

TEST(HardyLittlewood, GapIsNonnegative) {
  std::mt19937_64 gen(101);
  const auto u = random_function(gen, 50);
  std::vector<double> ones(u.size(), 1.0);
  EXPECT_NEAR(hardy_littlewood_gap(u, with_values(u, ones)), 0.0, 1e-12);
  EXPECT_NEAR(hardy_littlewood_gap(u, u), 0.0, 1e-12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_function(gen, 500);
    std::vector<double> vals;
    std::uniform_real_distribution<double> vd(-2.0, 2.0);
    for (std::size_t i = 0; i < a.size(); ++i) vals.push_back(vd(gen));
    EXPECT_GE(hardy_littlewood_gap(a, with_values(a, vals)), -1e-12);
  }
  EXPECT_THROW(hardy_littlewood_gap(u, SampledFunction({{1.0, 1.0}}, 1.0)), mismatch_error);
}

TEST(Contraction, RearrangementIsNonexpansiveInL1) {
  std::mt19937_64 gen(111);
  std::uniform_real_distribution<double> vd(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_function(gen, 200);
    std::vector<double> vals;
    for (std::size_t i = 0; i < a.size(); ++i) vals.push_back(vd(gen));
    const auto b = with_values(a, vals);
    double direct = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      direct += a.cells()[i].measure * std::abs(a.cells()[i].value - b.cells()[i].value);
    }
    EXPECT_LE(l1_distance(decreasing_rearrangement(a), decreasing_rearrangement(b)), direct + 1e-12);
  }
}

TEST(LorentzMaximal, IndicatorClosedFormAndHardyBounds) {
  // u** = 1 on (0, m) and m / t beyond, so the q-th power of the norm is
  // m^{q/p} p^2 / (q (p - 1)).
  const double m = 0.37;
  const auto ind = DecreasingProfile::indicator(m, 1.0);
  for (double p : {1.5, 2.0, 4.0}) {
    for (double q : {1.0, 2.0, 5.0}) {
      const double exact = std::pow(std::pow(m, q / p) * p * p / (q * (p - 1.0)), 1.0 / q);
      EXPECT_NEAR(lorentz_norm_maximal(ind, {p, q}), exact, 1e-12 * exact);
    }
    EXPECT_NEAR(lorentz_norm_maximal(ind, {p, INFINITY}), std::pow(m, 1.0 / p), 1e-14);
  }
  EXPECT_THROW(lorentz_norm_maximal(ind, {1.0, 2.0}), divergence_error);

  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = decreasing_rearrangement(random_function(gen, 50));
    for (double p : {1.3, 2.5}) {
      for (double q : std::vector<double>{1.0, 3.0, INFINITY}) {
        const double star = lorentz_norm(u, {p, q});
        const double maximal = lorentz_norm_maximal(u, {p, q});
        EXPECT_GE(maximal, star * (1 - 1e-12));
        EXPECT_LE(maximal, p / (p - 1.0) * star * (1 + 1e-12));
      }
    }
  }
}
