#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/fraclap.hpp"

namespace fraclap::cli {
namespace {

using namespace comparelab;

struct RunConfig {
  std::string command;
  int n = 0;
  double alpha = 0.0;
  double radius = 1.0;
  std::string domain;
  std::vector<double> intervals;
  std::size_t terms = 128;
  std::size_t grid = 64;
  double p = 0.0;
  double q = 0.0;
  double r = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  double tol = 0.0;
  std::vector<double> y;
  std::string input;
  std::string check;
  std::vector<std::string> points;
  std::size_t tail_factor = 8;
  std::size_t lower_refine = 4;
  bool maximal = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owns the --out file when one is given.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw UsageError("--out: cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

SampledFunction read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--input: cannot open '" + path + "'");
  return csv::read_cells(in);
}

DomainSpec make_domain(const RunConfig& c) {
  if (c.domain == "square") return DomainSpec::unit_square();
  if (c.domain == "interval-union") {
    if (c.intervals.empty() || c.intervals.size() % 2 != 0) {
      throw UsageError("--intervals: expected an even list a,b,c,d,... for --domain interval-union");
    }
    std::vector<std::pair<double, double>> iv;
    for (std::size_t i = 0; i < c.intervals.size(); i += 2) iv.push_back({c.intervals[i], c.intervals[i + 1]});
    return DomainSpec::interval_union(std::move(iv));
  }
  if (c.n < 1) throw UsageError("--n: required with --domain ball");
  return DomainSpec::make_ball(BallGeometry(c.n, c.radius));
}

PrepareOptions prepare_options(const RunConfig& c) {
  PrepareOptions o;
  o.tail_factor = c.tail_factor;
  o.lower_refine = c.lower_refine;
  return o;
}

TraceProblem make_problem(const RunConfig& c) {
  const DomainSpec d = make_domain(c);
  return prepare(d, BumpSource::random(d, c.seed).as_source(), c.terms, c.grid, prepare_options(c));
}

/// f* for a ball run: rearranged --input cells, or the seeded radial bump
/// source sampled on the ball grid.
DecreasingProfile ball_profile(const RunConfig& c, const BallGeometry& geom) {
  if (!c.input.empty()) {
    const SampledFunction f = read_input(c.input);
    if (std::abs(f.domain_measure() - geom.measure) > 1e-9 * geom.measure) {
      throw UsageError("--input: cell measures sum to " + comparelab::fmt(f.domain_measure()) +
                       " but |B(0,R)| = " + comparelab::fmt(geom.measure));
    }
    return decreasing_rearrangement(f);
  }
  const DomainSpec d = DomainSpec::make_ball(geom);
  const BumpSource src = BumpSource::random(d, c.seed);
  const SampleGrid g = make_grid(d, c.grid);
  std::vector<Cell> cells(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) cells[i] = {g.measures[i], src(g.centers[i])};
  return decreasing_rearrangement(SampledFunction(std::move(cells), geom.measure));
}

std::vector<std::pair<double, double>> parse_points(const std::vector<std::string>& items) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& item : items) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("--points: expected r:rho, got '" + item + "'");
    try {
      pts.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw UsageError("--points: expected r:rho, got '" + item + "'");
    }
  }
  if (pts.empty()) throw UsageError("--points: at least one r:rho pair is required");
  return pts;
}

int verdict_code(Verdict v) { return v == Verdict::fail ? kFailure : kSuccess; }

int cmd_rearrange(const RunConfig& c, std::ostream& out) {
  Output o(c.out, out);
  csv::write_profile(*o, decreasing_rearrangement(read_input(c.input)));
  return kSuccess;
}

int cmd_lorentz(const RunConfig& c, std::ostream& out) {
  const DecreasingProfile u = decreasing_rearrangement(read_input(c.input));
  const LorentzExponents e{c.p, c.q};
  const double v = c.maximal ? lorentz_norm_maximal(u, e) : lorentz_norm(u, e);
  Output o(c.out, out);
  *o << "p,q,norm\n" << comparelab::fmt(c.p) << ',' << comparelab::fmt(c.q) << ',' << comparelab::fmt(v) << '\n';
  return kSuccess;
}

int cmd_solve_ball(const RunConfig& c, std::ostream& out) {
  const BallGeometry geom(c.n, c.radius);
  const FracParams fp(c.alpha);
  const DecreasingProfile fstar = ball_profile(c, geom);
  const SpectralSolution u =
      spectral::solve_fractional_dirichlet(fstar, spectral::build_basis(DomainSpec::make_ball(geom), c.terms), fp);
  const double tol = c.tol > 0.0 ? c.tol : 1e-9;
  Output o(c.out, out);
  *o << "r,spectral,closed_form\n";
  const std::size_t rows = c.grid;
  for (std::size_t i = 0; i < rows; ++i) {
    const double r = geom.R * static_cast<double>(i) / static_cast<double>(rows);
    *o << comparelab::fmt(r) << ',' << comparelab::fmt(u.radial(r)) << ','
       << comparelab::fmt(ballgreen::radial_potential(fstar, geom, fp, r, tol)) << '\n';
  }
  *o << "# N=" << c.n << "\n# R=" << comparelab::fmt(c.radius) << "\n# alpha=" << comparelab::fmt(c.alpha)
     << "\n# K=" << c.terms << "\n# tail_sup=" << comparelab::fmt(u.tail.sup)
     << "\n# tail_l2=" << comparelab::fmt(u.tail.l2) << '\n';
  return kSuccess;
}

int cmd_extension(const RunConfig& c, std::ostream& out) {
  const BallGeometry geom(c.n, c.radius);
  const FracParams fp(c.alpha);
  const DecreasingProfile fstar = ball_profile(c, geom);
  const double tol = c.tol > 0.0 ? c.tol : std::numeric_limits<double>::infinity();
  const auto ext = spectral::ball_extension_separated(fstar, geom, fp, c.terms, tol);
  Output o(c.out, out);
  *o << "r,y,z,value\n";
  for (double y : c.y) {
    if (!(y >= 0.0)) throw UsageError("--y: heights must be >= 0");
    const double z = spectral::SeparatedExtension::z_from_height(y, fp);
    for (std::size_t i = 0; i < c.grid; ++i) {
      const double r = geom.R * static_cast<double>(i) / static_cast<double>(c.grid);
      *o << comparelab::fmt(r) << ',' << comparelab::fmt(y) << ',' << comparelab::fmt(z) << ','
         << comparelab::fmt(ext(r, z)) << '\n';
    }
  }
  *o << "# N=" << c.n << "\n# R=" << comparelab::fmt(c.radius) << "\n# alpha=" << comparelab::fmt(c.alpha)
     << "\n# K=" << c.terms << "\n# trace_tail_sup=" << comparelab::fmt(ext.tail().sup) << '\n';
  return kSuccess;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  const TraceProblem p = make_problem(c);
  const ComparisonReport r = compare_trace(p, FracParams(c.alpha));
  Output o(c.out, out);
  csv::write_comparison(*o, r);
  return verdict_code(r.verdict);
}

int cmd_compare_extension(const RunConfig& c, std::ostream& out) {
  const TraceProblem p = make_problem(c);
  const auto slices = compare_extension_slices(p, FracParams(c.alpha), c.y);
  Output o(c.out, out);
  csv::write_slices(*o, slices);
  int code = kSuccess;
  for (const auto& s : slices) code = std::max(code, verdict_code(s.verdict));
  return code;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const TraceProblem p = make_problem(c);
  const FracParams fp(c.alpha);
  std::vector<BoundReport> reports;
  if (c.check == "linfty") {
    reports.push_back(verify_linfty(p, fp));
  } else if (c.check == "extension-linfty") {
    if (c.y.empty()) throw UsageError("--y: required with --check extension-linfty");
    reports = verify_extension_linfty(p, fp, c.y);
  } else {
    if (!(c.p > 0.0)) throw UsageError("--p: required with --check lorentz");
    reports.push_back(verify_lorentz_regularity(p, fp, c.p, c.r));
  }
  Output o(c.out, out);
  csv::write_bounds(*o, reports);
  int code = kSuccess;
  for (const auto& b : reports) code = std::max(code, verdict_code(b.verdict));
  return code;
}

int cmd_best_constant(const RunConfig& c, std::ostream& out) {
  const BallGeometry geom(c.n, c.radius);
  const FracParams fp(c.alpha);
  const double tol = c.tol > 0.0 ? c.tol : 1e-12;
  const double quad = ballgreen::best_constant(geom, fp, c.p, tol);
  const bool closed = c.n == 3 && c.alpha == 1.0 && c.radius == 1.0;
  Output o(c.out, out);
  *o << "N,alpha,R,p,closed_form,quadrature\n"
     << c.n << ',' << comparelab::fmt(c.alpha) << ',' << comparelab::fmt(c.radius) << ',' << comparelab::fmt(c.p)
     << ',' << (closed ? comparelab::fmt(ballgreen::best_constant_n3_alpha1(c.p)) : std::string("nan")) << ','
     << comparelab::fmt(quad) << '\n';
  return kSuccess;
}

int cmd_green(const RunConfig& c, std::ostream& out) {
  const GreenComparison g =
      verify_green_vs_spectral(BallGeometry(c.n, c.radius), FracParams(c.alpha), c.terms, parse_points(c.points));
  Output o(c.out, out);
  *o << "r,rho,series,closed_form,classical,series_tail\n";
  for (const auto& row : g.rows) {
    *o << comparelab::fmt(row.r) << ',' << comparelab::fmt(row.rho) << ',' << comparelab::fmt(row.series) << ','
       << comparelab::fmt(row.closed) << ',' << comparelab::fmt(row.classical) << ','
       << comparelab::fmt(row.tail) << '\n';
  }
  csv::write_metadata(*o, g.report.metadata);
  return kSuccess;
}

// Option helpers. Required flags carry no default.
CLI::Option* add_alpha(CLI::App* s, RunConfig& c) {
  return s->add_option("--alpha", c.alpha, "fractional order in (0,2)")->required()->check(CLI::Range(0.0, 2.0));
}
CLI::Option* add_n(CLI::App* s, RunConfig& c) {
  return s->add_option("--n", c.n, "dimension N")->required()->check(CLI::PositiveNumber);
}
void add_radius(CLI::App* s, RunConfig& c) {
  s->add_option("--radius", c.radius, "ball radius R")->check(CLI::PositiveNumber)->capture_default_str();
}
void add_out(CLI::App* s, RunConfig& c) { s->add_option("--out", c.out, "output CSV (default: stdout)"); }
void add_terms(CLI::App* s, RunConfig& c) {
  s->add_option("--terms", c.terms, "eigenmodes K")->check(CLI::PositiveNumber)->capture_default_str();
}
void add_grid(CLI::App* s, RunConfig& c, const std::string& what) {
  s->add_option("--grid", c.grid, what)->check(CLI::PositiveNumber)->capture_default_str();
}
void add_domain(CLI::App* s, RunConfig& c) {
  s->add_option("--domain", c.domain, "interval-union | square | ball")
      ->required()
      ->check(CLI::IsMember({"interval-union", "square", "ball"}));
  s->add_option("--intervals", c.intervals, "a,b,c,d,... for interval-union")->delimiter(',');
  s->add_option("--n", c.n, "dimension N for --domain ball")->check(CLI::PositiveNumber);
  add_radius(s, c);
  add_terms(s, c);
  add_grid(s, c, "sampling grid G");
  s->add_option("--seed", c.seed, "source seed")->required();
  s->add_option("--tail-factor", c.tail_factor, "extra coefficients for tails, as a multiple of K")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--lower-refine", c.lower_refine, "refinement of the lower source grid")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}
void add_heights(CLI::App* s, RunConfig& c, bool required) {
  auto* o = s->add_option("--y", c.y, "heights y >= 0, comma separated")->delimiter(',');
  if (required) o->required();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Spectral fractional Laplacian comparison toolkit", "fraclap"};
  app.set_config("--config", "", "key = value config file; flags override it");
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  auto* rearrange = app.add_subcommand("rearrange", "decreasing rearrangement of measure,value cells");
  rearrange->add_option("--input", c.input, "CSV with header measure,value")->required();
  add_out(rearrange, c);

  auto* lorentz = app.add_subcommand("lorentz", "Lorentz norm of measure,value cells");
  lorentz->add_option("--input", c.input, "CSV with header measure,value")->required();
  lorentz->add_option("--p", c.p, "p in (0, inf]")->required();
  lorentz->add_option("--q", c.q, "q in (0, inf]")->required();
  lorentz->add_flag("--maximal", c.maximal, "use the maximal-function norm");
  add_out(lorentz, c);

  auto* solve_ball = app.add_subcommand("solve-ball", "spectral and closed-form solutions on a ball");
  auto* extension = app.add_subcommand("extension", "separated extension on a ball");
  for (auto* s : {solve_ball, extension}) {
    add_n(s, c);
    add_alpha(s, c);
    add_radius(s, c);
    add_terms(s, c);
    add_grid(s, c, "radial output points");
    s->add_option("--input", c.input, "source cells measure,value (default: seeded bumps)");
    s->add_option("--seed", c.seed, "source seed when --input is absent")->capture_default_str();
    s->add_option("--tol", c.tol, "quadrature (solve-ball) or tail (extension) tolerance");
    add_out(s, c);
  }
  add_heights(extension, c, true);

  auto* compare = app.add_subcommand("compare", "trace concentration comparison");
  auto* compare_ext = app.add_subcommand("compare-extension", "concentration comparison on extension slices");
  auto* verify = app.add_subcommand("verify", "bound checks");
  for (auto* s : {compare, compare_ext, verify}) {
    add_domain(s, c);
    add_alpha(s, c);
    add_out(s, c);
  }
  add_heights(compare_ext, c, true);
  add_heights(verify, c, false);
  verify->add_option("--check", c.check, "linfty | extension-linfty | lorentz")
      ->required()
      ->check(CLI::IsMember({"linfty", "extension-linfty", "lorentz"}));
  verify->add_option("--p", c.p, "source exponent for --check lorentz");
  verify->add_option("--r", c.r, "second Lorentz index for --check lorentz")->capture_default_str();

  auto* best = app.add_subcommand("best-constant", "best constant of the L^p to L^inf bound on a ball");
  add_n(best, c);
  add_alpha(best, c);
  add_radius(best, c);
  best->add_option("--p", c.p, "p > N/alpha")->required();
  best->add_option("--tol", c.tol, "relative quadrature tolerance");
  add_out(best, c);

  auto* green = app.add_subcommand("green", "eigen-series vs closed-form Green function on a ball");
  add_n(green, c);
  add_alpha(green, c);
  add_radius(green, c);
  add_terms(green, c);
  green->add_option("--points", c.points, "r:rho pairs, comma separated")->required()->delimiter(',');
  add_out(green, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "fraclap: " << e.what() << '\n';
    err << "usage: fraclap <" << "rearrange|lorentz|solve-ball|extension|compare|compare-extension|verify|"
        << "best-constant|green> [options]; run with --help for the grammar\n";
    return kUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  try {
    if (c.command == "rearrange") return cmd_rearrange(c, out);
    if (c.command == "lorentz") return cmd_lorentz(c, out);
    if (c.command == "solve-ball") return cmd_solve_ball(c, out);
    if (c.command == "extension") return cmd_extension(c, out);
    if (c.command == "compare") return cmd_compare(c, out);
    if (c.command == "compare-extension") return cmd_compare_extension(c, out);
    if (c.command == "verify") return cmd_verify(c, out);
    if (c.command == "best-constant") return cmd_best_constant(c, out);
    return cmd_green(c, out);
  } catch (const UsageError& e) {
    err << "fraclap " << c.command << ": " << e.what() << '\n';
    return kUsage;
  } catch (const domain_error& e) {
    err << "fraclap " << c.command << ": invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "fraclap " << c.command << ": " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace fraclap::cli
