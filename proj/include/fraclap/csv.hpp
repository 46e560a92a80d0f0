#pragma once

// CSV input and output for sampled functions, profiles and reports.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/comparelab.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/rearrange.hpp"

namespace fraclap::csv {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  return out;
}

inline double parse_number(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw domain_error("csv: line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Reads `measure,value` rows after a required header. Blank lines and lines
/// starting with '#' are skipped.
inline SampledFunction read_cells(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool header = false;
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = detail::split(t);
    if (!header) {
      if (f.size() != 2 || f[0] != "measure" || f[1] != "value") {
        throw domain_error("csv: expected header 'measure,value', got '" + t + "'");
      }
      header = true;
      continue;
    }
    if (f.size() != 2) throw domain_error("csv: line " + std::to_string(n) + ": expected 2 fields");
    cells.push_back({detail::parse_number(f[0], n), detail::parse_number(f[1], n)});
  }
  if (!header) throw domain_error("csv: missing header 'measure,value'");
  if (cells.empty()) throw domain_error("csv: no data rows");
  return SampledFunction::from_cells(std::move(cells));
}

inline void write_cells(std::ostream& out, const SampledFunction& f) {
  out << "measure,value\n";
  for (const auto& c : f.cells()) out << comparelab::fmt(c.measure) << ',' << comparelab::fmt(c.value) << '\n';
}

/// `s,value` with s the right endpoint of each block.
inline void write_profile(std::ostream& out, const DecreasingProfile& u) {
  out << "s,value\n";
  const auto& s = u.breakpoints();
  const auto& v = u.values();
  for (std::size_t b = 0; b < v.size(); ++b) out << comparelab::fmt(s[b + 1]) << ',' << comparelab::fmt(v[b]) << '\n';
}

inline void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

// Metadata minus the keys already written as the report summary.
inline void write_metadata_except_summary(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) {
    if (k == "y" || k == "max_violation" || k == "slack" || k == "verdict") continue;
    out << "# " << k << '=' << v << '\n';
  }
}

/// `s,U,V,Z` rows, then a `# key=value` block with slack and verdict.
inline void write_comparison(std::ostream& out, const ComparisonReport& r) {
  out << "s,U,V,Z\n";
  for (std::size_t i = 0; i < r.s_grid.size(); ++i) {
    out << comparelab::fmt(r.s_grid[i]) << ',' << comparelab::fmt(r.U[i]) << ',' << comparelab::fmt(r.V[i]) << ','
        << comparelab::fmt(r.Z[i]) << '\n';
  }
  out << "# y=" << comparelab::fmt(r.y) << '\n';
  out << "# max_violation=" << comparelab::fmt(r.max_violation) << '\n';
  out << "# slack=" << comparelab::fmt(r.slack) << '\n';
  out << "# verdict=" << to_string(r.verdict) << '\n';
  write_metadata_except_summary(out, r.metadata);
}

/// Several slices in one table, `y,s,U,V,Z`, then each slice's metadata.
inline void write_slices(std::ostream& out, const std::vector<ComparisonReport>& slices) {
  out << "y,s,U,V,Z\n";
  for (const auto& r : slices) {
    for (std::size_t i = 0; i < r.s_grid.size(); ++i) {
      out << comparelab::fmt(r.y) << ',' << comparelab::fmt(r.s_grid[i]) << ',' << comparelab::fmt(r.U[i]) << ','
          << comparelab::fmt(r.V[i]) << ',' << comparelab::fmt(r.Z[i]) << '\n';
    }
  }
  for (const auto& r : slices) {
    out << "# y=" << comparelab::fmt(r.y) << " max_violation=" << comparelab::fmt(r.max_violation)
        << " slack=" << comparelab::fmt(r.slack) << " verdict=" << to_string(r.verdict) << '\n';
    write_metadata_except_summary(out, r.metadata);
  }
}

inline void write_bound_header(std::ostream& out) { out << "lhs,rhs,constant,margin,verdict\n"; }

inline void write_bound_row(std::ostream& out, const BoundReport& b) {
  out << comparelab::fmt(b.lhs) << ',' << comparelab::fmt(b.rhs) << ',' << comparelab::fmt(b.constant) << ','
      << comparelab::fmt(b.margin) << ',' << to_string(b.verdict) << '\n';
}

/// One row per report under a single header, then each report's metadata.
inline void write_bounds(std::ostream& out, const std::vector<BoundReport>& reports) {
  write_bound_header(out);
  for (const auto& b : reports) write_bound_row(out, b);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << "# row=" << i << '\n';
    write_metadata(out, reports[i].metadata);
  }
}

inline void write_bound(std::ostream& out, const BoundReport& b) { write_bounds(out, {b}); }

}  // namespace fraclap::csv
