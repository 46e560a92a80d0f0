// Compares |u|* with the symmetrized solution for one random source on the
// unit square and prints the report as CSV.

#include <cstdlib>
#include <iostream>

#include "fraclap/fraclap.hpp"

int main(int argc, char** argv) {
  using namespace fraclap;
  const double alpha = argc > 1 ? std::atof(argv[1]) : 1.0;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  const auto domain = DomainSpec::unit_square();
  const auto problem = comparelab::prepare(domain, BumpSource::random(domain, seed).as_source(), 128, 256);
  const auto report = comparelab::compare_trace(problem, FracParams(alpha));
  csv::write_comparison(std::cout, report);
  return report.verdict == Verdict::pass ? 0 : 1;
}
