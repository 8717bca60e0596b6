#ifndef LIGHTLIKE_DRIVER_HPP
#define LIGHTLIKE_DRIVER_HPP

#include "lightlike/report.hpp"
#include "lightlike/scenario.hpp"

namespace lightlike::driver {

struct Options {
  int samples = -1;   // extra sampled points (-1: scenario default)
  long seed = -1;     // sampler seed override
  double tol = -1.0;  // classification tolerance override
};

// Full analysis: ambient admission, bundle splitting, Gauss-Weingarten,
// classification, distribution properties and expectation comparison.
report::Report analyze(const scenario::Scenario& sc, const Options& opt);

// Ambient structure suites only.
report::Report check_structure(const scenario::Scenario& sc, int samples, long seed);

}  // namespace lightlike::driver

#endif
