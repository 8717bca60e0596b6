#ifndef LIGHTLIKE_SCENARIO_HPP
#define LIGHTLIKE_SCENARIO_HPP

#include <map>
#include <optional>

#include "lightlike/ambient.hpp"
#include "lightlike/submanifold.hpp"
#include "lightlike/tolerances.hpp"

namespace lightlike::scenario {

// A sectioned plain-text scenario: [ambient], [immersion], [frames],
// [samples], [tolerances], [expect]. Expressions are quoted strings in the
// expression grammar; vector fields are combinations of d(coord).
struct AmbientSpec {
  bool builtin = false;
  std::string builtin_name;
  int m = 0, q = 0;
  std::vector<std::string> coords;
  double mu = 0.0;
  std::map<std::pair<int, int>, std::string> metric;  // upper-triangular entries
  std::map<int, std::string> phi_cols;                // image of d(coord_i)
  std::string xi;
  std::map<int, std::string> eta;                     // optional; default g(xi, .)
};

struct Expectation {
  enum class Kind { integer, boolean, indices, expr, zero };
  Kind kind = Kind::integer;
  std::string key;        // e.g. "sigma"
  std::string display;    // e.g. "sigma 3"
  std::vector<int> args;  // 1-based indices
  long ivalue = 0;
  bool bvalue = false;
  std::vector<int> indices;
  std::string expr;
};

struct Scenario {
  std::string name;
  AmbientSpec ambient;
  std::vector<std::string> params;
  std::map<std::string, std::string> map_exprs;  // coord name -> expression
  std::vector<std::string> rad, screen, stransversal;
  std::vector<Eigen::VectorXd> points;
  int count = 0;
  unsigned seed = 0;
  std::map<std::string, std::pair<double, double>> boxes;
  std::optional<std::pair<double, double>> global_box;
  Tolerances tol;
  std::vector<Expectation> expects;
  bool has_immersion = false;
};

Scenario parse_scenario(const std::string& text, const std::string& name);
Scenario parse_scenario_file(const std::string& path);

ambient::AmbientStructure build_ambient(const Scenario& sc);
subm::Immersion build_immersion(const Scenario& sc,
                                const ambient::AmbientStructure& space);

// Explicit points plus `count` sampled ones from the boxes.
std::vector<Eigen::VectorXd> sample_points(const Scenario& sc, int count_override,
                                           long seed_override);

}  // namespace lightlike::scenario

#endif
