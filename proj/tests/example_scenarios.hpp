// Programmatic builders for the worked examples, shared by the unit and
// acceptance tests. The bundled scenario files express the same data; the
// scenario tests check the two stay in sync.
#ifndef LIGHTLIKE_TESTS_EXAMPLE_SCENARIOS_HPP
#define LIGHTLIKE_TESTS_EXAMPLE_SCENARIOS_HPP

#include <string>
#include <vector>

#include "lightlike/ambient.hpp"
#include "lightlike/submanifold.hpp"

namespace examples {

using lightlike::ScalarExpr;
using lightlike::parse_scalar;
using lightlike::parse_vector_field;

inline std::vector<std::string> cat(std::vector<std::string> a,
                                    const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Case {
  lightlike::ambient::AmbientStructure space;
  lightlike::subm::Immersion imm;
};

// Minimal ascreen example: 8-dimensional 3-lightlike submanifold of the flat
// cosymplectic R^13_4.
inline Case minimal_ascreen() {
  Case c;
  c.space = lightlike::ambient::builtin_cosymplectic(6, 4);
  c.imm.params = {"w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"};
  const auto V = c.imm.params;
  const auto C = cat(c.imm.params, c.space.coords);
  auto P = [&](const std::string& s) { return parse_scalar(s, V); };
  auto F = [&](const std::string& s) {
    return parse_vector_field(s, C, c.space.coords);
  };
  c.imm.map = {P("w1"), P("w2"), P("w3"), P("w4"),
               P("cos(w5)*cosh(w6)"), P("sin(w5)*cosh(w6)"),
               P("w4"), P("sqrt(2)*w8 - w2"), P("w7"), P("-w1"),
               P("cos(w5)*sinh(w6)"), P("sin(w5)*sinh(w6)"), P("w8")};
  c.imm.declared_rad = {F("d(x4)+d(y1)"), F("d(x1)-d(y4)"),
                        F("d(x2)+d(y2)+sqrt(2)*d(z)")};
  c.imm.declared_screen = {F("-x6*d(x5)+x5*d(x6)-y6*d(y5)+y5*d(y6)"),
                           F("-d(x2)+d(y2)"),
                           F("y5*d(x5)+y6*d(x6)+x5*d(y5)+x6*d(y6)"),
                           F("d(y3)"), F("d(x3)")};
  c.imm.declared_stransversal = {F("-y6*d(x5)+y5*d(x6)+x6*d(y5)-x5*d(y6)"),
                                 F("x5*d(x5)+x6*d(x6)-y5*d(y5)-y6*d(y6)")};
  return c;
}

inline Eigen::VectorXd minimal_ascreen_point() {
  Eigen::VectorXd w(8);
  w << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8;
  return w;
}

// 4-lightlike ascreen example: 10-dimensional submanifold of the flat
// cosymplectic R^15_6 with a point-dependent sigma certificate.
inline Case ascreen_4lightlike() {
  Case c;
  c.space = lightlike::ambient::builtin_cosymplectic(7, 6);
  c.imm.params = {"w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8", "w9", "w10"};
  const auto V = c.imm.params;
  const auto C = cat(c.imm.params, c.space.coords);
  auto P = [&](const std::string& s) { return parse_scalar(s, V); };
  auto F = [&](const std::string& s) {
    return parse_vector_field(s, C, c.space.coords);
  };
  // coords: x1..x7, y1..y7, z
  c.imm.map = {P("w1"), P("w2"), P("w3"), P("w4"), P("w5"), P("w6"), P("w7"),
               P("w4"), P("w5"), P("sqrt(w10^2 - w3^2)"), P("-w1"), P("w8"),
               P("w6"), P("w9"), P("w10")};
  c.imm.declared_rad = {F("d(x4)+d(y1)"), F("d(x1)-d(y4)"), F("d(x5)+d(y2)"),
                        F("x3*d(x3)+y3*d(y3)+z*d(z)")};
  c.imm.declared_screen = {F("d(x6)+d(y6)"), F("d(x2)-d(y5)"),
                           F("y3*d(x3)-x3*d(y3)"), F("-d(x2)-d(y5)"),
                           F("d(y7)"), F("d(x7)")};
  c.imm.declared_stransversal = {F("d(x6)-d(y6)")};
  return c;
}

inline Eigen::VectorXd ascreen_4lightlike_point() {
  Eigen::VectorXd w(10);
  w << 0.3, 0.5, 0.4, 0.6, 0.2, 0.7, 0.9, 0.8, 0.5, 1.3;
  return w;
}

// Co-screen example: 8-dimensional 3-lightlike submanifold of a warped
// (non-flat) cosymplectic structure on R^13_4, with xi = d(z) in the screen
// transversal. The conformal factor on the (x5,y5) pair keeps the structure
// Kaehler-times-line while making the Christoffel symbols nonzero.
inline Case coscreen_warped() {
  Case c;
  auto& s = c.space;
  s.name = "warped cosymplectic R^13_4";
  s.dim = 13;
  s.mu = 0.0;
  for (int i = 1; i <= 6; ++i) s.coords.push_back("x" + std::to_string(i));
  for (int i = 1; i <= 6; ++i) s.coords.push_back("y" + std::to_string(i));
  s.coords.push_back("z");
  const auto& A = s.coords;
  auto PA = [&](const std::string& e) { return parse_scalar(e, A); };
  auto zero = [&] { return lightlike::make_constant(0.0, A); };
  s.metric.assign(13, std::vector<ScalarExpr>(13, zero()));
  const std::string f = "1 + x5^2 + y5^2";
  const char* diag[13] = {"-1", "-1", "1", "1", nullptr, "1",
                          "-1", "-1", "1", "1", nullptr, "1", "1"};
  for (int i = 0; i < 13; ++i)
    s.metric[std::size_t(i)][std::size_t(i)] = diag[i] ? PA(diag[i]) : PA(f);
  s.phi.assign(13, std::vector<ScalarExpr>(13, zero()));
  for (int i = 0; i < 6; ++i) {
    s.phi[std::size_t(6 + i)][std::size_t(i)] = PA("-1");  // phi(dx_i) = -dy_i
    s.phi[std::size_t(i)][std::size_t(6 + i)] = PA("1");   // phi(dy_i) = dx_i
  }
  s.xi.assign(13, zero());
  s.xi[12] = PA("1");
  s.eta.assign(13, zero());
  s.eta[12] = PA("1");

  c.imm.params = {"w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"};
  const auto V = c.imm.params;
  const auto C = cat(c.imm.params, s.coords);
  auto P = [&](const std::string& e) { return parse_scalar(e, V); };
  auto F = [&](const std::string& e) { return parse_vector_field(e, C, s.coords); };
  c.imm.map = {P("w1"), P("w2"), P("w3"), P("w4"), P("w5"), P("w6"),
               P("w4"), P("w7"), P("w2"), P("-w1"), P("sqrt(w5)"), P("w8"),
               P("1")};
  c.imm.declared_rad = {F("d(x4)+d(y1)"), F("d(x1)-d(y4)"), F("d(x2)+d(y3)")};
  c.imm.declared_screen = {F("2*y5*d(x5)+d(y5)"), F("d(x3)-d(y2)"),
                           F("2*(d(x3)+d(y2))"), F("2*d(y6)"), F("2*d(x6)")};
  c.imm.declared_stransversal = {F("d(x5)-2*y5*d(y5)"), F("d(z)")};
  return c;
}

inline Eigen::VectorXd coscreen_warped_point() {
  Eigen::VectorXd w(8);
  w << 0.4, 0.3, 0.7, 0.2, 0.9, 0.5, 0.6, 0.8;
  return w;
}

}  // namespace examples

#endif
