#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lightlike/submanifold.hpp"

using namespace lightlike;
namespace sm = lightlike::subm;
namespace la = lightlike::linalg;
namespace amb = lightlike::ambient;

namespace {

std::vector<std::string> operator+(std::vector<std::string> a,
                                   const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// The minimal ascreen example: 8-dimensional 3-lightlike submanifold of the
// flat cosymplectic R^13_4. The y1/y4 signs are fixed so that the declared
// frame is genuinely tangent.
struct Exa1 {
  amb::AmbientStructure space = amb::builtin_cosymplectic(6, 4);
  sm::Immersion imm;

  Exa1() {
    imm.params = {"w1", "w2", "w3", "w4", "w5", "w6", "w7", "w8"};
    const auto V = imm.params;
    const auto C = imm.params + space.coords;
    auto P = [&](const std::string& s) { return parse_scalar(s, V); };
    imm.map = {P("w1"),
               P("w2"),
               P("w3"),
               P("w4"),
               P("cos(w5)*cosh(w6)"),
               P("sin(w5)*cosh(w6)"),
               P("w4"),
               P("sqrt(2)*w8 - w2"),
               P("w7"),
               P("-w1"),
               P("cos(w5)*sinh(w6)"),
               P("sin(w5)*sinh(w6)"),
               P("w8")};
    auto F = [&](const std::string& s) { return parse_vector_field(s, C, space.coords); };
    imm.declared_rad = {F("d(x4)+d(y1)"), F("d(x1)-d(y4)"),
                        F("d(x2)+d(y2)+sqrt(2)*d(z)")};
    imm.declared_screen = {F("-x6*d(x5)+x5*d(x6)-y6*d(y5)+y5*d(y6)"),
                           F("-d(x2)+d(y2)"),
                           F("y5*d(x5)+y6*d(x6)+x5*d(y5)+x6*d(y6)"),
                           F("d(y3)"), F("d(x3)")};
    imm.declared_stransversal = {F("-y6*d(x5)+y5*d(x6)+x6*d(y5)-x5*d(y6)"),
                                 F("x5*d(x5)+x6*d(x6)-y5*d(y5)-y6*d(y6)")};
  }
};

Eigen::VectorXd omega0() {
  Eigen::VectorXd w(8);
  w << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8;
  return w;
}

Eigen::VectorXd unit(int dim, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[i] = 1.0;
  return v;
}

}  // namespace

TEST_CASE("tangent frame of a graph immersion") {
  auto space = amb::builtin_cosymplectic(2, 2);
  sm::Immersion imm;
  imm.params = {"w1", "w2"};
  auto P = [&](const std::string& s) { return parse_scalar(s, imm.params); };
  imm.map = {P("0"), P("w1"), P("0"), P("w2"), P("w1*w2")};
  Tolerances tol;
  Eigen::VectorXd w(2);
  w << 2.0, 3.0;
  auto tf = sm::tangent_frame(imm, space, w, tol);
  Eigen::VectorXd c0(5), c1(5);
  c0 << 0, 1, 0, 0, 3.0;  // (1, 0, d1 f)
  c1 << 0, 0, 0, 1, 2.0;  // (0, 1, d2 f)
  CHECK((tf.vectors.col(0) - c0).norm() == 0.0);
  CHECK((tf.vectors.col(1) - c1).norm() == 0.0);
}

TEST_CASE("declared frames pass tangency on the ascreen example") {
  Exa1 e;
  Tolerances tol;
  auto tf = sm::tangent_frame(e.imm, e.space, omega0(), tol);
  CHECK(tf.residual < 1e-9);
  CHECK(tf.vectors.cols() == 8);
}

TEST_CASE("a non-tangent declared vector is rejected") {
  Exa1 e;
  const auto C = e.imm.params + e.space.coords;
  e.imm.declared_screen.back() = parse_vector_field("d(z)", C, e.space.coords);
  Tolerances tol;
  CHECK_THROWS_AS(sm::tangent_frame(e.imm, e.space, omega0(), tol), ScenarioError);
}

TEST_CASE("split_bundles on the ascreen example") {
  Exa1 e;
  Tolerances tol;
  auto fp = sm::split_bundles(e.imm, e.space, omega0(), tol);
  CHECK(fp.r == 3);
  CHECK(fp.s == 5);
  CHECK(fp.wq == 2);
  CHECK(fp.ortho_residual < 1e-9);
  CHECK(fp.tangency_residual < 1e-9);

  // The transversal frame matches the closed-form vectors.
  Eigen::VectorXd n1 = 0.5 * (unit(13, 3) - unit(13, 6));
  Eigen::VectorXd n2 = 0.5 * (-unit(13, 0) - unit(13, 9));
  Eigen::VectorXd n3 =
      0.25 * (-unit(13, 1) - unit(13, 7) + std::sqrt(2.0) * unit(13, 12));
  CHECK((fp.Nv.col(0) - n1).norm() < 1e-10);
  CHECK((fp.Nv.col(1) - n2).norm() < 1e-10);
  CHECK((fp.Nv.col(2) - n3).norm() < 1e-10);

  // Signatures of the orthonormalized screen and transversal.
  REQUIRE(fp.eps_screen.size() == 5);
  CHECK(fp.eps_screen[0] == 1);
  CHECK(fp.eps_screen[1] == -1);
  CHECK(fp.eps_screen[2] == 1);
  CHECK(fp.eps_screen[3] == 1);
  CHECK(fp.eps_screen[4] == 1);
  CHECK(fp.eps_w[0] == 1);
  CHECK(fp.eps_w[1] == 1);
}

TEST_CASE("rank mismatch of a declared radical is caught") {
  Exa1 e;
  e.imm.declared_rad.pop_back();  // declare only 2 of the 3 radical fields
  e.imm.declared_screen.push_back(e.imm.declared_rad.front());  // keep count at 8
  Tolerances tol;
  CHECK_THROWS_AS(sm::split_bundles(e.imm, e.space, omega0(), tol), Error);
}

TEST_CASE("Riemannian submanifold: empty radical, full normal space") {
  auto space = amb::builtin_cosymplectic(2, 2);
  sm::Immersion imm;
  imm.params = {"w1", "w2"};
  auto P = [&](const std::string& s) { return parse_scalar(s, imm.params); };
  // A graph in the positive-definite block (x2, y2, z).
  imm.map = {P("0"), P("w1"), P("0"), P("w2"), P("w1 + w2")};
  Tolerances tol;
  Eigen::VectorXd w(2);
  w << 0.3, 0.4;
  auto fp = sm::split_bundles(imm, space, w, tol);
  CHECK(fp.r == 0);
  CHECK(fp.s == 2);
  CHECK(fp.wq == 3);
  CHECK(fp.N.cols == 0);
  CHECK(fp.ortho_residual < 1e-10);
}

TEST_CASE("Gauss-Weingarten on the ascreen example") {
  Exa1 e;
  Tolerances tol;
  const double w6 = 0.6;
  auto fp = sm::split_bundles(e.imm, e.space, omega0(), tol);
  auto gw = sm::gauss_weingarten(fp);

  CHECK(gw.recon_residual < 1e-9);
  CHECK(gw.tangent_residual < 1e-9);
  CHECK(gw.h_sym_residual < 1e-9);

  // h^l vanishes identically: the induced connection is metric.
  for (const auto& hl : gw.h_l) CHECK(hl.lpNorm<Eigen::Infinity>() < 1e-10);

  // h(E_i, E_i) = 0 and h^s vanishes on Rad x Rad.
  for (const auto& hs : gw.h_s)
    CHECK(hs.topLeftCorner(3, 3).lpNorm<Eigen::Infinity>() < 1e-10);

  // The nonzero screen fundamental form values: with rho = cosh(2 w6),
  // h^s(X1,X1) = -rho^{-3/2} W2 and h^s(X3,X3) = +rho^{-3/2} W2.
  const double rho = std::cosh(2.0 * w6);
  const double want = std::pow(rho, -1.5);
  CHECK(gw.h_s[1](3, 3) == doctest::Approx(-want).epsilon(1e-10));
  CHECK(gw.h_s[1](5, 5) == doctest::Approx(want).epsilon(1e-10));
  // W1-components of those diagonal entries vanish.
  CHECK(std::abs(gw.h_s[0](3, 3)) < 1e-10);
  CHECK(std::abs(gw.h_s[0](5, 5)) < 1e-10);

  auto rel = sm::shape_operator_relations_check(fp, gw);
  CHECK(rel.max() < 1e-9);

  // Metric connection: the defect identity holds with both sides ~ 0.
  for (Eigen::Index A = 0; A < fp.mt; ++A) {
    auto md = sm::metric_connection_defect(fp, gw, A, (A + 1) % fp.mt, (A + 2) % fp.mt);
    CHECK(std::abs(md.lhs - md.rhs) < 1e-9);
    CHECK(std::abs(md.lhs) < 1e-9);
  }
}

TEST_CASE("Lie bracket: direct vs torsion identity") {
  Exa1 e;
  Tolerances tol;
  auto fp = sm::split_bundles(e.imm, e.space, omega0(), tol);
  auto gw = sm::gauss_weingarten(fp);

  // Coordinate-like constant fields commute.
  Eigen::VectorXd c4 = unit(8, 6), c5 = unit(8, 7);  // slots of X4 = dy3, X5 = dx3
  CHECK(sm::lie_bracket(fp, c4, c5).norm() < 1e-12);

  // Antisymmetry and the torsion identity on every frame pair.
  for (Eigen::Index A = 0; A < fp.mt; ++A)
    for (Eigen::Index B = 0; B < fp.mt; ++B) {
      Eigen::VectorXd ca = unit(8, int(A)), cb = unit(8, int(B));
      Eigen::VectorXd br = sm::lie_bracket(fp, ca, cb);
      Eigen::VectorXd br2 = sm::lie_bracket(fp, cb, ca);
      CHECK((br + br2).lpNorm<Eigen::Infinity>() < 1e-12);
      Eigen::VectorXd tor = gw.nabla_bar(ca, cb) - gw.nabla_bar(cb, ca);
      CHECK((br - tor).lpNorm<Eigen::Infinity>() < 1e-9);
      // Brackets of tangent fields stay tangent.
      CHECK(la::subspace_defect(br, fp.tangent) < 1e-9);
    }
}

TEST_CASE("totally geodesic affine subspace") {
  auto space = amb::builtin_cosymplectic(2, 2);
  sm::Immersion imm;
  imm.params = {"w1", "w2"};
  auto P = [&](const std::string& s) { return parse_scalar(s, imm.params); };
  // A null plane: x1 = w1, y2 = w1 pairs opposite signs into a null direction.
  imm.map = {P("w1"), P("w2"), P("0"), P("w1"), P("0")};
  Tolerances tol;
  Eigen::VectorXd w(2);
  w << 0.5, -0.2;
  auto fp = sm::split_bundles(imm, space, w, tol);
  CHECK(fp.r == 1);
  auto gw = sm::gauss_weingarten(fp);
  for (const auto& hl : gw.h_l) CHECK(hl.lpNorm<Eigen::Infinity>() < 1e-12);
  for (const auto& hs : gw.h_s) CHECK(hs.lpNorm<Eigen::Infinity>() < 1e-12);
  auto rel = sm::shape_operator_relations_check(fp, gw);
  CHECK(rel.max() < 1e-12);
}
