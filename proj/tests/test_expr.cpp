#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lightlike/expr.hpp"

using namespace lightlike;

namespace {

const std::vector<std::string> W2 = {"w1", "w2"};

double fd_step = 1e-5;

// Central finite differences of the plain value evaluation.
Eigen::VectorXd fd_grad(const ScalarExpr& f, const Eigen::VectorXd& p) {
  Eigen::VectorXd g(p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    std::vector<double> lo(p.data(), p.data() + p.size());
    std::vector<double> hi = lo;
    lo[std::size_t(k)] -= fd_step;
    hi[std::size_t(k)] += fd_step;
    g[k] = (eval_value(f, hi) - eval_value(f, lo)) / (2.0 * fd_step);
  }
  return g;
}

Eigen::MatrixXd fd_hess(const ScalarExpr& f, const Eigen::VectorXd& p) {
  Eigen::MatrixXd h(p.size(), p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    Eigen::VectorXd hi = p, lo = p;
    hi[k] += fd_step;
    lo[k] -= fd_step;
    h.col(k) = (eval_jet2(f, hi).g - eval_jet2(f, lo).g) / (2.0 * fd_step);
  }
  return 0.5 * (h + h.transpose());
}

// Random expression trees over the grammar, kept domain-safe by construction
// (sqrt and half powers wrap a strictly positive combination).
struct AstGen {
  std::mt19937_64 rng;
  const std::vector<std::string>& vars;

  AstGen(std::uint64_t seed, const std::vector<std::string>& v) : rng(seed), vars(v) {}

  std::string positive(int depth) {
    return "(1 + (" + gen(depth - 1) + ")^2)";
  }

  std::string gen(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    switch (pick(rng)) {
      case 0: {
        std::uniform_real_distribution<double> c(-2.0, 2.0);
        double v = c(rng);
        return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
      }
      case 1: {
        std::uniform_int_distribution<std::size_t> iv(0, vars.size() - 1);
        return vars[iv(rng)];
      }
      case 2: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
      case 3: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
      case 4: return "(" + gen(depth - 1) + " * " + gen(depth - 1) + ")";
      case 5: return "(" + gen(depth - 1) + " / " + positive(depth - 1) + ")";
      case 6: return "sin(" + gen(depth - 1) + ")";
      case 7: return "cos(" + gen(depth - 1) + ")";
      case 8: return "sqrt(" + positive(depth - 1) + ")";
      default: return "(" + positive(depth - 1) + ")^(3/2)";
    }
  }
};

}  // namespace

TEST_CASE("parse shapes") {
  auto f = parse_scalar("cos(w5)*cosh(w6)", {"w5", "w6"});
  CHECK(f.root->kind == Expr::Kind::mul);
  CHECK(f.root->a->kind == Expr::Kind::cos);
  CHECK(f.root->b->kind == Expr::Kind::cosh);

  auto g = parse_scalar("sqrt(z^2 - x3^2)", {"x3", "z"});
  CHECK(g.root->kind == Expr::Kind::sqrt_fn);
  CHECK(g.root->a->kind == Expr::Kind::sub);
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_scalar("w1 +* w2", W2), ParseError);
  try {
    parse_scalar("w1 +* w2", W2);
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);  // 1-based offset of the '*'
  }
  CHECK_THROWS_AS(parse_scalar("w1 + q", W2), ParseError);      // unknown variable
  CHECK_THROWS_AS(parse_scalar("w1 $ w2", W2), ParseError);     // lex error
  CHECK_THROWS_AS(parse_scalar("w1 w2", W2), ParseError);       // no implicit mult
  CHECK_THROWS_AS(parse_scalar("tan(w1)", W2), ParseError);     // unknown function
  CHECK_THROWS_AS(parse_scalar("w1^w2", W2), ParseError);       // non-constant exponent
  CHECK_THROWS_AS(parse_scalar("w1^(1/3)", W2), ParseError);    // not half-integer
  CHECK_THROWS_AS(parse_scalar("", W2), ParseError);
}

TEST_CASE("precedence") {
  // ^ binds tighter than unary minus: -w1^2 == -(w1^2)
  auto f = parse_scalar("-w1^2", W2);
  Eigen::VectorXd p(2);
  p << 3.0, 0.0;
  CHECK(eval_jet2(f, p).v == -9.0);

  auto g = parse_scalar("w1 + w2 * w1^2", W2);
  p << 2.0, 5.0;
  CHECK(eval_jet2(g, p).v == 22.0);

  // negative and half-integer exponents
  auto h = parse_scalar("w1^-2", W2);
  CHECK(eval_jet2(h, p).v == doctest::Approx(0.25));
  auto k = parse_scalar("w1^(3/2)", W2);
  CHECK(eval_jet2(k, p).v == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("jet of a constant") {
  auto f = parse_scalar("7", W2);
  Eigen::VectorXd p(2);
  p << 1.0, -2.0;
  Jet2 j = eval_jet2(f, p);
  CHECK(j.v == 7.0);
  CHECK(j.g.norm() == 0.0);
  CHECK(j.h.norm() == 0.0);
}

TEST_CASE("jet of w1*w2") {
  auto f = parse_scalar("w1*w2", W2);
  Eigen::VectorXd p(2);
  p << 2.0, 3.0;
  Jet2 j = eval_jet2(f, p);
  CHECK(j.v == 6.0);
  CHECK(j.g[0] == 3.0);
  CHECK(j.g[1] == 2.0);
  CHECK(j.h(0, 0) == 0.0);
  CHECK(j.h(0, 1) == 1.0);
  CHECK(j.h(1, 0) == 1.0);
  CHECK(j.h(1, 1) == 0.0);
}

TEST_CASE("cos*cosh against finite differences") {
  auto f = parse_scalar("cos(w5)*cosh(w6)", {"w5", "w6"});
  Eigen::VectorXd p(2);
  p << 0.3, 0.7;
  Jet2 j = eval_jet2(f, p);
  CHECK((j.g - fd_grad(f, p)).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((j.h - fd_hess(f, p)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("domain errors") {
  auto f = parse_scalar("sqrt(w1 - w2)", W2);
  Eigen::VectorXd p(2);
  p << 1.0, 4.0;
  CHECK_THROWS_AS(eval_jet2(f, p), DomainError);
  try {
    eval_jet2(f, p);
  } catch (const DomainError& e) {
    CHECK(e.subexpr == "sqrt(w1 - w2)");
  }
  auto g = parse_scalar("w1 / (w2 - 4)", W2);
  CHECK_THROWS_AS(eval_jet2(g, p), DomainError);
}

TEST_CASE("random trees against finite differences") {
  AstGen gen(20240817u, W2);
  std::mt19937_64 prng(99u);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  int done = 0;
  while (done < 1000) {
    std::string src = gen.gen(3);
    ScalarExpr f = parse_scalar(src, W2);
    Eigen::VectorXd p(2);
    p << coord(prng), coord(prng);
    Jet2 j;
    try {
      j = eval_jet2(f, p);
    } catch (const DomainError&) {
      continue;  // regenerate; generator guards most but not all domains
    }
    if (!std::isfinite(j.v) || !j.g.allFinite() || !j.h.allFinite()) continue;
    if (std::abs(j.v) > 1e6 || j.g.lpNorm<Eigen::Infinity>() > 1e6 ||
        j.h.lpNorm<Eigen::Infinity>() > 1e6)
      continue;  // FD is meaningless in blow-up regions
    Eigen::VectorXd gfd = fd_grad(f, p);
    Eigen::MatrixXd hfd = fd_hess(f, p);
    const double ge = (j.g - gfd).lpNorm<Eigen::Infinity>();
    const double he = (j.h - hfd).lpNorm<Eigen::Infinity>();
    CHECK(ge < 1e-6 * (1.0 + j.g.lpNorm<Eigen::Infinity>()));
    CHECK(he < 1e-4 * (1.0 + j.h.lpNorm<Eigen::Infinity>()));
    ++done;
  }
}

TEST_CASE("chain rule as an algebraic identity") {
  // Jet of f(g(w)) computed two ways: by evaluating the composed AST, and by
  // composing the jet of f with the jet of g through jet_chain.
  auto g = parse_scalar("w1^2 + w2", W2);
  auto composed = parse_scalar("sin(w1^2 + w2)", W2);
  Eigen::VectorXd p(2);
  p << 0.4, -0.2;
  Jet2 jg = eval_jet2(g, p);
  Jet2 direct = eval_jet2(composed, p);
  Jet2 chained = jet_chain(std::sin(jg.v), std::cos(jg.v), -std::sin(jg.v), jg);
  CHECK(std::abs(direct.v - chained.v) < 1e-15);
  CHECK((direct.g - chained.g).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((direct.h - chained.h).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("sum and product rules as algebraic identities") {
  auto a = parse_scalar("sin(w1)*w2", W2);
  auto b = parse_scalar("cosh(w2) - w1", W2);
  auto sum = parse_scalar("(sin(w1)*w2) + (cosh(w2) - w1)", W2);
  auto prod = parse_scalar("(sin(w1)*w2) * (cosh(w2) - w1)", W2);
  Eigen::VectorXd p(2);
  p << 0.7, 0.3;
  Jet2 ja = eval_jet2(a, p), jb = eval_jet2(b, p);
  Jet2 js = eval_jet2(sum, p), jp = eval_jet2(prod, p);
  Jet2 js2 = ja + jb, jp2 = ja * jb;
  CHECK((js.g - js2.g).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((js.h - js2.h).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((jp.g - jp2.g).lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK((jp.h - jp2.h).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("vector field parsing") {
  const std::vector<std::string> coords = {"x3", "y3", "z"};
  const std::vector<std::string> vars = {"w1", "x3", "y3", "z"};

  auto vf = parse_vector_field("x3*d(x3) + y3*d(y3) + z*d(z)", vars, coords);
  REQUIRE(vf.comps.size() == 3);
  std::vector<double> env = {0.0, 2.0, 3.0, 5.0};
  CHECK(eval_value(vf.comps[0], env) == 2.0);
  CHECK(eval_value(vf.comps[1], env) == 3.0);
  CHECK(eval_value(vf.comps[2], env) == 5.0);

  auto vg = parse_vector_field("(1/(2*z^2))*(-x3*d(x3) - y3*d(y3) + z*d(z))", vars, coords);
  CHECK(eval_value(vg.comps[0], env) == doctest::Approx(-2.0 / 50.0));
  CHECK(eval_value(vg.comps[2], env) == doctest::Approx(5.0 / 50.0));

  auto vz = parse_vector_field("0", vars, coords);
  CHECK(eval_value(vz.comps[0], env) == 0.0);

  CHECK_THROWS_AS(parse_vector_field("d(x3)*d(y3)", vars, coords), ParseError);
  CHECK_THROWS_AS(parse_vector_field("x3", vars, coords), ParseError);
  CHECK_THROWS_AS(parse_vector_field("d(q)", vars, coords), ParseError);
  CHECK_THROWS_AS(parse_vector_field("1/d(x3)", vars, coords), ParseError);
}
