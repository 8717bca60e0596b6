#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lightlike/linalg.hpp"
#include "rational_oracle.hpp"

using namespace lightlike;
namespace la = lightlike::linalg;

namespace {

// Flat diagonal metric of R^13_4 in the order (x1..x6, y1..y6, z).
Eigen::MatrixXd metric_r13_4() {
  Eigen::VectorXd d(13);
  d << -1, -1, 1, 1, 1, 1, -1, -1, 1, 1, 1, 1, 1;
  return d.asDiagonal();
}

Eigen::VectorXd unit(int dim, int i, double s = 1.0) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[i] = s;
  return v;
}

constexpr int X1 = 0, X2 = 1, X3 = 2, X4 = 3, X5 = 4, X6 = 5;
constexpr int Y1 = 6, Y2 = 7, Y3 = 8, Y4 = 9, Y5 = 10, Y6 = 11, Z = 12;

struct Exa1Frames {
  Eigen::MatrixXd E, S, W;  // radical, screen, screen transversal
  Eigen::MatrixXd G;
  double x5, x6, y5, y6;
};

Exa1Frames exa1_at(double w5, double w6) {
  Exa1Frames f;
  f.G = metric_r13_4();
  f.x5 = std::cos(w5) * std::cosh(w6);
  f.x6 = std::sin(w5) * std::cosh(w6);
  f.y5 = std::cos(w5) * std::sinh(w6);
  f.y6 = std::sin(w5) * std::sinh(w6);
  f.E.resize(13, 3);
  f.E.col(0) = unit(13, X4) + unit(13, Y1);
  f.E.col(1) = unit(13, X1) - unit(13, Y4);
  f.E.col(2) = unit(13, X2) + unit(13, Y2) + std::sqrt(2.0) * unit(13, Z);
  f.S.resize(13, 5);
  f.S.col(0) = -f.x6 * unit(13, X5) + f.x5 * unit(13, X6) - f.y6 * unit(13, Y5) +
               f.y5 * unit(13, Y6);
  f.S.col(1) = -unit(13, X2) + unit(13, Y2);
  f.S.col(2) = f.y5 * unit(13, X5) + f.y6 * unit(13, X6) + f.x5 * unit(13, Y5) +
               f.x6 * unit(13, Y6);
  f.S.col(3) = unit(13, Y3);
  f.S.col(4) = unit(13, X3);
  f.W.resize(13, 2);
  f.W.col(0) = -f.y6 * unit(13, X5) + f.y5 * unit(13, X6) + f.x6 * unit(13, Y5) -
               f.x5 * unit(13, Y6);
  f.W.col(1) = f.x5 * unit(13, X5) + f.x6 * unit(13, X6) - f.y5 * unit(13, Y5) -
               f.y6 * unit(13, Y6);
  return f;
}

}  // namespace

TEST_CASE("gram basics") {
  Eigen::MatrixXd G(2, 2);
  G << -1, 0, 0, 1;
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd g = la::gram(V, G);
  CHECK(g(0, 0) == -1.0);
  CHECK(g(1, 1) == 1.0);
  CHECK(g(0, 1) == 0.0);

  Eigen::MatrixXd bad(3, 2);
  CHECK_THROWS_AS(la::gram(bad, G), Error);
}

TEST_CASE("gram of the example radical frame vanishes") {
  auto f = exa1_at(0.4, 0.7);
  Eigen::MatrixXd g = la::gram(f.E, f.G);
  CHECK(g.lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("gram equals direct signed summation on random vectors") {
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 5;
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = (rng() & 1) ? 1.0 : -1.0;
    Eigen::MatrixXd G = d.asDiagonal();
    Eigen::MatrixXd V(dim, 3);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < 3; ++j) V(i, j) = u(rng);
    Eigen::MatrixXd g = la::gram(V, G);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += d[i] * V(i, a) * V(i, b);
        CHECK(std::abs(g(a, b) - s) < 1e-12);
      }
  }
}

TEST_CASE("radical: Euclidean orthonormal frame has empty radical") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(4, 4).leftCols(3);
  auto r = la::radical(V, G, 1e-9);
  CHECK(r.rank == 0);
  CHECK(r.block.count() == 0);
}

TEST_CASE("radical: a null vector spans its own radical") {
  Eigen::MatrixXd G(2, 2);
  G << -1, 0, 0, 1;
  Eigen::MatrixXd V(2, 1);
  V << 1, 1;
  auto r = la::radical(V, G, 1e-9);
  CHECK(r.rank == 1);
  CHECK(la::subspace_residual(r.block.vectors.col(0), V) < 1e-12);
}

TEST_CASE("radical: example tangent frame has rank 3") {
  auto f = exa1_at(0.3, 0.5);
  Eigen::MatrixXd T(13, 8);
  T << f.E, f.S;
  auto r = la::radical(T, f.G, 1e-9);
  CHECK(r.rank == 3);
  CHECK(la::mutual_span_residual(r.block.vectors, f.E) < 1e-9);
}

TEST_CASE("radical: dependent input rejected") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd V(3, 2);
  V.col(0) = unit(3, 0);
  V.col(1) = 2.0 * unit(3, 0);
  CHECK_THROWS_AS(la::radical(V, G, 1e-9), DegenerateError);
}

TEST_CASE("radical rank matches the exact rational oracle") {
  std::mt19937_64 rng(20250810u);
  for (int trial = 0; trial < 150; ++trial) {
    const int dim = 3 + int(rng() % 5);  // 3..7
    const int k = 1 + int(rng() % std::min(dim, 4));
    std::vector<int> signs(static_cast<std::size_t>(dim));
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) {
      signs[std::size_t(i)] = (rng() & 1) ? 1 : -1;
      d[i] = signs[std::size_t(i)];
    }
    std::vector<std::vector<long long>> cols;
    Eigen::MatrixXd V(dim, k);
    for (int j = 0; j < k; ++j) {
      std::vector<long long> c(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        c[std::size_t(i)] = (long long)(rng() % 9) - 4;
        V(i, j) = double(c[std::size_t(i)]);
      }
      cols.push_back(std::move(c));
    }
    // Independence gate: the production code requires independent inputs.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    if (svd.singularValues().size() == 0 ||
        svd.singularValues()(svd.singularValues().size() - 1) <
            1e-6 * svd.singularValues()(0))
      continue;
    const int exact_nullity = k - oracle::rank(oracle::gram(cols, signs));
    auto r = la::radical(V, d.asDiagonal(), 1e-9);
    CHECK(r.rank == exact_nullity);
  }
}

TEST_CASE("radical/gram consistency property") {
  auto f = exa1_at(0.9, 0.2);
  Eigen::MatrixXd T(13, 8);
  T << f.E, f.S;
  auto r = la::radical(T, f.G, 1e-9);
  for (Eigen::Index i = 0; i < r.block.count(); ++i) {
    Eigen::VectorXd gv = f.G * r.block.vectors.col(i);
    double mx = 0.0;
    for (Eigen::Index j = 0; j < T.cols(); ++j)
      mx = std::max(mx, std::abs(gv.dot(T.col(j))));
    CHECK(mx < 10.0 * 1e-9);
  }
}

TEST_CASE("null frame in the plane") {
  Eigen::MatrixXd G(2, 2);
  G << -1, 0, 0, 1;
  Eigen::MatrixXd E(2, 1);
  E << 1, 1;
  auto N = la::null_transversal_frame(E, Eigen::MatrixXd(2, 0), Eigen::MatrixXd(2, 0), G,
                                      1e-12);
  CHECK(N.vectors(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(N.vectors(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("null frame reproduces the example transversals") {
  auto f = exa1_at(0.4, 0.7);
  auto N = la::null_transversal_frame(f.E, f.S, f.W, f.G, 1e-12);
  REQUIRE(N.count() == 3);
  Eigen::VectorXd n1 = 0.5 * (unit(13, X4) - unit(13, Y1));
  Eigen::VectorXd n2 = 0.5 * (-unit(13, X1) - unit(13, Y4));
  Eigen::VectorXd n3 = 0.25 * (-unit(13, X2) - unit(13, Y2) + std::sqrt(2.0) * unit(13, Z));
  CHECK((N.vectors.col(0) - n1).norm() < 1e-12);
  CHECK((N.vectors.col(1) - n2).norm() < 1e-12);
  CHECK((N.vectors.col(2) - n3).norm() < 1e-12);
}

TEST_CASE("null frame defining equations on random instances") {
  std::mt19937_64 rng(31337u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 60) {
    // Random signature with at least one (+,-) pair for a null direction.
    const int dim = 4 + int(rng() % 4);  // 4..7
    Eigen::VectorXd d(dim);
    int npos = 0;
    for (int i = 0; i < dim; ++i) {
      d[i] = (rng() & 1) ? 1.0 : -1.0;
      if (d[i] > 0) ++npos;
    }
    if (npos == 0 || npos == dim) continue;
    // One null direction from a (+,-) pair, mixed by a random invertible
    // change inside the radical (here r = 1).
    int ip = -1, in = -1;
    for (int i = 0; i < dim; ++i) (d[i] > 0 ? ip : in) = i;
    Eigen::MatrixXd E(dim, 1);
    E.col(0) = unit(dim, ip) + unit(dim, in);
    E.col(0) *= (0.5 + std::abs(u(rng)));
    // Screen: a couple of coordinate directions not used by E.
    std::vector<int> rest;
    for (int i = 0; i < dim; ++i)
      if (i != ip && i != in) rest.push_back(i);
    const int ns = int(rest.size()) / 2, nw = int(rest.size()) - ns;
    Eigen::MatrixXd S(dim, ns), W(dim, nw);
    for (int j = 0; j < ns; ++j) S.col(j) = unit(dim, rest[std::size_t(j)]);
    for (int j = 0; j < nw; ++j) W.col(j) = unit(dim, rest[std::size_t(ns + j)]);
    Eigen::MatrixXd G = d.asDiagonal();

    auto N = la::null_transversal_frame(E, S, W, G, 1e-12);
    // g(E_i, N_j) = delta, g(N,N) = 0, N orthogonal to S and W.
    Eigen::MatrixXd EN = E.transpose() * G * N.vectors;
    Eigen::MatrixXd NN = N.vectors.transpose() * G * N.vectors;
    CHECK((EN - Eigen::MatrixXd::Identity(1, 1)).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(NN.lpNorm<Eigen::Infinity>() < 1e-10);
    if (ns) CHECK((S.transpose() * G * N.vectors).lpNorm<Eigen::Infinity>() < 1e-10);
    if (nw) CHECK((W.transpose() * G * N.vectors).lpNorm<Eigen::Infinity>() < 1e-10);
    ++done;
  }
}

TEST_CASE("signed orthonormalization on the example screen") {
  const double w6 = 0.7;
  auto f = exa1_at(0.4, w6);
  auto S = la::signed_orthonormalize(f.S, f.G, 1e-9);
  const double rho = std::cosh(2.0 * w6);
  CHECK((S.vectors.col(0) - f.S.col(0) / std::sqrt(rho)).norm() < 1e-12);
  CHECK((S.vectors.col(1) - f.S.col(1) / std::sqrt(2.0)).norm() < 1e-12);
  CHECK(S.signatures[0] == 1);
  CHECK(S.signatures[1] == -1);
  CHECK(S.signatures[2] == 1);
  CHECK(S.signatures[3] == 1);
  CHECK(S.signatures[4] == 1);
  // Orthonormality under the metric.
  Eigen::MatrixXd g = la::gram(S.vectors, f.G);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const double want = (a == b) ? double(S.signatures[std::size_t(a)]) : 0.0;
      CHECK(std::abs(g(a, b) - want) < 1e-10);
    }
}

TEST_CASE("signed orthonormalization: idempotent on orthonormal input") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(3, 3);
  auto S = la::signed_orthonormalize(V, G, 1e-9);
  CHECK((S.vectors - V).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("signed orthonormalization handles hyperbolic pairs") {
  // Two null vectors with nonzero cross product (signature (-,+)).
  Eigen::MatrixXd G(2, 2);
  G << -1, 0, 0, 1;
  Eigen::MatrixXd V(2, 2);
  V.col(0) << 1, 1;
  V.col(1) << -1, 1;
  auto S = la::signed_orthonormalize(V, G, 1e-9);
  Eigen::MatrixXd g = la::gram(S.vectors, G);
  CHECK(std::abs(std::abs(g(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(g(1, 1)) - 1.0) < 1e-12);
  CHECK(std::abs(g(0, 1)) < 1e-12);
  CHECK(S.signatures[0] + S.signatures[1] == 0);  // one +1, one -1
}

TEST_CASE("signed orthonormalization: degenerate span rejected") {
  Eigen::MatrixXd G(2, 2);
  G << -1, 0, 0, 1;
  Eigen::MatrixXd V(2, 1);
  V << 1, 1;  // a single null vector spans a degenerate line
  CHECK_THROWS_AS(la::signed_orthonormalize(V, G, 1e-9), DegenerateError);
}

TEST_CASE("signed orthonormalization preserves span on random input") {
  std::mt19937_64 rng(555u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 40) {
    const int dim = 5;
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = (rng() & 1) ? 1.0 : -1.0;
    Eigen::MatrixXd G = d.asDiagonal();
    Eigen::MatrixXd V(dim, 3);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < 3; ++j) V(i, j) = u(rng);
    la::FrameBlock S;
    try {
      S = la::signed_orthonormalize(V, G, 1e-9);
    } catch (const DegenerateError&) {
      continue;  // random span may be degenerate
    }
    CHECK(la::mutual_span_residual(S.vectors, V) < 1e-8);
    Eigen::MatrixXd g = la::gram(S.vectors, G);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double want = (a == b) ? double(S.signatures[std::size_t(a)]) : 0.0;
        CHECK(std::abs(g(a, b) - want) < 1e-9);
      }
    ++done;
  }
}

TEST_CASE("dual lane derivatives match finite differences") {
  // Construct a parameter-dependent screen and check d/dt of the
  // orthonormalized output against central differences of the double lane.
  auto build = [](double t) {
    Eigen::MatrixXd V(3, 2);
    V.col(0) << std::cos(t), std::sin(t), 0.5 * t;
    V.col(1) << -std::sin(t), std::cos(t), t * t;
    return V;
  };
  Eigen::MatrixXd G = Eigen::VectorXd::Ones(3).asDiagonal();

  const double t0 = 0.37, h = 1e-6;
  // Dual lane.
  la::TMat<Dual> Vd(3, 2, Dual::constant(0.0, 1));
  {
    Eigen::MatrixXd V = build(t0);
    Eigen::MatrixXd Vp = (build(t0 + h) - build(t0 - h)) / (2.0 * h);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd g1(1);
        g1 << Vp(i, j);
        Vd(i, j) = Dual(V(i, j), g1);
      }
  }
  la::TMat<Dual> Gd = la::lift(G, Dual::constant(0.0, 1));
  auto res = la::orthonormalize_t(Vd, Gd, 1e-9);

  Eigen::MatrixXd lo = la::signed_orthonormalize(build(t0 - h), G, 1e-9).vectors;
  Eigen::MatrixXd hi = la::signed_orthonormalize(build(t0 + h), G, 1e-9).vectors;
  Eigen::MatrixXd fd = (hi - lo) / (2.0 * h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(res.vectors(i, j).g[0] - fd(i, j)) < 1e-5);
}
