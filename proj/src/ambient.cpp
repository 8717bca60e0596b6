#include "lightlike/ambient.hpp"

#include <random>

namespace lightlike::ambient {

namespace {

std::string num(int i) { return std::to_string(i); }

ScalarExpr zero(const std::vector<std::string>& vars) { return make_constant(0.0, vars); }

std::vector<std::vector<ScalarExpr>> zero_matrix(Eigen::Index n,
                                                 const std::vector<std::string>& vars) {
  return std::vector<std::vector<ScalarExpr>>(std::size_t(n),
                                              std::vector<ScalarExpr>(std::size_t(n), zero(vars)));
}

std::vector<Dual> seed_env(const Eigen::VectorXd& x) {
  std::vector<Dual> env;
  env.reserve(std::size_t(x.size()));
  for (Eigen::Index k = 0; k < x.size(); ++k)
    env.push_back(Dual::seed(x[k], x.size(), k));
  return env;
}

}  // namespace

int AmbientStructure::coord_index(const std::string& n) const {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == n) return int(i);
  return -1;
}

AmbientStructure builtin_cosymplectic(int m, int q) {
  if (m < 1 || q < 1 || q > 2 * m || q % 2 != 0)
    throw ScenarioError("cosymplectic builtin: need m >= 1 and even q with 1 <= q <= 2m");
  AmbientStructure s;
  s.name = "cosymplectic(m=" + num(m) + ",q=" + num(q) + ")";
  s.dim = 2 * m + 1;
  s.mu = 0.0;
  for (int i = 1; i <= m; ++i) s.coords.push_back("x" + num(i));
  for (int i = 1; i <= m; ++i) s.coords.push_back("y" + num(i));
  s.coords.push_back("z");
  const auto& V = s.coords;

  s.metric = zero_matrix(s.dim, V);
  s.phi = zero_matrix(s.dim, V);
  s.xi.assign(std::size_t(s.dim), zero(V));
  s.eta.assign(std::size_t(s.dim), zero(V));

  for (int i = 0; i < m; ++i) {
    const double eps = (i < q / 2) ? -1.0 : 1.0;
    s.metric[std::size_t(i)][std::size_t(i)] = make_constant(eps, V);
    s.metric[std::size_t(m + i)][std::size_t(m + i)] = make_constant(eps, V);
    // phi(dx_i) = -dy_i, phi(dy_i) = dx_i
    s.phi[std::size_t(m + i)][std::size_t(i)] = make_constant(-1.0, V);
    s.phi[std::size_t(i)][std::size_t(m + i)] = make_constant(1.0, V);
  }
  s.metric[std::size_t(2 * m)][std::size_t(2 * m)] = make_constant(1.0, V);
  s.xi[std::size_t(2 * m)] = make_constant(1.0, V);
  s.eta[std::size_t(2 * m)] = make_constant(1.0, V);
  return s;
}

AmbientStructure builtin_sasakian(int m, int q) {
  if (m < 1 || q < 1 || q > 2 * m || q % 2 != 0)
    throw ScenarioError("sasakian builtin: need m >= 1 and even q with 1 <= q <= 2m");
  AmbientStructure s;
  s.name = "sasakian(m=" + num(m) + ",q=" + num(q) + ")";
  s.dim = 2 * m + 1;
  s.mu = 1.0;
  for (int i = 1; i <= m; ++i) s.coords.push_back("x" + num(i));
  for (int i = 1; i <= m; ++i) s.coords.push_back("y" + num(i));
  s.coords.push_back("z");
  const auto& V = s.coords;

  s.metric = zero_matrix(s.dim, V);
  s.phi = zero_matrix(s.dim, V);
  s.xi.assign(std::size_t(s.dim), zero(V));
  s.eta.assign(std::size_t(s.dim), zero(V));

  auto eps_of = [&](int i) { return (i < q / 2) ? -1.0 : 1.0; };

  // g = eta (x) eta + (1/4) sum eps_i (dx_i^2 + dy_i^2), eta = (dz - sum y^i dx^i)/2.
  for (int i = 0; i < m; ++i) {
    const std::string yi = "y" + num(i + 1);
    for (int j = 0; j < m; ++j) {
      const std::string yj = "y" + num(j + 1);
      std::string e = "(1/4)*" + yi + "*" + yj;
      if (i == j) e += (eps_of(i) > 0) ? " + 1/4" : " - 1/4";
      s.metric[std::size_t(i)][std::size_t(j)] = parse_scalar(e, V);
    }
    s.metric[std::size_t(i)][std::size_t(2 * m)] = parse_scalar("-(1/4)*" + yi, V);
    s.metric[std::size_t(2 * m)][std::size_t(i)] = parse_scalar("-(1/4)*" + yi, V);
    s.metric[std::size_t(m + i)][std::size_t(m + i)] =
        make_constant(0.25 * eps_of(i), V);
    s.eta[std::size_t(i)] = parse_scalar("-(1/2)*" + yi, V);
  }
  s.metric[std::size_t(2 * m)][std::size_t(2 * m)] = make_constant(0.25, V);
  s.eta[std::size_t(2 * m)] = make_constant(0.5, V);
  s.xi[std::size_t(2 * m)] = make_constant(2.0, V);

  // phi(dx_j) = -eps_j dy_j, phi(dy_j) = eps_j (dx_j + y^j dz).
  for (int j = 0; j < m; ++j) {
    const double e = eps_of(j);
    s.phi[std::size_t(m + j)][std::size_t(j)] = make_constant(-e, V);
    s.phi[std::size_t(j)][std::size_t(m + j)] = make_constant(e, V);
    const std::string coef = (e > 0 ? "" : "-") + std::string("y") + num(j + 1);
    s.phi[std::size_t(2 * m)][std::size_t(m + j)] = parse_scalar(coef, V);
  }
  return s;
}

PointContext context_at(const AmbientStructure& s, const Eigen::VectorXd& x) {
  if (x.size() != s.dim) throw Error("ambient point has wrong dimension");
  PointContext ctx;
  ctx.x = x;
  const Eigen::Index n = s.dim;
  auto env = seed_env(x);

  ctx.G.resize(n, n);
  ctx.dG.assign(std::size_t(n), Eigen::MatrixXd::Zero(n, n));
  ctx.phi.resize(n, n);
  ctx.dphi.assign(std::size_t(n), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      Dual g = eval_dual(s.metric[std::size_t(a)][std::size_t(b)], env);
      ctx.G(a, b) = g.v;
      for (Eigen::Index c = 0; c < n; ++c) ctx.dG[std::size_t(c)](a, b) = g.g[c];
      Dual p = eval_dual(s.phi[std::size_t(a)][std::size_t(b)], env);
      ctx.phi(a, b) = p.v;
      for (Eigen::Index c = 0; c < n; ++c) ctx.dphi[std::size_t(c)](a, b) = p.g[c];
    }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(ctx.G);
  if (!lu.isInvertible())
    throw DegenerateError("ambient metric is singular at the sample point");
  ctx.Ginv = lu.inverse();

  // Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  ctx.Gamma.assign(std::size_t(n), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      Eigen::VectorXd first(n);
      for (Eigen::Index l = 0; l < n; ++l)
        first[l] = 0.5 * (ctx.dG[std::size_t(i)](j, l) + ctx.dG[std::size_t(j)](i, l) -
                          ctx.dG[std::size_t(l)](i, j));
      Eigen::VectorXd gk = ctx.Ginv * first;
      for (Eigen::Index k = 0; k < n; ++k) {
        ctx.Gamma[std::size_t(k)](i, j) = gk[k];
        ctx.Gamma[std::size_t(k)](j, i) = gk[k];
      }
    }

  ctx.xi.resize(n);
  ctx.eta.resize(n);
  std::vector<double> plain(x.data(), x.data() + x.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    ctx.xi[a] = eval_value(s.xi[std::size_t(a)], plain);
    ctx.eta[a] = eval_value(s.eta[std::size_t(a)], plain);
  }
  return ctx;
}

std::vector<Eigen::MatrixXd> christoffel(const AmbientStructure& s,
                                         const Eigen::VectorXd& x) {
  return context_at(s, x).Gamma;
}

Eigen::VectorXd covariant_derivative(const AmbientStructure& s,
                                     const std::vector<ScalarExpr>& field,
                                     const Eigen::VectorXd& direction,
                                     const Eigen::VectorXd& x) {
  PointContext ctx = context_at(s, x);
  const Eigen::Index n = s.dim;
  auto env = seed_env(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd yval(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Dual y = eval_dual(field[std::size_t(k)], env);
    yval[k] = y.v;
    out[k] = direction.dot(y.g);
  }
  for (Eigen::Index k = 0; k < n; ++k)
    out[k] += direction.dot(ctx.Gamma[std::size_t(k)] * yval);
  return out;
}

std::vector<Eigen::MatrixXd> nabla_phi(const PointContext& ctx) {
  const Eigen::Index n = ctx.G.rows();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::MatrixXd m = ctx.dphi[std::size_t(i)];
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < n; ++c)
          acc += ctx.Gamma[std::size_t(a)](i, c) * ctx.phi(c, b) -
                 ctx.phi(a, c) * ctx.Gamma[std::size_t(c)](i, b);
        m(a, b) += acc;
      }
    out[std::size_t(i)] = std::move(m);
  }
  return out;
}

Eigen::MatrixXd H_tensor(const PointContext& ctx) {
  const Eigen::Index n = ctx.G.rows();
  auto np = nabla_phi(ctx);
  Eigen::MatrixXd nphi_xi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) nphi_xi += ctx.xi[i] * np[std::size_t(i)];
  return ctx.phi * nphi_xi;
}

void CheckReport::add(const std::string& name, double residual, double tol) {
  items.push_back({name, residual, residual < tol});
  if (residual >= tol) pass = false;
  max_residual = std::max(max_residual, residual);
}

const CheckItem* CheckReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

namespace {

Eigen::VectorXd random_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

CheckReport check_structure(const AmbientStructure& s, int samples, unsigned seed,
                            double tol) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = s.dim;
  double r_sym = 0, r_etaxi = 0, r_phixi = 0, r_etaphi = 0, r_phi2 = 0, r_compat = 0,
         r_metric_dual = 0;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd x = random_vec(rng, n);
    PointContext ctx = context_at(s, x);
    r_sym = std::max(r_sym, (ctx.G - ctx.G.transpose()).lpNorm<Eigen::Infinity>() /
                                std::max(1.0, ctx.G.lpNorm<Eigen::Infinity>()));
    r_etaxi = std::max(r_etaxi, std::abs(ctx.eta.dot(ctx.xi) - 1.0));
    r_phixi = std::max(r_phixi, (ctx.phi * ctx.xi).lpNorm<Eigen::Infinity>());
    r_etaphi = std::max(r_etaphi, (ctx.eta.transpose() * ctx.phi).lpNorm<Eigen::Infinity>());
    Eigen::MatrixXd want = -Eigen::MatrixXd::Identity(n, n) + ctx.xi * ctx.eta.transpose();
    r_phi2 = std::max(r_phi2, (ctx.phi * ctx.phi - want).lpNorm<Eigen::Infinity>());
    r_metric_dual =
        std::max(r_metric_dual, (ctx.G * ctx.xi - ctx.eta).lpNorm<Eigen::Infinity>());
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd X = random_vec(rng, n), Y = random_vec(rng, n);
      const double lhs = ctx.pair(ctx.phi * X, ctx.phi * Y);
      const double rhs = ctx.pair(X, Y) - ctx.eta.dot(X) * ctx.eta.dot(Y);
      r_compat = std::max(r_compat, std::abs(lhs - rhs));
    }
  }
  CheckReport rep;
  rep.add("metric symmetry", r_sym, tol);
  rep.add("eta(xi) = 1", r_etaxi, tol);
  rep.add("phi(xi) = 0", r_phixi, tol);
  rep.add("eta o phi = 0", r_etaphi, tol);
  rep.add("phi^2 = -I + eta (x) xi", r_phi2, tol);
  rep.add("g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y)", r_compat, tol);
  rep.add("eta = g(xi, .)", r_metric_dual, tol);
  return rep;
}

CheckReport check_nearly_mu_sasakian(const AmbientStructure& s, int samples,
                                     unsigned seed, double tol) {
  return check_nearly_mu_sasakian(s, samples, seed, tol, s.mu);
}

CheckReport check_nearly_mu_sasakian(const AmbientStructure& s, int samples,
                                     unsigned seed, double tol, double mu) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = s.dim;
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd x = random_vec(rng, n);
    PointContext ctx = context_at(s, x);
    auto np = nabla_phi(ctx);
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd X = random_vec(rng, n), Y = random_vec(rng, n);
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        lhs += X[i] * (np[std::size_t(i)] * Y) + Y[i] * (np[std::size_t(i)] * X);
      Eigen::VectorXd rhs = mu * (2.0 * ctx.pair(X, Y) * ctx.xi -
                                  ctx.eta.dot(Y) * X - ctx.eta.dot(X) * Y);
      worst = std::max(worst, (lhs - rhs).lpNorm<Eigen::Infinity>());
    }
  }
  CheckReport rep;
  rep.add("nearly-mu-Sasakian identity (mu=" + std::to_string(mu) + ")", worst, tol);
  return rep;
}

CheckReport check_h_tensor(const AmbientStructure& s, int samples, unsigned seed,
                           double tol) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = s.dim;
  double r_h = 0, r_anti = 0, r_hxi = 0, r_etah = 0, r_skew = 0;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd x = random_vec(rng, n);
    PointContext ctx = context_at(s, x);
    Eigen::MatrixXd H = H_tensor(ctx);
    r_h = std::max(r_h, H.lpNorm<Eigen::Infinity>());
    r_anti = std::max(r_anti, (H * ctx.phi + ctx.phi * H).lpNorm<Eigen::Infinity>());
    r_hxi = std::max(r_hxi, (H * ctx.xi).lpNorm<Eigen::Infinity>());
    r_etah = std::max(r_etah, (ctx.eta.transpose() * H).lpNorm<Eigen::Infinity>());
    r_skew = std::max(
        r_skew, (ctx.G * H + H.transpose() * ctx.G).lpNorm<Eigen::Infinity>());
  }
  CheckReport rep;
  rep.add("H phi + phi H = 0", r_anti, tol);
  rep.add("H xi = 0", r_hxi, tol);
  rep.add("eta o H = 0", r_etah, tol);
  rep.add("g(H X, Y) + g(X, H Y) = 0", r_skew, tol);
  rep.add("|H|", r_h, tol);  // both builtins have vanishing H
  return rep;
}

}  // namespace lightlike::ambient
