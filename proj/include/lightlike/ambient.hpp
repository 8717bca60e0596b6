#ifndef LIGHTLIKE_AMBIENT_HPP
#define LIGHTLIKE_AMBIENT_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lightlike/expr.hpp"

namespace lightlike::ambient {

// An indefinite almost contact metric manifold (g, phi, xi, eta, mu) with
// expression-valued fields over the ambient coordinates.
struct AmbientStructure {
  std::string name;
  Eigen::Index dim = 0;  // odd, 2m+1
  double mu = 0.0;
  std::vector<std::string> coords;
  std::vector<std::vector<ScalarExpr>> metric;  // dim x dim, symmetric
  std::vector<std::vector<ScalarExpr>> phi;     // phi[a][b]: component a of phi(d_b)
  std::vector<ScalarExpr> xi;                   // vector components
  std::vector<ScalarExpr> eta;                  // covector components

  int coord_index(const std::string& n) const;
};

// Flat cosymplectic structure on R^{2m+1}_q: eta = dz, xi = dz-dual, constant
// block metric with the first q/2 of the x- and y-pairs negative, constant phi.
AmbientStructure builtin_cosymplectic(int m, int q);

// Sasakian structure on R^{2m+1}_q with eta = (dz - sum y^i dx^i)/2, xi = 2 dz,
// metric eta (x) eta + (1/4) sum eps_i (dx_i^2 + dy_i^2). On the negative pairs
// phi carries the signature factor so that nabla_X xi = -phi X holds (the
// epsilon-free variant fails the Sasakian identity on indefinite blocks).
AmbientStructure builtin_sasakian(int m, int q);

// Everything a point computation needs, evaluated once.
struct PointContext {
  Eigen::VectorXd x;
  Eigen::MatrixXd G, Ginv;
  std::vector<Eigen::MatrixXd> dG;     // dG[c](a,b) = d g_ab / d x^c
  std::vector<Eigen::MatrixXd> Gamma;  // Gamma[k](i,j), symmetric in (i,j)
  Eigen::MatrixXd phi;
  std::vector<Eigen::MatrixXd> dphi;   // dphi[c](a,b)
  Eigen::VectorXd xi;
  Eigen::VectorXd eta;

  double pair(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(G * v);
  }
};

PointContext context_at(const AmbientStructure& s, const Eigen::VectorXd& x);

// Christoffel symbols Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<Eigen::MatrixXd> christoffel(const AmbientStructure& s,
                                         const Eigen::VectorXd& x);

// (nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j for an expression-valued
// field Y over the ambient coordinates.
Eigen::VectorXd covariant_derivative(const AmbientStructure& s,
                                     const std::vector<ScalarExpr>& field,
                                     const Eigen::VectorXd& direction,
                                     const Eigen::VectorXd& x);

// Covariant derivative of phi as a (1,2)-tensor: out[i](a,b) = (nabla_i phi)^a_b.
std::vector<Eigen::MatrixXd> nabla_phi(const PointContext& ctx);

// H X = phi (nabla_xi phi) X as a matrix at x.
Eigen::MatrixXd H_tensor(const PointContext& ctx);

// ---------------------------------------------------------------------------
// Structure checks. Every check reports the max residual per identity so the
// CLI can name the violated one.
struct CheckItem {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};
struct CheckReport {
  std::vector<CheckItem> items;
  bool pass = true;
  double max_residual = 0.0;

  void add(const std::string& name, double residual, double tol);
  const CheckItem* find(const std::string& name) const;
};

// Almost-contact admission: metric symmetry, eta(xi)=1, phi(xi)=0,
// eta o phi = 0, phi^2 = -I + eta (x) xi, compatibility
// g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y), and eta = g(xi, .).
CheckReport check_structure(const AmbientStructure& s, int samples,
                            unsigned seed, double tol);

// Residual of the symmetrized nearly-mu-Sasakian identity at random points
// and constant vector pairs.
CheckReport check_nearly_mu_sasakian(const AmbientStructure& s, int samples,
                                     unsigned seed, double tol);
CheckReport check_nearly_mu_sasakian(const AmbientStructure& s, int samples,
                                     unsigned seed, double tol, double mu_override);

// H identities: H phi + phi H = 0, H xi = 0, eta o H = 0, skew-symmetry of H
// with respect to g, plus the magnitude of H itself.
CheckReport check_h_tensor(const AmbientStructure& s, int samples, unsigned seed,
                           double tol);

}  // namespace lightlike::ambient

#endif
