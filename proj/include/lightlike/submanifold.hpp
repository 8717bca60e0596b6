#ifndef LIGHTLIKE_SUBMANIFOLD_HPP
#define LIGHTLIKE_SUBMANIFOLD_HPP

#include <optional>

#include "lightlike/ambient.hpp"
#include "lightlike/linalg.hpp"
#include "lightlike/tolerances.hpp"

namespace lightlike::subm {

// A parametrized submanifold. Frame fields may be declared as vector-field
// expressions over the parameters and the ambient coordinates (the latter are
// resolved through the immersion when evaluating).
struct Immersion {
  std::vector<std::string> params;
  std::vector<ScalarExpr> map;  // one expression per ambient coordinate
  std::vector<VectorField> declared_rad, declared_screen, declared_stransversal;
};

// The quasi-orthonormal frame {E_i, Xhat_a, What_alpha, N_i} evaluated at one
// parameter point, with first-order parameter jets of every frame field.
struct FramePoint {
  Eigen::VectorXd w;          // parameter point
  Eigen::VectorXd x;          // ambient point
  ambient::PointContext ctx;  // metric, Christoffels, phi, xi at x
  Eigen::MatrixXd J;          // dim x m Jacobian of the immersion

  linalg::TMat<Dual> Gd;      // metric along M with parameter gradients
  linalg::TMat<Dual> E;       // radical frame, dim x r
  linalg::TMat<Dual> Xhat;    // orthonormalized screen, dim x s
  linalg::TMat<Dual> What;    // orthonormalized screen transversal, dim x wq
  linalg::TMat<Dual> N;       // lightlike transversal, dim x r
  std::vector<int> eps_screen, eps_w;

  Eigen::MatrixXd Ev, Xv, Wv, Nv;  // value views of the blocks
  Eigen::MatrixXd tangent;         // [Ev | Xv], dim x mt
  Eigen::MatrixXd u_coords;        // m x mt parameter coordinates of the frame

  Eigen::Index r = 0, s = 0, wq = 0, mt = 0;
  double ortho_residual = 0.0;      // quasi-orthonormality suite
  double tangency_residual = 0.0;   // declared-frame / Jacobian-span residuals

  double pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return ctx.pair(a, b);
  }
  // lambda_i(v) = g(v, N_i)
  double lambda(const Eigen::VectorXd& v, Eigen::Index i) const {
    return pair(v, Nv.col(i));
  }
  Eigen::VectorXd frame_vec(Eigen::Index slot) const { return tangent.col(slot); }

  // Quasi-orthonormal expansion of an ambient vector.
  struct Decomp {
    Eigen::VectorXd screen, rad, n, w;  // coefficients per block
    Eigen::VectorXd tangent_part, transversal_part;
    double residual = 0.0;  // reconstruction defect, relative
  };
  Decomp decompose(const Eigen::VectorXd& v) const;

  // Parameter coordinates of a tangent combination field sum c_k T_k.
  Eigen::VectorXd u_of(const Eigen::VectorXd& coeffs) const { return u_coords * coeffs; }
};

struct TangentBasis {
  Eigen::MatrixXd vectors;  // dim x m
  double residual = 0.0;    // max declared-vector tangency residual
};

// Jacobian columns, or the declared rad+screen frame verified against the
// Jacobian span.
TangentBasis tangent_frame(const Immersion& imm, const ambient::AmbientStructure& space,
                           const Eigen::VectorXd& w, const Tolerances& tol);

// Full bundle split at a parameter point: radical extraction, screen and
// screen-transversal (declared or canonical), signed orthonormalization and
// the lightlike transversal frame, with the orthogonality suite evaluated.
FramePoint split_bundles(const Immersion& imm, const ambient::AmbientStructure& space,
                         const Eigen::VectorXd& w, const Tolerances& tol);

// Second fundamental forms, shape operators and connection one-forms over the
// tangent frame [E_1..E_r, Xhat_1..Xhat_s].
struct GaussWeingarten {
  Eigen::Index r = 0, s = 0, wq = 0, mt = 0;

  // Ambient covariant derivatives of the frame fields.
  std::vector<std::vector<Eigen::VectorXd>> dTT;  // [A][B] = nabla_{T_A} T_B
  std::vector<std::vector<Eigen::VectorXd>> dTN;  // [A][i]
  std::vector<std::vector<Eigen::VectorXd>> dTW;  // [A][alpha]

  std::vector<Eigen::MatrixXd> h_l;     // r matrices, mt x mt
  std::vector<Eigen::MatrixXd> h_s;     // wq matrices, mt x mt (What components)
  std::vector<Eigen::MatrixXd> h_star;  // r matrices, mt x s
  std::vector<std::vector<Eigen::VectorXd>> induced;  // [A][B] = nabla_A B (tangent)
  std::vector<std::vector<Eigen::VectorXd>> A_N;      // [i][A]
  std::vector<std::vector<Eigen::VectorXd>> A_W;      // [alpha][A]
  std::vector<std::vector<Eigen::VectorXd>> A_E;      // [i][A] (screen-valued)
  std::vector<Eigen::MatrixXd> tau;    // [A](i,j)
  std::vector<Eigen::MatrixXd> rho;    // [A](i,alpha)
  std::vector<Eigen::MatrixXd> phi1f;  // [A](alpha,i)   (varphi_{alpha i})
  std::vector<Eigen::MatrixXd> sigma;  // [A](alpha,beta)

  double recon_residual = 0.0;    // completeness of the frame expansion
  double tangent_residual = 0.0;  // induced derivatives stay tangent
  double h_sym_residual = 0.0;    // h(X,Y) = h(Y,X)

  // Bilinear accessors over constant-coefficient combination fields.
  Eigen::VectorXd nabla_bar(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  Eigen::VectorXd nabla(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // h(X,Y) as an ambient (transversal) vector.
  Eigen::VectorXd h_vec(const FramePoint& fp, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) const;
  // Shape operator of a transversal section V = sum n_i N_i + sum w_a What_a
  // applied to the combination field a.
  Eigen::VectorXd shape(const FramePoint& fp, const Eigen::VectorXd& n_coeff,
                        const Eigen::VectorXd& w_coeff, const Eigen::VectorXd& a) const;
  // nabla^t_A V: transversal part of the derivative of a constant-coefficient
  // transversal section.
  Eigen::VectorXd nabla_t(const FramePoint& fp, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& n_coeff,
                          const Eigen::VectorXd& w_coeff) const;
};

GaussWeingarten gauss_weingarten(const FramePoint& fp);

// Direct Lie bracket of two tangent combination fields (no Christoffels),
// [X,Y]^a = sum_k (u_X^k dY^a/dw^k - u_Y^k dX^a/dw^k).
Eigen::VectorXd lie_bracket(const FramePoint& fp, const Eigen::VectorXd& ca,
                            const Eigen::VectorXd& cb);

// Directional derivative of g(B,C) along frame slot A minus the compatible
// expansion; the right side is the paper's h^l/lambda expression.
struct MetricDefect {
  double lhs = 0.0, rhs = 0.0;
};
MetricDefect metric_connection_defect(const FramePoint& fp, const GaussWeingarten& gw,
                                      Eigen::Index A, Eigen::Index B, Eigen::Index C);

// Residuals of the six shape-operator relations plus the screen-connection
// metric property.
struct RelationsReport {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0, r6 = 0;
  double screen_metric = 0;
  double max() const;
};
RelationsReport shape_operator_relations_check(const FramePoint& fp,
                                               const GaussWeingarten& gw);

}  // namespace lightlike::subm

#endif
