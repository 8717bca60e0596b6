#ifndef LIGHTLIKE_CLASSIFY_HPP
#define LIGHTLIKE_CLASSIFY_HPP

#include "lightlike/submanifold.hpp"

namespace lightlike::classify {

using subm::FramePoint;
using subm::GaussWeingarten;

// Decomposition of the structure vector field over the quasi-orthonormal
// frame: xi = xi_S + sum a_i E_i + sum b_i N_i + sum c_alpha W_alpha.
struct XiDecomposition {
  Eigen::VectorXd xi_s;     // ambient screen component
  Eigen::VectorXd a, b, c;  // a_i = g(xi,N_i), b_i = g(xi,E_i), c_a = eps_a g(xi,W_a)
  double recon_residual = 0.0;
  double xi_s_norm = 0.0;
};

XiDecomposition decompose_xi(const FramePoint& fp);

// The quasi generalized CR split of the frame bundles. Bases are coefficient
// matrices over the corresponding input blocks; *_idx lists input indices when
// the computed subspace aligns with input vectors.
struct QgcrCertificate {
  bool qgcr = false;
  bool proper = false;
  Eigen::MatrixXd d1, d2;    // over E
  Eigen::MatrixXd d0;        // over Xhat
  Eigen::MatrixXd l;         // over N
  Eigen::MatrixXd s_cal;     // over What
  Eigen::MatrixXd phi_d1, phi_d2, phi_l, phi_s;  // ambient images
  std::vector<int> d1_idx, d2_idx, d0_idx, l_idx, s_idx;
  double residual = 0.0;  // max containment / decomposition residual
  std::string failure;    // first violated condition when !qgcr
  int dim_phiL_phiD2 = 0;

  Eigen::Index dim_d1() const { return d1.cols(); }
  Eigen::Index dim_d2() const { return d2.cols(); }
  Eigen::Index dim_d0() const { return d0.cols(); }
  Eigen::Index dim_l() const { return l.cols(); }
  Eigen::Index dim_s() const { return s_cal.cols(); }
};

QgcrCertificate classify_qgcr(const FramePoint& fp, double tol);

// sigma_u certificates: phi N_u = sigma_u phi E_u on index-aligned dual pairs.
struct SigmaCertificate {
  int u = 0;             // 1-based radical index
  double sigma = 0.0;
  double residual = 0.0;  // collinearity defect
  double nonnull_product = 0.0;  // g(phiE,phiE) g(phiN,phiN) - (a_u b_u)^2
};

struct AscreenReport {
  bool ascreen = false;
  double xi_s_residual = 0.0, c_residual = 0.0;
  double d2l_membership = 1.0;  // xi in D2 + L (Theorem-level implication)
  std::vector<SigmaCertificate> sigmas;
  double phiL_eq_phiD2 = 1.0;  // mutual span residual, meaningful when r = 3
};

AscreenReport check_ascreen(const FramePoint& fp, const QgcrCertificate& cert,
                            const XiDecomposition& xi, double tol);

struct CoscreenReport {
  bool coscreen = false;
  bool gcr_note = false;  // xi tangent: a GCR-lightlike submanifold instead
  double ortho_residual = 0.0;     // g(phi S, phi L) after the co-screen reduction
  double xi_tangent_residual = 1.0;
  double g_invariance = 1.0;       // phi-invariance of the transversal remainder
  double projection_recon = 0.0;   // X = SX + RX and V = FV + QV + eta(V) xi
};

CoscreenReport check_coscreen(const FramePoint& fp, const QgcrCertificate& cert,
                              const XiDecomposition& xi, const GaussWeingarten& gw,
                              double tol);

struct IrrotationalReport {
  bool irrotational = false;
  double max_residual = 0.0;
  int bad_kind = 0;  // 0 none, 1 h^l, 2 h^s
  int bad_index = -1, bad_X = -1, bad_E = -1;
};

IrrotationalReport check_irrotational(const GaussWeingarten& gw, double tol);

struct MinimalReport {
  bool minimal = false;
  double hs_rad_residual = 0.0;      // h^s on Rad x Rad
  Eigen::VectorXd trace_l, trace_s;  // trace(h)|_S(TM) components
  Eigen::VectorXd trace_AW;          // trace(A_{W_alpha})|_S(TM)
  bool trace_agree = false;
  bool totally_geodesic = false;
  double h_max = 0.0;
};

MinimalReport check_minimal(const FramePoint& fp, const GaussWeingarten& gw, double tol);

struct MeanCurvature {
  Eigen::VectorXd H_l, H_s;
};

MeanCurvature mean_curvature(const FramePoint& fp, const GaussWeingarten& gw);

// Distribution checks on D = Rad (+) D0 (+) phi D2 and Dbar = phi S (+) phi L.
enum class Dist { D, Dbar };

struct DistributionReport {
  std::string name;
  bool integrable_direct = false, integrable_criterion = false, agree = false;
  double direct_residual = 0.0, criterion_residual = 0.0;
  bool nearly_parallel = false, nearly_auto_parallel = false;
  double np_residual = 0.0, nap_residual = 0.0;
  bool consequent_checked = false;   // theorem consequents run only when the
  double consequent_np = 0.0;        // hypothesis holds
  double consequent_nap = 0.0;
};

DistributionReport check_distribution(const FramePoint& fp, const GaussWeingarten& gw,
                                      const QgcrCertificate& cert, Dist which,
                                      double mu, double tol);

// Lemma-level identity for co-screen submanifolds:
// eta(nabla_X Y) + eta(nabla_Y X) = 0 over all tangent frame pairs.
double lemma_eta_symmetry(const FramePoint& fp, const GaussWeingarten& gw);

}  // namespace lightlike::classify

#endif
