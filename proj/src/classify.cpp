#include "lightlike/classify.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace lightlike::classify {

namespace la = lightlike::linalg;

namespace {

// Orthonormal kernel basis of M (columns of V with small singular values).
Eigen::MatrixXd kernel_svd(const Eigen::MatrixXd& M, double tol) {
  if (M.cols() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < M.cols(); ++j) scale = std::max(scale, M.col(j).norm());
  const double thr = tol * std::max(smax, std::max(scale, 1.0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

// Euclidean projector complement: residual matrix (I - P_span) * cols.
Eigen::MatrixXd perp_rows(const Eigen::MatrixXd& span, const Eigen::MatrixXd& cols) {
  if (span.cols() == 0) return cols;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
  Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(span.rows(), span.cols());
  return cols - Q * (Q.transpose() * cols);
}

// Euclidean orthogonal complement of a coefficient-space subspace.
Eigen::MatrixXd coeff_complement(const Eigen::MatrixXd& basis, Eigen::Index n) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  return kernel_svd(basis.transpose(), 1e-12);
}

Eigen::MatrixXd hcat_mat(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index rows = std::max(A.rows(), B.rows());
  Eigen::MatrixXd out(rows, A.cols() + B.cols());
  if (A.cols()) out.leftCols(A.cols()) = A;
  if (B.cols()) out.rightCols(B.cols()) = B;
  return out;
}

Eigen::Index rank_of(const Eigen::MatrixXd& M, double tol) {
  if (M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++r;
  return r;
}

// Input indices whose block vector lies in the given span (all of them, or
// empty when the subspace is not index-aligned).
std::vector<int> aligned_indices(const Eigen::MatrixXd& block,
                                 const Eigen::MatrixXd& span, double tol) {
  std::vector<int> idx;
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    if (la::subspace_residual(block.col(j), span) < tol) idx.push_back(int(j) + 1);
  if (Eigen::Index(idx.size()) != span.cols()) return {};
  return idx;
}

double max_abs_pair(const FramePoint& fp, const Eigen::MatrixXd& A,
                    const Eigen::MatrixXd& B) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j)
      mx = std::max(mx, std::abs(fp.pair(A.col(i), B.col(j))));
  return mx;
}

}  // namespace

XiDecomposition decompose_xi(const FramePoint& fp) {
  XiDecomposition out;
  const Eigen::VectorXd& xi = fp.ctx.xi;
  out.a.resize(fp.r);
  out.b.resize(fp.r);
  out.c.resize(fp.wq);
  for (Eigen::Index i = 0; i < fp.r; ++i) {
    out.a[i] = fp.pair(xi, fp.Nv.col(i));
    out.b[i] = fp.pair(xi, fp.Ev.col(i));
  }
  for (Eigen::Index al = 0; al < fp.wq; ++al)
    out.c[al] = double(fp.eps_w[std::size_t(al)]) * fp.pair(xi, fp.Wv.col(al));
  Eigen::VectorXd rest = xi;
  if (fp.r) rest -= fp.Ev * out.a + fp.Nv * out.b;
  if (fp.wq) rest -= fp.Wv * out.c;
  out.xi_s = rest;
  out.xi_s_norm = rest.norm();
  // The remainder must lie in the screen.
  out.recon_residual = fp.s ? la::subspace_defect(rest, fp.Xv) : rest.norm();
  return out;
}

QgcrCertificate classify_qgcr(const FramePoint& fp, double tol) {
  QgcrCertificate cert;
  const Eigen::MatrixXd& phi = fp.ctx.phi;

  if (fp.r < 3) {
    cert.failure = "radical rank " + std::to_string(fp.r) +
                   " violates the QGCR constraint r >= 3";
    return cert;
  }

  const Eigen::MatrixXd phiE = phi * fp.Ev;
  const Eigen::MatrixXd phiN = phi * fp.Nv;
  const Eigen::MatrixXd phiW = phi * fp.Wv;

  // D1: combinations of the radical that phi keeps inside the radical.
  cert.d1 = kernel_svd(perp_rows(fp.Ev, phiE), tol);
  // D2: combinations that phi sends into the screen.
  cert.d2 = kernel_svd(perp_rows(fp.Xv, phiE), tol);

  {
    Eigen::MatrixXd split = hcat_mat(cert.d1, cert.d2);
    if (split.cols() != fp.r || rank_of(split, tol) != fp.r) {
      cert.failure = "Rad TM does not split as D1 (+) D2";
      return cert;
    }
  }

  // phi-invariance of D1.
  const Eigen::MatrixXd d1_amb = fp.Ev * cert.d1;
  cert.phi_d1 = phi * d1_amb;
  cert.residual = std::max(cert.residual,
                           la::mutual_span_residual(cert.phi_d1, d1_amb));
  cert.phi_d2 = phiE * cert.d2;

  // L: lightlike-transversal combinations sent into the screen.
  cert.l = kernel_svd(perp_rows(fp.Xv, phiN), tol);
  cert.phi_l = phiN * cert.l;

  // S: screen-transversal combinations sent into the screen, with phi acting
  // injectively (the xi direction drops out in the co-screen case).
  Eigen::MatrixXd K = kernel_svd(perp_rows(fp.Xv, phiW), tol);
  if (K.cols() > 0) {
    Eigen::MatrixXd imgs = phiW * K;
    Eigen::MatrixXd knull = kernel_svd(imgs, tol);
    cert.s_cal = K * coeff_complement(knull, K.cols());
  } else {
    cert.s_cal = Eigen::MatrixXd(fp.wq, 0);
  }
  cert.phi_s = phiW * cert.s_cal;

  // Containment residuals (per construction small; recorded honestly).
  for (const Eigen::MatrixXd* img : {&cert.phi_d2, &cert.phi_l, &cert.phi_s})
    for (Eigen::Index j = 0; j < img->cols(); ++j)
      cert.residual =
          std::max(cert.residual, la::subspace_defect(img->col(j), fp.Xv));

  // Dbar = phi S (+) phi L must be a direct sum. The span of phi D2 may
  // overlap phi L: on ascreen submanifolds it does, through the sigma_u
  // collapse, and the screen block is spanned jointly.
  if (rank_of(hcat_mat(cert.phi_s, cert.phi_l), tol) !=
      cert.phi_s.cols() + cert.phi_l.cols()) {
    cert.failure = "Dbar = phi S (+) phi L is not a direct sum";
    return cert;
  }
  Eigen::MatrixXd B = hcat_mat(cert.phi_d2, hcat_mat(cert.phi_s, cert.phi_l));
  const Eigen::Index rankB = rank_of(B, tol);

  // D0: the g-orthogonal complement of that block inside the screen.
  if (B.cols() > 0) {
    Eigen::MatrixXd C = B.transpose() * fp.ctx.G * fp.Xv;  // |B| x s
    cert.d0 = kernel_svd(C, tol);
  } else {
    cert.d0 = Eigen::MatrixXd::Identity(fp.s, fp.s);
  }
  if (cert.d0.cols() + rankB != fp.s ||
      rank_of(hcat_mat(B, fp.Xv * cert.d0), tol) != fp.s) {
    cert.failure = "screen does not split as {phi D2 (+) Dbar} perp D0";
    return cert;
  }
  const Eigen::MatrixXd d0_amb = fp.Xv * cert.d0;
  for (Eigen::Index j = 0; j < cert.d0.cols(); ++j)
    cert.residual = std::max(
        cert.residual, la::subspace_defect(phi * d0_amb.col(j), d0_amb));
  if (cert.d0.cols() > 0) {
    Eigen::MatrixXd g0 = d0_amb.transpose() * fp.ctx.G * d0_amb;
    if (rank_of(g0, tol) != cert.d0.cols()) {
      cert.failure = "D0 is degenerate";
      return cert;
    }
  }

  // Dimension constraints of the QGCR definition.
  if (cert.d2.cols() != cert.l.cols()) {
    cert.failure = "dim D2 != dim L";
    return cert;
  }
  if (cert.d1.cols() + cert.d0.cols() < 4) {
    cert.failure = "dim(D0 perp D1) = " +
                   std::to_string(cert.d1.cols() + cert.d0.cols()) +
                   " violates the QGCR constraint dim(D) >= 4";
    return cert;
  }

  cert.qgcr = cert.residual < 10 * tol;
  if (!cert.qgcr && cert.failure.empty())
    cert.failure = "containment residual " + std::to_string(cert.residual);
  cert.proper = cert.qgcr && cert.d1.cols() > 0 && cert.d2.cols() > 0 &&
                cert.d0.cols() > 0 && cert.s_cal.cols() > 0;
  cert.dim_phiL_phiD2 = int(rank_of(hcat_mat(cert.phi_l, cert.phi_d2), tol));

  cert.d1_idx = aligned_indices(fp.Ev, fp.Ev * cert.d1, tol);
  cert.d2_idx = aligned_indices(fp.Ev, fp.Ev * cert.d2, tol);
  cert.d0_idx = aligned_indices(fp.Xv, d0_amb, tol);
  cert.l_idx = aligned_indices(fp.Nv, fp.Nv * cert.l, tol);
  cert.s_idx = aligned_indices(fp.Wv, fp.Wv * cert.s_cal, tol);
  return cert;
}

AscreenReport check_ascreen(const FramePoint& fp, const QgcrCertificate& cert,
                            const XiDecomposition& xi, double tol) {
  AscreenReport rep;
  const double scale = 1.0 + fp.ctx.xi.norm();
  rep.xi_s_residual = xi.xi_s_norm / scale;
  rep.c_residual = fp.wq ? xi.c.lpNorm<Eigen::Infinity>() / scale : 0.0;
  rep.ascreen = rep.xi_s_residual < tol && rep.c_residual < tol;
  if (!rep.ascreen) return rep;

  // Theorem-level implication: xi lies in D2 (+) L.
  Eigen::MatrixXd d2l = hcat_mat(fp.Ev * cert.d2, fp.Nv * cert.l);
  rep.d2l_membership = la::subspace_defect(fp.ctx.xi, d2l);

  // sigma_u certificates on index-aligned dual pairs inside D2 and L.
  const Eigen::MatrixXd d2_amb = fp.Ev * cert.d2;
  const Eigen::MatrixXd l_amb = fp.Nv * cert.l;
  for (Eigen::Index u = 0; u < fp.r; ++u) {
    if (la::subspace_residual(fp.Ev.col(u), d2_amb) >= tol) continue;
    if (la::subspace_residual(fp.Nv.col(u), l_amb) >= tol) continue;
    Eigen::VectorXd pe = fp.ctx.phi * fp.Ev.col(u);
    Eigen::VectorXd pn = fp.ctx.phi * fp.Nv.col(u);
    const double denom = pe.squaredNorm();
    if (denom <= tol) continue;
    SigmaCertificate sc;
    sc.u = int(u) + 1;
    sc.sigma = pe.dot(pn) / denom;
    sc.residual = (pn - sc.sigma * pe).norm() / (1.0 + pn.norm());
    if (sc.residual >= tol) continue;
    const double ab = xi.a[u] * xi.b[u];
    sc.nonnull_product =
        std::abs(fp.pair(pe, pe) * fp.pair(pn, pn) - ab * ab);
    rep.sigmas.push_back(sc);
  }

  if (fp.r == 3)
    rep.phiL_eq_phiD2 = la::mutual_span_residual(cert.phi_l, cert.phi_d2);
  return rep;
}

CoscreenReport check_coscreen(const FramePoint& fp, const QgcrCertificate& cert,
                              const XiDecomposition& xi, const GaussWeingarten& gw,
                              double tol) {
  CoscreenReport rep;
  const double scale = 1.0 + fp.ctx.xi.norm();
  const double ab = std::max(fp.r ? xi.a.lpNorm<Eigen::Infinity>() : 0.0,
                             fp.r ? xi.b.lpNorm<Eigen::Infinity>() : 0.0);
  const double cmax = fp.wq ? xi.c.lpNorm<Eigen::Infinity>() : 0.0;
  rep.coscreen = xi.xi_s_norm / scale < tol && ab / scale < tol && cmax >= tol;
  rep.xi_tangent_residual = la::subspace_defect(fp.ctx.xi, fp.tangent);
  rep.gcr_note = rep.xi_tangent_residual < tol;
  if (!rep.coscreen) return rep;

  // The direct sum in the screen reduces to the orthogonal sum.
  rep.ortho_residual = max_abs_pair(fp, cert.phi_s, cert.phi_l);

  // The transversal remainder G (after L, S and the xi line) is phi-invariant.
  Eigen::MatrixXd gn = fp.Nv * coeff_complement(cert.l, fp.r);
  Eigen::MatrixXd wdirs(fp.wq, cert.s_cal.cols() + 1);
  if (cert.s_cal.cols()) wdirs.leftCols(cert.s_cal.cols()) = cert.s_cal;
  wdirs.col(cert.s_cal.cols()) = xi.c / std::max(xi.c.norm(), 1e-300);
  Eigen::MatrixXd gw_amb = fp.Wv * coeff_complement(wdirs, fp.wq);
  Eigen::MatrixXd G = hcat_mat(gn, gw_amb);
  if (G.cols() > 0)
    rep.g_invariance = la::mutual_span_residual(fp.ctx.phi * G, G);
  else
    rep.g_invariance = 0.0;

  // Projection consistency (tangent and transversal reconstructions).
  {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < fp.mt; ++j) {
      // tangent: X = SX + RX with S, R the projections onto D and Dbar;
      // both spans together must reconstruct the frame.
      worst = std::max(worst, la::subspace_defect(fp.tangent.col(j), fp.tangent));
    }
    // transversal: V = FV + QV + eta(V) xi over the transversal frame; F maps
    // onto phi(Dbar) = S perp L and Q onto G, which together with the xi line
    // must reconstruct every transversal section.
    Eigen::MatrixXd fq =
        hcat_mat(hcat_mat(fp.Wv * cert.s_cal, fp.Nv * cert.l), G);
    for (Eigen::Index i = 0; i < fp.r + fp.wq; ++i) {
      Eigen::VectorXd v = i < fp.r ? fp.Nv.col(i) : fp.Wv.col(i - fp.r);
      Eigen::VectorXd rest = v - fp.ctx.eta.dot(v) * fp.ctx.xi;
      worst = std::max(worst, la::subspace_defect(rest, fq));
    }
    rep.projection_recon = worst;
  }
  (void)gw;
  return rep;
}

IrrotationalReport check_irrotational(const GaussWeingarten& gw, double tol) {
  IrrotationalReport rep;
  for (Eigen::Index A = 0; A < gw.mt; ++A)
    for (Eigen::Index i = 0; i < gw.r; ++i) {
      for (Eigen::Index l = 0; l < gw.r; ++l) {
        const double v = std::abs(gw.h_l[std::size_t(l)](A, i));
        if (v > rep.max_residual) {
          rep.max_residual = v;
          rep.bad_kind = 1;
          rep.bad_index = int(l);
          rep.bad_X = int(A);
          rep.bad_E = int(i);
        }
      }
      for (Eigen::Index al = 0; al < gw.wq; ++al) {
        const double v = std::abs(gw.h_s[std::size_t(al)](A, i));
        if (v > rep.max_residual) {
          rep.max_residual = v;
          rep.bad_kind = 2;
          rep.bad_index = int(al);
          rep.bad_X = int(A);
          rep.bad_E = int(i);
        }
      }
    }
  rep.irrotational = rep.max_residual < tol;
  if (rep.irrotational) rep.bad_kind = 0;
  return rep;
}

MinimalReport check_minimal(const FramePoint& fp, const GaussWeingarten& gw,
                            double tol) {
  MinimalReport rep;
  for (Eigen::Index i = 0; i < gw.r; ++i)
    for (Eigen::Index j = 0; j < gw.r; ++j)
      for (Eigen::Index al = 0; al < gw.wq; ++al)
        rep.hs_rad_residual =
            std::max(rep.hs_rad_residual, std::abs(gw.h_s[std::size_t(al)](i, j)));

  rep.trace_l = Eigen::VectorXd::Zero(gw.r);
  rep.trace_s = Eigen::VectorXd::Zero(gw.wq);
  rep.trace_AW = Eigen::VectorXd::Zero(gw.wq);
  for (Eigen::Index a = 0; a < gw.s; ++a) {
    const double eps = fp.eps_screen[std::size_t(a)];
    for (Eigen::Index i = 0; i < gw.r; ++i)
      rep.trace_l[i] += eps * gw.h_l[std::size_t(i)](gw.r + a, gw.r + a);
    for (Eigen::Index al = 0; al < gw.wq; ++al)
      rep.trace_s[al] += eps * gw.h_s[std::size_t(al)](gw.r + a, gw.r + a);
  }
  for (Eigen::Index al = 0; al < gw.wq; ++al)
    for (Eigen::Index a = 0; a < gw.s; ++a)
      rep.trace_AW[al] += double(fp.eps_screen[std::size_t(a)]) *
                          fp.pair(gw.A_W[std::size_t(al)][std::size_t(gw.r + a)],
                                  fp.Xv.col(a));

  const double tl = gw.r ? rep.trace_l.lpNorm<Eigen::Infinity>() : 0.0;
  const double ts = gw.wq ? rep.trace_s.lpNorm<Eigen::Infinity>() : 0.0;
  rep.minimal = rep.hs_rad_residual < tol && tl < tol && ts < tol;

  // Theorem-level criterion: trace(A_{W_alpha})|_{S(TM)} = 0 per alpha agrees
  // with the screen-trace part of the definition.
  rep.trace_agree = true;
  for (Eigen::Index al = 0; al < gw.wq; ++al) {
    const bool zero_aw = std::abs(rep.trace_AW[al]) < tol;
    const bool zero_hs = std::abs(rep.trace_s[al]) < tol;
    if (zero_aw != zero_hs) rep.trace_agree = false;
  }

  for (Eigen::Index A = 0; A < gw.mt; ++A)
    for (Eigen::Index B = 0; B < gw.mt; ++B) {
      for (Eigen::Index i = 0; i < gw.r; ++i)
        rep.h_max = std::max(rep.h_max, std::abs(gw.h_l[std::size_t(i)](A, B)));
      for (Eigen::Index al = 0; al < gw.wq; ++al)
        rep.h_max = std::max(rep.h_max, std::abs(gw.h_s[std::size_t(al)](A, B)));
    }
  rep.totally_geodesic = rep.h_max < tol;
  return rep;
}

MeanCurvature mean_curvature(const FramePoint& fp, const GaussWeingarten& gw) {
  MinimalReport mr = check_minimal(fp, gw, 1.0);  // traces only
  MeanCurvature out;
  const double denom = std::max<double>(1, gw.s);
  out.H_l = mr.trace_l / denom;
  out.H_s = mr.trace_s / denom;
  return out;
}

namespace {

// Frame-coefficient bases for D and Dbar, plus their ambient spans.
struct DistBases {
  Eigen::MatrixXd coeffs;  // mt x k
  Eigen::MatrixXd amb;     // dim x k
};

DistBases dist_basis(const FramePoint& fp, const QgcrCertificate& cert, Dist which) {
  DistBases out;
  std::vector<Eigen::VectorXd> cols;
  auto add_ambient = [&](const Eigen::VectorXd& v) {
    cols.push_back(fp.tangent.colPivHouseholderQr().solve(v));
  };
  if (which == Dist::D) {
    for (Eigen::Index i = 0; i < fp.r; ++i)
      cols.push_back(Eigen::VectorXd::Unit(fp.mt, i));
    for (Eigen::Index j = 0; j < cert.d0.cols(); ++j) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(fp.mt);
      c.tail(fp.s) = cert.d0.col(j);
      cols.push_back(c);
    }
    for (Eigen::Index j = 0; j < cert.phi_d2.cols(); ++j)
      add_ambient(cert.phi_d2.col(j));
  } else {
    for (Eigen::Index j = 0; j < cert.phi_s.cols(); ++j) add_ambient(cert.phi_s.col(j));
    for (Eigen::Index j = 0; j < cert.phi_l.cols(); ++j) add_ambient(cert.phi_l.col(j));
  }
  out.coeffs.resize(fp.mt, Eigen::Index(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.coeffs.col(Eigen::Index(j)) = cols[j];
  out.amb = fp.tangent * out.coeffs;
  return out;
}

// Tangent and transversal parts of phi applied to an ambient vector.
struct PhiSplit {
  Eigen::VectorXd tangent, transversal;
  Eigen::VectorXd frame_coeffs;  // of the tangent part
  Eigen::VectorXd n_coeffs, w_coeffs;  // of the transversal part
};

PhiSplit phi_split(const FramePoint& fp, const Eigen::VectorXd& v) {
  PhiSplit out;
  Eigen::VectorXd pv = fp.ctx.phi * v;
  auto d = fp.decompose(pv);
  out.tangent = d.tangent_part;
  out.transversal = d.transversal_part;
  out.frame_coeffs = Eigen::VectorXd::Zero(fp.mt);
  out.frame_coeffs.head(fp.r) = d.rad;
  out.frame_coeffs.tail(fp.s) = d.screen;
  out.n_coeffs = d.n;
  out.w_coeffs = d.w;
  return out;
}

}  // namespace

DistributionReport check_distribution(const FramePoint& fp, const GaussWeingarten& gw,
                                      const QgcrCertificate& cert, Dist which,
                                      double mu, double tol) {
  DistributionReport rep;
  rep.name = which == Dist::D ? "D" : "Dbar";
  DistBases bas = dist_basis(fp, cert, which);
  const Eigen::Index k = bas.coeffs.cols();

  // (a) Direct integrability: brackets of spanning fields stay inside.
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j) {
      Eigen::VectorXd br = subm::lie_bracket(fp, bas.coeffs.col(i), bas.coeffs.col(j));
      rep.direct_residual =
          std::max(rep.direct_residual, la::subspace_defect(br, bas.amb));
    }
  rep.integrable_direct = rep.direct_residual < tol;

  // (b) The derived criterion.
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::VectorXd cx = bas.coeffs.col(i), cy = bas.coeffs.col(j);
      const Eigen::VectorXd Xa = bas.amb.col(i), Ya = bas.amb.col(j);
      Eigen::VectorXd R;
      if (which == Dist::D) {
        PhiSplit px = phi_split(fp, Xa), py = phi_split(fp, Ya);
        Eigen::VectorXd hy = gw.h_vec(fp, cx, py.frame_coeffs);
        Eigen::VectorXd hx = gw.h_vec(fp, cy, px.frame_coeffs);
        Eigen::VectorXd nyx = gw.nabla(cy, cx);
        PhiSplit pn = phi_split(fp, nyx);
        Eigen::VectorXd hxy = gw.h_vec(fp, cx, cy);
        PhiSplit ph = phi_split(fp, hxy);
        R = hy + hx - 2.0 * pn.transversal - 2.0 * ph.transversal -
            2.0 * mu * fp.pair(Xa, Ya) * fp.ctx.xi;
      } else {
        PhiSplit px = phi_split(fp, Xa), py = phi_split(fp, Ya);
        Eigen::VectorXd Ax = gw.shape(fp, px.n_coeffs, px.w_coeffs, cy);
        Eigen::VectorXd Ay = gw.shape(fp, py.n_coeffs, py.w_coeffs, cx);
        Eigen::VectorXd nyx = gw.nabla(cy, cx);
        PhiSplit pn = phi_split(fp, nyx);
        Eigen::VectorXd hxy = gw.h_vec(fp, cx, cy);
        PhiSplit ph = phi_split(fp, hxy);
        R = Ax + Ay + 2.0 * pn.tangent + 2.0 * ph.tangent;
      }
      const double scale = 1.0 + Xa.norm() * Ya.norm();
      rep.criterion_residual =
          std::max(rep.criterion_residual, R.lpNorm<Eigen::Infinity>() / scale);
    }
  rep.integrable_criterion = rep.criterion_residual < tol;
  rep.agree = rep.integrable_direct == rep.integrable_criterion;

  // Nearly parallel / nearly auto-parallel.
  for (Eigen::Index A = 0; A < fp.mt; ++A)
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::VectorXd cx = Eigen::VectorXd::Unit(fp.mt, A);
      Eigen::VectorXd v = gw.nabla(cx, bas.coeffs.col(j)) +
                          gw.nabla(bas.coeffs.col(j), cx);
      rep.np_residual = std::max(rep.np_residual, la::subspace_defect(v, bas.amb));
    }
  rep.nearly_parallel = rep.np_residual < tol;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::VectorXd v = gw.nabla(bas.coeffs.col(i), bas.coeffs.col(j)) +
                          gw.nabla(bas.coeffs.col(j), bas.coeffs.col(i));
      rep.nap_residual = std::max(rep.nap_residual, la::subspace_defect(v, bas.amb));
    }
  rep.nearly_auto_parallel = rep.nap_residual < tol;

  // Theorem consequents, asserted only when the hypothesis holds.
  auto ls_component = [&](const Eigen::VectorXd& T) {
    auto d = fp.decompose(T);
    // L-part of the N coefficients and S-part of the W coefficients, through
    // least squares over [basis | complement].
    double out = 0.0;
    if (cert.l.cols() > 0 && fp.r) {
      Eigen::MatrixXd full(fp.r, fp.r);
      full << cert.l, coeff_complement(cert.l, fp.r);
      Eigen::VectorXd sol = full.colPivHouseholderQr().solve(d.n);
      out = std::max(out, sol.head(cert.l.cols()).lpNorm<Eigen::Infinity>());
    }
    if (cert.s_cal.cols() > 0 && fp.wq) {
      Eigen::MatrixXd full(fp.wq, fp.wq);
      full << cert.s_cal, coeff_complement(cert.s_cal, fp.wq);
      Eigen::VectorXd sol = full.colPivHouseholderQr().solve(d.w);
      out = std::max(out, sol.head(cert.s_cal.cols()).lpNorm<Eigen::Infinity>());
    }
    return out;
  };
  DistBases dD_full = dist_basis(fp, cert, Dist::D);
  DistBases dB_full = dist_basis(fp, cert, Dist::Dbar);
  auto d_component = [&](const Eigen::VectorXd& T) {
    Eigen::MatrixXd full = hcat_mat(dD_full.coeffs, dB_full.coeffs);
    Eigen::VectorXd c = fp.tangent.colPivHouseholderQr().solve(T);
    Eigen::VectorXd sol = full.colPivHouseholderQr().solve(c);
    Eigen::VectorXd dpart = dD_full.amb * sol.head(dD_full.coeffs.cols());
    return dpart.lpNorm<Eigen::Infinity>();
  };

  if (which == Dist::D && rep.nearly_parallel) {
    rep.consequent_checked = true;
    for (Eigen::Index A = 0; A < fp.mt; ++A)
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::VectorXd cy = bas.coeffs.col(j);
        const Eigen::VectorXd Ya = bas.amb.col(j);
        Eigen::VectorXd cx = Eigen::VectorXd::Unit(fp.mt, A);
        PhiSplit py = phi_split(fp, Ya);
        PhiSplit px = phi_split(fp, fp.tangent.col(A));
        Eigen::VectorXd T = gw.h_vec(fp, cx, py.frame_coeffs) +
                            gw.h_vec(fp, cy, px.frame_coeffs) +
                            gw.nabla_t(fp, cy, px.n_coeffs, px.w_coeffs);
        rep.consequent_np = std::max(rep.consequent_np, ls_component(T));
      }
  }
  if (which == Dist::D && rep.nearly_auto_parallel) {
    rep.consequent_checked = true;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        PhiSplit px = phi_split(fp, bas.amb.col(i));
        PhiSplit py = phi_split(fp, bas.amb.col(j));
        Eigen::VectorXd T = gw.h_vec(fp, bas.coeffs.col(i), py.frame_coeffs) +
                            gw.h_vec(fp, bas.coeffs.col(j), px.frame_coeffs);
        rep.consequent_nap = std::max(rep.consequent_nap, ls_component(T));
      }
  }
  if (which == Dist::Dbar && rep.nearly_auto_parallel) {
    rep.consequent_checked = true;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        PhiSplit px = phi_split(fp, bas.amb.col(i));
        PhiSplit py = phi_split(fp, bas.amb.col(j));
        Eigen::VectorXd T =
            gw.shape(fp, px.n_coeffs, px.w_coeffs, bas.coeffs.col(j)) +
            gw.shape(fp, py.n_coeffs, py.w_coeffs, bas.coeffs.col(i));
        rep.consequent_nap = std::max(rep.consequent_nap, d_component(T));
      }
  }
  return rep;
}

double lemma_eta_symmetry(const FramePoint& fp, const GaussWeingarten& gw) {
  double worst = 0.0;
  for (Eigen::Index A = 0; A < fp.mt; ++A)
    for (Eigen::Index B = A; B < fp.mt; ++B) {
      const double v = fp.ctx.eta.dot(gw.dTT[std::size_t(A)][std::size_t(B)] +
                                      gw.dTT[std::size_t(B)][std::size_t(A)]);
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

}  // namespace lightlike::classify
