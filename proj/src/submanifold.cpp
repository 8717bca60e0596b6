#include "lightlike/submanifold.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace lightlike::subm {

namespace la = lightlike::linalg;

namespace {

struct Jets {
  Eigen::VectorXd x;
  Eigen::MatrixXd J;
  std::vector<Jet2> F;
  std::vector<Dual> frame_env;  // params then coords, all with m-gradients
  Eigen::Index m = 0, dim = 0;
};

Jets eval_jets(const Immersion& imm, const ambient::AmbientStructure& space,
               const Eigen::VectorXd& w) {
  Jets out;
  out.m = Eigen::Index(imm.params.size());
  out.dim = space.dim;
  if (w.size() != out.m) throw Error("parameter point has wrong dimension");
  if (Eigen::Index(imm.map.size()) != out.dim)
    throw ScenarioError("immersion must define every ambient coordinate");
  out.x.resize(out.dim);
  out.J.resize(out.dim, out.m);
  for (Eigen::Index k = 0; k < out.m; ++k)
    out.frame_env.push_back(Dual::seed(w[k], out.m, k));
  for (Eigen::Index a = 0; a < out.dim; ++a) {
    Jet2 j = eval_jet2(imm.map[std::size_t(a)], w);
    out.x[a] = j.v;
    out.J.row(a) = j.g.transpose();
    out.F.push_back(std::move(j));
  }
  for (Eigen::Index a = 0; a < out.dim; ++a)
    out.frame_env.push_back(out.F[std::size_t(a)].dual());
  return out;
}

la::TMat<Dual> eval_fields(const std::vector<VectorField>& vfs,
                           const std::vector<Dual>& env, Eigen::Index dim,
                           Eigen::Index m) {
  la::TMat<Dual> out(dim, Eigen::Index(vfs.size()), Dual::constant(0.0, m));
  for (std::size_t j = 0; j < vfs.size(); ++j) {
    if (Eigen::Index(vfs[j].comps.size()) != dim)
      throw ScenarioError("frame vector field has wrong dimension");
    for (Eigen::Index a = 0; a < dim; ++a)
      out(a, Eigen::Index(j)) = eval_dual(vfs[j].comps[std::size_t(a)], env);
  }
  return out;
}

la::TMat<Dual> jacobian_dual(const Jets& jets) {
  la::TMat<Dual> out(jets.dim, jets.m, Dual::constant(0.0, jets.m));
  for (Eigen::Index a = 0; a < jets.dim; ++a)
    for (Eigen::Index k = 0; k < jets.m; ++k)
      out(a, k) = Dual(jets.J(a, k), jets.F[std::size_t(a)].h.col(k));
  return out;
}

la::TMat<Dual> hcat(const la::TMat<Dual>& a, const la::TMat<Dual>& b, Eigen::Index m) {
  la::TMat<Dual> out(std::max(a.rows, b.rows), a.cols + b.cols, Dual::constant(0.0, m));
  for (Eigen::Index i = 0; i < a.rows; ++i)
    for (Eigen::Index j = 0; j < a.cols; ++j) out(i, j) = a(i, j);
  for (Eigen::Index i = 0; i < b.rows; ++i)
    for (Eigen::Index j = 0; j < b.cols; ++j) out(i, a.cols + j) = b(i, j);
  return out;
}

la::TMat<Dual> select_cols(const la::TMat<Dual>& a, const std::vector<Eigen::Index>& idx,
                           Eigen::Index m) {
  la::TMat<Dual> out(a.rows, Eigen::Index(idx.size()), Dual::constant(0.0, m));
  for (Eigen::Index i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, Eigen::Index(j)) = a(i, idx[j]);
  return out;
}

double gram_threshold(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& gramv,
                      double tol) {
  double scale = 0.0;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    scale = std::max(scale, vectors.col(j).squaredNorm());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gramv);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return tol * std::max(smax, scale);
}

Eigen::Index svd_rank(const Eigen::MatrixXd& m, double thr) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++rank;
  return rank;
}

// Nondegeneracy of a symmetric Gram block: smallest singular value relative
// to the natural scale.
void require_nondegenerate(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& gramv,
                           double tol, const char* what) {
  if (gramv.cols() == 0) return;
  const double thr = gram_threshold(vectors, gramv, tol);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gramv);
  if (svd.singularValues()(svd.singularValues().size() - 1) <= thr)
    throw DegenerateError(what);
}

// Greedy pivot selection: columns of `cand` whose Gram block stays
// nondegenerate, `count` of them, preferring elimination pivot order.
std::vector<Eigen::Index> pivot_select(const Eigen::MatrixXd& gramv, Eigen::Index count) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gramv);
  std::vector<Eigen::Index> idx;
  const auto perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < perm.size() && Eigen::Index(idx.size()) < count; ++k)
    idx.push_back(perm[k]);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

FramePoint::Decomp FramePoint::decompose(const Eigen::VectorXd& v) const {
  Decomp d;
  d.screen.resize(s);
  d.rad.resize(r);
  d.n.resize(r);
  d.w.resize(wq);
  for (Eigen::Index a = 0; a < s; ++a)
    d.screen[a] = double(eps_screen[std::size_t(a)]) * pair(v, Xv.col(a));
  for (Eigen::Index i = 0; i < r; ++i) {
    d.rad[i] = pair(v, Nv.col(i));
    d.n[i] = pair(v, Ev.col(i));
  }
  for (Eigen::Index al = 0; al < wq; ++al)
    d.w[al] = double(eps_w[std::size_t(al)]) * pair(v, Wv.col(al));
  d.tangent_part = Eigen::VectorXd::Zero(v.size());
  if (s) d.tangent_part += Xv * d.screen;
  if (r) d.tangent_part += Ev * d.rad;
  d.transversal_part = Eigen::VectorXd::Zero(v.size());
  if (r) d.transversal_part += Nv * d.n;
  if (wq) d.transversal_part += Wv * d.w;
  d.residual = (v - d.tangent_part - d.transversal_part).norm() / (1.0 + v.norm());
  return d;
}

TangentBasis tangent_frame(const Immersion& imm, const ambient::AmbientStructure& space,
                           const Eigen::VectorXd& w, const Tolerances& tol) {
  Jets jets = eval_jets(imm, space, w);
  // The immersion must have full column rank.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jets.J);
  if (svd.singularValues()(svd.singularValues().size() - 1) <=
      tol.rank * svd.singularValues()(0))
    throw RankError("immersion Jacobian is rank-deficient at the sample point");

  TangentBasis out;
  const bool has_decl = !imm.declared_rad.empty() || !imm.declared_screen.empty();
  if (!has_decl) {
    out.vectors = jets.J;
    return out;
  }
  std::vector<VectorField> all = imm.declared_rad;
  all.insert(all.end(), imm.declared_screen.begin(), imm.declared_screen.end());
  la::TMat<Dual> D = eval_fields(all, jets.frame_env, jets.dim, jets.m);
  Eigen::MatrixXd Dv = D.values();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jets.J);
  for (Eigen::Index j = 0; j < Dv.cols(); ++j) {
    Eigen::VectorXd u = qr.solve(Dv.col(j));
    const double res = (jets.J * u - Dv.col(j)).norm() / (1.0 + Dv.col(j).norm());
    out.residual = std::max(out.residual, res);
    if (res >= tol.frame)
      throw ScenarioError("declared frame vector " + std::to_string(j + 1) +
                          " is not tangent (residual " + std::to_string(res) + ")");
  }
  if (Eigen::Index(all.size()) == jets.m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(Dv);
    if (dsvd.singularValues()(dsvd.singularValues().size() - 1) <=
        tol.rank * dsvd.singularValues()(0))
      throw DegenerateError("declared frame is linearly dependent");
    out.vectors = Dv;
  } else {
    out.vectors = jets.J;
  }
  return out;
}

FramePoint split_bundles(const Immersion& imm, const ambient::AmbientStructure& space,
                         const Eigen::VectorXd& w, const Tolerances& tol) {
  Jets jets = eval_jets(imm, space, w);
  const Eigen::Index dim = jets.dim, m = jets.m;
  const Dual proto = Dual::constant(0.0, m);

  FramePoint fp;
  fp.w = w;
  fp.x = jets.x;
  fp.ctx = ambient::context_at(space, jets.x);
  fp.J = jets.J;

  // Metric along the immersion, with parameter gradients by the chain rule.
  fp.Gd = la::TMat<Dual>(dim, dim, proto);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b) {
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
      for (Eigen::Index c = 0; c < dim; ++c)
        grad += fp.ctx.dG[std::size_t(c)](a, b) * jets.J.row(c).transpose();
      fp.Gd(a, b) = Dual(fp.ctx.G(a, b), grad);
    }

  // Working tangent basis.
  la::TMat<Dual> Jd = jacobian_dual(jets);
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jets.J);
    if (svd.singularValues()(svd.singularValues().size() - 1) <=
        tol.rank * svd.singularValues()(0))
      throw RankError("immersion Jacobian is rank-deficient at the sample point");
  }

  la::TMat<Dual> declE(dim, 0, proto), declS(dim, 0, proto), declW(dim, 0, proto);
  if (!imm.declared_rad.empty())
    declE = eval_fields(imm.declared_rad, jets.frame_env, dim, m);
  if (!imm.declared_screen.empty())
    declS = eval_fields(imm.declared_screen, jets.frame_env, dim, m);
  if (!imm.declared_stransversal.empty())
    declW = eval_fields(imm.declared_stransversal, jets.frame_env, dim, m);

  // Tangency of declared tangent blocks.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> jqr(jets.J);
  auto tangency = [&](const Eigen::MatrixXd& cols, const char* what) {
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
      Eigen::VectorXd u = jqr.solve(cols.col(j));
      const double res = (jets.J * u - cols.col(j)).norm() / (1.0 + cols.col(j).norm());
      fp.tangency_residual = std::max(fp.tangency_residual, res);
      if (res >= tol.frame)
        throw ScenarioError(std::string(what) + " vector " + std::to_string(j + 1) +
                            " is not tangent (residual " + std::to_string(res) + ")");
    }
  };
  tangency(declE.values(), "declared radical");
  tangency(declS.values(), "declared screen");

  la::TMat<Dual> Td(dim, 0, proto);
  const bool full_decl = declE.cols > 0 && declS.cols > 0 && declE.cols + declS.cols == m;
  if (full_decl) {
    Td = hcat(declE, declS, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Td.values());
    if (svd.singularValues()(svd.singularValues().size() - 1) <=
        tol.rank * svd.singularValues()(0))
      throw DegenerateError("declared frame is linearly dependent");
  } else {
    Td = Jd;
  }

  // Radical rank from the tangent Gram matrix.
  la::TMat<Dual> GramT = la::gram_t(Td, fp.Gd);
  const Eigen::MatrixXd gramv = GramT.values();
  const double thr = gram_threshold(Td.values(), gramv, tol.rank);
  const Eigen::Index rank = svd_rank(gramv, thr);
  const Eigen::Index r = m - rank;

  // Radical frame.
  if (declE.cols > 0) {
    if (declE.cols != r)
      throw RankError("declared radical has " + std::to_string(declE.cols) +
                      " vectors but the induced metric has radical rank " +
                      std::to_string(r));
    fp.E = declE;
    const Eigen::MatrixXd Ev = declE.values();
    const Eigen::MatrixXd Tv = Td.values();
    for (Eigen::Index i = 0; i < r; ++i) {
      double mx = 0.0;
      Eigen::VectorXd gE = fp.ctx.G * Ev.col(i);
      for (Eigen::Index j = 0; j < Td.cols; ++j)
        mx = std::max(mx, std::abs(gE.dot(Tv.col(j))));
      if (mx >= tol.frame)
        throw ScenarioError("declared radical vector " + std::to_string(i + 1) +
                            " is not in the radical (residual " + std::to_string(mx) +
                            ")");
    }
  } else if (r > 0) {
    auto kr = la::kernel_t(GramT, thr);
    if (kr.rank != rank)
      throw RankError("radical elimination rank disagrees with the SVD rank");
    fp.E = la::mul(Td, kr.basis);
  } else {
    fp.E = la::TMat<Dual>(dim, 0, proto);
  }

  // Screen.
  la::TMat<Dual> Sraw(dim, 0, proto);
  if (declS.cols > 0) {
    if (declS.cols != m - r)
      throw RankError("declared screen has " + std::to_string(declS.cols) +
                      " vectors; expected " + std::to_string(m - r));
    Sraw = declS;
  } else if (m - r > 0) {
    auto idx = pivot_select(gramv, m - r);
    Sraw = select_cols(Td, idx, m);
  }
  if (Sraw.cols > 0)
    require_nondegenerate(Sraw.values(), la::gram_t(Sraw, fp.Gd).values(), tol.rank,
                          "screen distribution is degenerate; declare a screen");

  // Screen transversal.
  la::TMat<Dual> Wraw(dim, 0, proto);
  const Eigen::Index codim = dim - m;
  if (declW.cols > 0) {
    if (declW.cols != codim - r)
      throw RankError("declared screen transversal has " + std::to_string(declW.cols) +
                      " vectors; expected " + std::to_string(codim - r));
    Wraw = declW;
    const Eigen::MatrixXd Wv = declW.values();
    const Eigen::MatrixXd Tv = Td.values();
    for (Eigen::Index j = 0; j < Wv.cols(); ++j) {
      double mx = 0.0;
      Eigen::VectorXd gw = fp.ctx.G * Wv.col(j);
      for (Eigen::Index t = 0; t < Tv.cols(); ++t)
        mx = std::max(mx, std::abs(gw.dot(Tv.col(t))));
      fp.tangency_residual = std::max(fp.tangency_residual, mx);
      if (mx >= tol.frame)
        throw ScenarioError("declared screen-transversal vector " + std::to_string(j + 1) +
                            " is not orthogonal to the tangent space");
    }
  } else if (codim - r > 0) {
    // TM-perp is the kernel of the tangent covector rows.
    la::TMat<Dual> A = la::mul(la::transpose(Td), fp.Gd);  // m x dim
    double arow = 0.0;
    const Eigen::MatrixXd av = A.values();
    for (Eigen::Index i = 0; i < av.rows(); ++i)
      arow = std::max(arow, av.row(i).norm());
    auto kr = la::kernel_t(A, tol.rank * std::max(arow, 1.0));
    if (kr.rank != m) throw RankError("tangent covector rows are rank-deficient");
    la::TMat<Dual> perp = kr.basis;  // dim x codim (coordinates are ambient here)
    Eigen::MatrixXd pg = la::gram_t(perp, fp.Gd).values();
    auto idx = pivot_select(pg, codim - r);
    Wraw = select_cols(perp, idx, m);
  }
  if (Wraw.cols > 0)
    require_nondegenerate(Wraw.values(), la::gram_t(Wraw, fp.Gd).values(), tol.rank,
                          "screen transversal is degenerate; declare one");

  // Orthonormalize and build the lightlike transversal frame.
  fp.r = r;
  fp.s = m - r;
  fp.wq = codim - r;
  fp.mt = m;
  if (fp.s > 0) {
    auto os = la::orthonormalize_t(Sraw, fp.Gd, tol.rank);
    fp.Xhat = os.vectors;
    fp.eps_screen = os.signatures;
  } else {
    fp.Xhat = la::TMat<Dual>(dim, 0, proto);
  }
  if (fp.wq > 0) {
    auto ow = la::orthonormalize_t(Wraw, fp.Gd, tol.rank);
    fp.What = ow.vectors;
    fp.eps_w = ow.signatures;
  } else {
    fp.What = la::TMat<Dual>(dim, 0, proto);
  }
  if (r > 0) {
    fp.N = la::null_frame_t(fp.E, fp.Xhat, fp.What, fp.Gd, tol.rank);
  } else {
    fp.N = la::TMat<Dual>(dim, 0, proto);
  }

  fp.Ev = fp.E.values();
  fp.Xv = fp.Xhat.values();
  fp.Wv = fp.What.values();
  fp.Nv = fp.N.values();
  fp.tangent.resize(dim, fp.mt);
  if (r) fp.tangent.leftCols(r) = fp.Ev;
  if (fp.s) fp.tangent.rightCols(fp.s) = fp.Xv;

  fp.u_coords.resize(m, fp.mt);
  for (Eigen::Index j = 0; j < fp.mt; ++j) {
    fp.u_coords.col(j) = jqr.solve(fp.tangent.col(j));
    const double res =
        (jets.J * fp.u_coords.col(j) - fp.tangent.col(j)).norm() /
        (1.0 + fp.tangent.col(j).norm());
    fp.tangency_residual = std::max(fp.tangency_residual, res);
  }

  // Quasi-orthonormality suite.
  double rmax = 0.0;
  auto gpair = [&](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return Eigen::MatrixXd(A.transpose() * fp.ctx.G * B);
  };
  if (r) {
    rmax = std::max(rmax, gpair(fp.Ev, fp.Ev).lpNorm<Eigen::Infinity>());
    rmax = std::max(rmax, (gpair(fp.Ev, fp.Nv) -
                           Eigen::MatrixXd::Identity(r, r)).lpNorm<Eigen::Infinity>());
    rmax = std::max(rmax, gpair(fp.Nv, fp.Nv).lpNorm<Eigen::Infinity>());
    if (fp.s) {
      rmax = std::max(rmax, gpair(fp.Ev, fp.Xv).lpNorm<Eigen::Infinity>());
      rmax = std::max(rmax, gpair(fp.Nv, fp.Xv).lpNorm<Eigen::Infinity>());
    }
    if (fp.wq) {
      rmax = std::max(rmax, gpair(fp.Ev, fp.Wv).lpNorm<Eigen::Infinity>());
      rmax = std::max(rmax, gpair(fp.Nv, fp.Wv).lpNorm<Eigen::Infinity>());
    }
  }
  if (fp.s) {
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(fp.s, fp.s);
    for (Eigen::Index a = 0; a < fp.s; ++a) want(a, a) = fp.eps_screen[std::size_t(a)];
    rmax = std::max(rmax, (gpair(fp.Xv, fp.Xv) - want).lpNorm<Eigen::Infinity>());
    if (fp.wq)
      rmax = std::max(rmax, gpair(fp.Xv, fp.Wv).lpNorm<Eigen::Infinity>());
  }
  if (fp.wq) {
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(fp.wq, fp.wq);
    for (Eigen::Index a = 0; a < fp.wq; ++a) want(a, a) = fp.eps_w[std::size_t(a)];
    rmax = std::max(rmax, (gpair(fp.Wv, fp.Wv) - want).lpNorm<Eigen::Infinity>());
  }
  fp.ortho_residual = rmax;
  return fp;
}

namespace {

// nabla_{T_A} of a dual field column: parameter derivative along u plus
// Christoffel terms.
Eigen::VectorXd nabla_field(const FramePoint& fp, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& Xval, const la::TMat<Dual>& block,
                            Eigen::Index col) {
  const Eigen::Index dim = fp.ctx.G.rows();
  Eigen::VectorXd out(dim);
  Eigen::VectorXd Yval(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const Dual& ya = block(a, col);
    Yval[a] = ya.v;
    out[a] = u.dot(ya.g);
  }
  for (Eigen::Index a = 0; a < dim; ++a)
    out[a] += Xval.dot(fp.ctx.Gamma[std::size_t(a)] * Yval);
  return out;
}

const Dual& tangent_dual(const FramePoint& fp, Eigen::Index slot, Eigen::Index a) {
  return slot < fp.r ? fp.E(a, slot) : fp.Xhat(a, slot - fp.r);
}

}  // namespace

GaussWeingarten gauss_weingarten(const FramePoint& fp) {
  GaussWeingarten gw;
  gw.r = fp.r;
  gw.s = fp.s;
  gw.wq = fp.wq;
  gw.mt = fp.mt;
  const Eigen::Index mt = fp.mt, r = fp.r, s = fp.s, wq = fp.wq;
  const Eigen::Index dim = fp.ctx.G.rows();

  gw.dTT.assign(std::size_t(mt), std::vector<Eigen::VectorXd>(std::size_t(mt)));
  gw.dTN.assign(std::size_t(mt), std::vector<Eigen::VectorXd>(std::size_t(r)));
  gw.dTW.assign(std::size_t(mt), std::vector<Eigen::VectorXd>(std::size_t(wq)));
  gw.induced.assign(std::size_t(mt), std::vector<Eigen::VectorXd>(std::size_t(mt)));
  gw.h_l.assign(std::size_t(r), Eigen::MatrixXd::Zero(mt, mt));
  gw.h_s.assign(std::size_t(wq), Eigen::MatrixXd::Zero(mt, mt));
  gw.h_star.assign(std::size_t(r), Eigen::MatrixXd::Zero(mt, s));
  gw.A_N.assign(std::size_t(r), std::vector<Eigen::VectorXd>(std::size_t(mt)));
  gw.A_W.assign(std::size_t(wq), std::vector<Eigen::VectorXd>(std::size_t(mt)));
  gw.A_E.assign(std::size_t(r), std::vector<Eigen::VectorXd>(std::size_t(mt)));
  gw.tau.assign(std::size_t(mt), Eigen::MatrixXd::Zero(r, r));
  gw.rho.assign(std::size_t(mt), Eigen::MatrixXd::Zero(r, wq));
  gw.phi1f.assign(std::size_t(mt), Eigen::MatrixXd::Zero(wq, r));
  gw.sigma.assign(std::size_t(mt), Eigen::MatrixXd::Zero(wq, wq));

  auto track = [&](const Eigen::VectorXd& v, const FramePoint::Decomp& d) {
    gw.recon_residual = std::max(gw.recon_residual, d.residual);
    (void)v;
  };

  for (Eigen::Index A = 0; A < mt; ++A) {
    const Eigen::VectorXd uA = fp.u_coords.col(A);
    const Eigen::VectorXd XA = fp.tangent.col(A);
    // Gauss: derivatives of the tangent frame fields.
    for (Eigen::Index B = 0; B < mt; ++B) {
      Eigen::VectorXd v(dim);
      if (B < r)
        v = nabla_field(fp, uA, XA, fp.E, B);
      else
        v = nabla_field(fp, uA, XA, fp.Xhat, B - r);
      gw.dTT[std::size_t(A)][std::size_t(B)] = v;
      auto d = fp.decompose(v);
      track(v, d);
      for (Eigen::Index i = 0; i < r; ++i) gw.h_l[std::size_t(i)](A, B) = d.n[i];
      for (Eigen::Index al = 0; al < wq; ++al) gw.h_s[std::size_t(al)](A, B) = d.w[al];
      gw.induced[std::size_t(A)][std::size_t(B)] = d.tangent_part;
      if (B >= r)
        for (Eigen::Index i = 0; i < r; ++i)
          gw.h_star[std::size_t(i)](A, B - r) = d.rad[i];
    }
    // Weingarten: derivatives of N and What.
    for (Eigen::Index i = 0; i < r; ++i) {
      Eigen::VectorXd v = nabla_field(fp, uA, XA, fp.N, i);
      gw.dTN[std::size_t(A)][std::size_t(i)] = v;
      auto d = fp.decompose(v);
      track(v, d);
      for (Eigen::Index j = 0; j < r; ++j) gw.tau[std::size_t(A)](i, j) = d.n[j];
      for (Eigen::Index al = 0; al < wq; ++al) gw.rho[std::size_t(A)](i, al) = d.w[al];
      gw.A_N[std::size_t(i)][std::size_t(A)] = -d.tangent_part;
    }
    for (Eigen::Index al = 0; al < wq; ++al) {
      Eigen::VectorXd v = nabla_field(fp, uA, XA, fp.What, al);
      gw.dTW[std::size_t(A)][std::size_t(al)] = v;
      auto d = fp.decompose(v);
      track(v, d);
      for (Eigen::Index i = 0; i < r; ++i) gw.phi1f[std::size_t(A)](al, i) = d.n[i];
      for (Eigen::Index be = 0; be < wq; ++be) gw.sigma[std::size_t(A)](al, be) = d.w[be];
      gw.A_W[std::size_t(al)][std::size_t(A)] = -d.tangent_part;
    }
    // Screen shape operators A*_{E_i}: minus the screen part of nabla_A E_i.
    for (Eigen::Index i = 0; i < r; ++i) {
      auto d = fp.decompose(gw.induced[std::size_t(A)][std::size_t(i)]);
      Eigen::VectorXd screen_part =
          s ? Eigen::VectorXd(fp.Xv * d.screen) : Eigen::VectorXd::Zero(dim);
      gw.A_E[std::size_t(i)][std::size_t(A)] = -screen_part;
      // eq50 consistency: the radical part must be -sum_j tau_ji(A) E_j.
      for (Eigen::Index j = 0; j < r; ++j)
        gw.recon_residual = std::max(
            gw.recon_residual, std::abs(d.rad[j] + gw.tau[std::size_t(A)](j, i)) /
                                   (1.0 + std::abs(d.rad[j])));
    }
  }

  for (Eigen::Index A = 0; A < mt; ++A)
    for (Eigen::Index B = 0; B < mt; ++B) {
      gw.tangent_residual =
          std::max(gw.tangent_residual,
                   la::subspace_defect(gw.induced[std::size_t(A)][std::size_t(B)],
                                       fp.tangent));
      for (Eigen::Index i = 0; i < r; ++i)
        gw.h_sym_residual = std::max(
            gw.h_sym_residual,
            std::abs(gw.h_l[std::size_t(i)](A, B) - gw.h_l[std::size_t(i)](B, A)));
      for (Eigen::Index al = 0; al < wq; ++al)
        gw.h_sym_residual = std::max(
            gw.h_sym_residual,
            std::abs(gw.h_s[std::size_t(al)](A, B) - gw.h_s[std::size_t(al)](B, A)));
    }
  return gw;
}

Eigen::VectorXd GaussWeingarten::nabla_bar(const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dTT[0][0].size());
  for (Eigen::Index A = 0; A < mt; ++A)
    for (Eigen::Index B = 0; B < mt; ++B)
      if (a[A] != 0.0 && b[B] != 0.0)
        out += a[A] * b[B] * dTT[std::size_t(A)][std::size_t(B)];
  return out;
}

Eigen::VectorXd GaussWeingarten::nabla(const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(induced[0][0].size());
  for (Eigen::Index A = 0; A < mt; ++A)
    for (Eigen::Index B = 0; B < mt; ++B)
      if (a[A] != 0.0 && b[B] != 0.0)
        out += a[A] * b[B] * induced[std::size_t(A)][std::size_t(B)];
  return out;
}

Eigen::VectorXd GaussWeingarten::h_vec(const FramePoint& fp, const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fp.ctx.G.rows());
  for (Eigen::Index i = 0; i < r; ++i) {
    const double c = a.dot(h_l[std::size_t(i)] * b);
    out += c * fp.Nv.col(i);
  }
  for (Eigen::Index al = 0; al < wq; ++al) {
    const double c = a.dot(h_s[std::size_t(al)] * b);
    out += c * fp.Wv.col(al);
  }
  return out;
}

Eigen::VectorXd GaussWeingarten::shape(const FramePoint& fp,
                                       const Eigen::VectorXd& n_coeff,
                                       const Eigen::VectorXd& w_coeff,
                                       const Eigen::VectorXd& a) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fp.ctx.G.rows());
  for (Eigen::Index A = 0; A < mt; ++A) {
    if (a[A] == 0.0) continue;
    for (Eigen::Index i = 0; i < r; ++i)
      if (n_coeff[i] != 0.0) out += a[A] * n_coeff[i] * A_N[std::size_t(i)][std::size_t(A)];
    for (Eigen::Index al = 0; al < wq; ++al)
      if (w_coeff[al] != 0.0)
        out += a[A] * w_coeff[al] * A_W[std::size_t(al)][std::size_t(A)];
  }
  return out;
}

Eigen::VectorXd GaussWeingarten::nabla_t(const FramePoint& fp, const Eigen::VectorXd& a,
                                         const Eigen::VectorXd& n_coeff,
                                         const Eigen::VectorXd& w_coeff) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(fp.ctx.G.rows());
  for (Eigen::Index A = 0; A < mt; ++A) {
    if (a[A] == 0.0) continue;
    for (Eigen::Index i = 0; i < r; ++i)
      if (n_coeff[i] != 0.0) v += a[A] * n_coeff[i] * dTN[std::size_t(A)][std::size_t(i)];
    for (Eigen::Index al = 0; al < wq; ++al)
      if (w_coeff[al] != 0.0)
        v += a[A] * w_coeff[al] * dTW[std::size_t(A)][std::size_t(al)];
  }
  return fp.decompose(v).transversal_part;
}

Eigen::VectorXd lie_bracket(const FramePoint& fp, const Eigen::VectorXd& ca,
                            const Eigen::VectorXd& cb) {
  const Eigen::Index dim = fp.ctx.G.rows();
  const Eigen::VectorXd ua = fp.u_of(ca), ub = fp.u_of(cb);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    Dual xa = Dual::constant(0.0, fp.w.size());
    Dual ya = Dual::constant(0.0, fp.w.size());
    for (Eigen::Index k = 0; k < fp.mt; ++k) {
      if (ca[k] != 0.0) xa += ca[k] * tangent_dual(fp, k, a);
      if (cb[k] != 0.0) ya += cb[k] * tangent_dual(fp, k, a);
    }
    out[a] = ua.dot(ya.g) - ub.dot(xa.g);
  }
  return out;
}

MetricDefect metric_connection_defect(const FramePoint& fp, const GaussWeingarten& gw,
                                      Eigen::Index A, Eigen::Index B, Eigen::Index C) {
  // X g(Y,Z) via the dual pairing along the immersion.
  auto col_dual = [&](Eigen::Index slot) {
    la::TMat<Dual> c(fp.ctx.G.rows(), 1, Dual::constant(0.0, fp.w.size()));
    for (Eigen::Index a = 0; a < fp.ctx.G.rows(); ++a) c(a, 0) = tangent_dual(fp, slot, a);
    return c;
  };
  Dual gBC = la::pair_t(col_dual(B), col_dual(C), fp.Gd);
  const double dg = fp.u_coords.col(A).dot(gBC.g);

  const Eigen::VectorXd nAB = gw.induced[std::size_t(A)][std::size_t(B)];
  const Eigen::VectorXd nAC = gw.induced[std::size_t(A)][std::size_t(C)];
  MetricDefect out;
  out.lhs = dg - fp.pair(nAB, fp.tangent.col(C)) - fp.pair(fp.tangent.col(B), nAC);
  out.rhs = 0.0;
  for (Eigen::Index i = 0; i < gw.r; ++i)
    out.rhs += gw.h_l[std::size_t(i)](A, B) * fp.lambda(fp.tangent.col(C), i) +
               gw.h_l[std::size_t(i)](A, C) * fp.lambda(fp.tangent.col(B), i);
  return out;
}

double RelationsReport::max() const {
  return std::max({r1, r2, r3, r4, r5, r6, screen_metric});
}

RelationsReport shape_operator_relations_check(const FramePoint& fp,
                                               const GaussWeingarten& gw) {
  RelationsReport rep;
  const Eigen::Index mt = gw.mt, r = gw.r, wq = gw.wq, s = gw.s;
  for (Eigen::Index A = 0; A < mt; ++A) {
    for (Eigen::Index i = 0; i < r; ++i) {
      const Eigen::VectorXd& AE = gw.A_E[std::size_t(i)][std::size_t(A)];
      for (Eigen::Index B = 0; B < mt; ++B) {
        double want = gw.h_l[std::size_t(i)](A, B);
        for (Eigen::Index j = 0; j < r; ++j)
          want += gw.h_l[std::size_t(j)](A, i) * fp.lambda(fp.tangent.col(B), j);
        rep.r1 = std::max(rep.r1, std::abs(fp.pair(AE, fp.tangent.col(B)) - want));
      }
      for (Eigen::Index j = 0; j < r; ++j)
        rep.r2 = std::max(rep.r2, std::abs(fp.pair(AE, fp.Nv.col(j))));
      const Eigen::VectorXd& AN = gw.A_N[std::size_t(i)][std::size_t(A)];
      for (Eigen::Index B = 0; B < mt; ++B) {
        const double want = (B >= r) ? gw.h_star[std::size_t(i)](A, B - r) : 0.0;
        rep.r5 = std::max(rep.r5, std::abs(fp.pair(AN, fp.tangent.col(B)) - want));
      }
      for (Eigen::Index j = 0; j < r; ++j) {
        const Eigen::VectorXd& ANj = gw.A_N[std::size_t(j)][std::size_t(A)];
        rep.r6 = std::max(rep.r6, std::abs(fp.lambda(AN, j) + fp.lambda(ANj, i)));
      }
    }
    for (Eigen::Index al = 0; al < wq; ++al) {
      const Eigen::VectorXd& AW = gw.A_W[std::size_t(al)][std::size_t(A)];
      const double eps = fp.eps_w[std::size_t(al)];
      for (Eigen::Index B = 0; B < mt; ++B) {
        double want = eps * gw.h_s[std::size_t(al)](A, B);
        for (Eigen::Index i = 0; i < r; ++i)
          want += gw.phi1f[std::size_t(A)](al, i) * fp.lambda(fp.tangent.col(B), i);
        rep.r3 = std::max(rep.r3, std::abs(fp.pair(AW, fp.tangent.col(B)) - want));
      }
      for (Eigen::Index i = 0; i < r; ++i)
        rep.r4 = std::max(rep.r4, std::abs(fp.pair(AW, fp.Nv.col(i)) -
                                           eps * gw.rho[std::size_t(A)](i, al)));
    }
    // Screen connection is metric: X g(PY,PZ) = g(nabla*_X PY, PZ) + g(PY, nabla*_X PZ).
    for (Eigen::Index a = 0; a < s; ++a)
      for (Eigen::Index b = a; b < s; ++b) {
        la::TMat<Dual> ca = fp.Xhat.col(a), cb = fp.Xhat.col(b);
        Dual gab = la::pair_t(ca, cb, fp.Gd);
        const double dg = fp.u_coords.col(A).dot(gab.g);
        auto da = fp.decompose(gw.induced[std::size_t(A)][std::size_t(r + a)]);
        auto db = fp.decompose(gw.induced[std::size_t(A)][std::size_t(r + b)]);
        Eigen::VectorXd sa = s ? Eigen::VectorXd(fp.Xv * da.screen)
                               : Eigen::VectorXd::Zero(fp.ctx.G.rows());
        Eigen::VectorXd sb = s ? Eigen::VectorXd(fp.Xv * db.screen)
                               : Eigen::VectorXd::Zero(fp.ctx.G.rows());
        const double want = fp.pair(sa, fp.Xv.col(b)) + fp.pair(fp.Xv.col(a), sb);
        rep.screen_metric = std::max(rep.screen_metric, std::abs(dg - want));
      }
  }
  return rep;
}

}  // namespace lightlike::subm
