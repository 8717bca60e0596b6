#include "lightlike/linalg.hpp"

#include <Eigen/SVD>

namespace lightlike::linalg {

namespace {

TMat<double> wrap(const Eigen::MatrixXd& m) {
  TMat<double> out(m.rows(), m.cols(), 0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

Eigen::MatrixXd gram(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& metric) {
  if (vectors.rows() != metric.rows() || metric.rows() != metric.cols())
    throw Error("gram: dimension mismatch (vectors are " +
                std::to_string(vectors.rows()) + "-dimensional, metric is " +
                std::to_string(metric.rows()) + "x" + std::to_string(metric.cols()) + ")");
  return vectors.transpose() * metric * vectors;
}

RadicalResult radical(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& metric,
                      double tol) {
  // Input independence check on the plain frame matrix.
  Eigen::JacobiSVD<Eigen::MatrixXd> fsvd(vectors);
  const Eigen::VectorXd fs = fsvd.singularValues();
  if (fs.size() == 0 || fs[fs.size() - 1] <= tol * fs[0])
    throw DegenerateError("radical: input vectors are linearly dependent");

  const Eigen::MatrixXd G = gram(vectors, metric);
  Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(G);
  const Eigen::VectorXd gs = gsvd.singularValues();

  double scale = 0.0;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j)
    scale = std::max(scale, vectors.col(j).squaredNorm());
  const double thr = tol * std::max(gs.size() ? gs[0] : 0.0, scale);

  Eigen::Index svd_rank = 0;
  for (Eigen::Index i = 0; i < gs.size(); ++i)
    if (gs[i] > thr) ++svd_rank;

  auto kr = kernel_t(wrap(G), thr);
  if (kr.rank != svd_rank)
    throw RankError("radical: elimination rank " + std::to_string(kr.rank) +
                    " disagrees with SVD rank " + std::to_string(svd_rank));

  RadicalResult out;
  out.gram_singular_values = gs;
  out.rank = G.cols() - svd_rank;
  out.coeffs = kr.basis.values();
  out.block.vectors = vectors * out.coeffs;
  out.block.labels.assign(std::size_t(out.rank), "rad");
  out.block.signatures.assign(std::size_t(out.rank), 0);
  return out;
}

FrameBlock signed_orthonormalize(const Eigen::MatrixXd& vectors,
                                 const Eigen::MatrixXd& metric, double tol) {
  auto res = orthonormalize_t(wrap(vectors), wrap(metric), tol);
  FrameBlock out;
  out.vectors = res.vectors.values();
  out.signatures = res.signatures;
  out.labels.assign(std::size_t(out.count()), "screen");
  return out;
}

FrameBlock null_transversal_frame(const Eigen::MatrixXd& radical_basis,
                                  const Eigen::MatrixXd& screen,
                                  const Eigen::MatrixXd& screen_transversal,
                                  const Eigen::MatrixXd& metric, double tol) {
  const Eigen::Index dim = metric.rows();
  TMat<double> E = wrap(radical_basis);
  TMat<double> S = screen.size() ? wrap(screen) : TMat<double>(dim, 0, 0.0);
  TMat<double> W =
      screen_transversal.size() ? wrap(screen_transversal) : TMat<double>(dim, 0, 0.0);
  auto N = null_frame_t(E, S, W, wrap(metric), tol);
  FrameBlock out;
  out.vectors = N.values();
  out.signatures.assign(std::size_t(N.cols), 0);
  out.labels.assign(std::size_t(N.cols), "ltr");
  return out;
}

namespace {

double projection_defect(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return v.norm();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
  return (v - Q * (Q.transpose() * v)).norm();
}

}  // namespace

double subspace_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  return projection_defect(v, basis) / nv;
}

double subspace_defect(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  return projection_defect(v, basis) / (1.0 + v.norm());
}

double mutual_span_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    r = std::max(r, subspace_residual(A.col(j), B));
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    r = std::max(r, subspace_residual(B.col(j), A));
  return r;
}

}  // namespace lightlike::linalg
