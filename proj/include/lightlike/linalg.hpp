#ifndef LIGHTLIKE_LINALG_HPP
#define LIGHTLIKE_LINALG_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lightlike/dual.hpp"
#include "lightlike/errors.hpp"

namespace lightlike::linalg {

// ---------------------------------------------------------------------------
// A frame of ambient vectors with bundle labels and signatures.
// epsilon is 0 for null vectors, +-1 for unit ones.
struct FrameBlock {
  Eigen::MatrixXd vectors;  // dim x k, one vector per column
  std::vector<std::string> labels;
  std::vector<int> signatures;

  Eigen::Index dim() const { return vectors.rows(); }
  Eigen::Index count() const { return vectors.cols(); }
};

// ---------------------------------------------------------------------------
// Minimal dense matrix over a generic scalar (double or Dual). The numeric
// pipeline runs every frame construction twice conceptually: the value lane
// decides ranks and pivots, the dual lane carries parameter derivatives
// through the identical sequence of operations.
inline double val(double x) { return x; }
inline double val(const Dual& d) { return d.v; }
inline double zero_like(double) { return 0.0; }
inline Dual zero_like(const Dual& d) { return Dual::constant(0.0, d.vars()); }
inline Dual abs_val(const Dual& d) { return d.v < 0 ? -d : d; }
inline double abs_val(double x) { return x < 0 ? -x : x; }

template <class T>
struct TMat {
  Eigen::Index rows = 0, cols = 0;
  std::vector<T> a;  // row-major

  TMat() = default;
  TMat(Eigen::Index r, Eigen::Index c, const T& init)
      : rows(r), cols(c), a(std::size_t(r * c), init) {}

  T& operator()(Eigen::Index i, Eigen::Index j) { return a[std::size_t(i * cols + j)]; }
  const T& operator()(Eigen::Index i, Eigen::Index j) const {
    return a[std::size_t(i * cols + j)];
  }
  const T& proto() const { return a.front(); }

  Eigen::MatrixXd values() const {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = val((*this)(i, j));
    return m;
  }
  TMat col(Eigen::Index j) const {
    TMat c(rows, 1, zero_like(proto()));
    for (Eigen::Index i = 0; i < rows; ++i) c(i, 0) = (*this)(i, j);
    return c;
  }
};

inline double make_like(double v, const double&) { return v; }
inline Dual make_like(double v, const Dual& proto) { return Dual::constant(v, proto.vars()); }

template <class T>
TMat<T> lift(const Eigen::MatrixXd& m, const T& proto) {
  TMat<T> out(m.rows(), m.cols(), zero_like(proto));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = make_like(m(i, j), proto);
  return out;
}

template <class T>
TMat<T> mul(const TMat<T>& x, const TMat<T>& y) {
  TMat<T> out(x.rows, y.cols, zero_like(x.proto()));
  for (Eigen::Index i = 0; i < x.rows; ++i)
    for (Eigen::Index j = 0; j < y.cols; ++j) {
      T s = zero_like(x.proto());
      for (Eigen::Index k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
      out(i, j) = s;
    }
  return out;
}

template <class T>
TMat<T> transpose(const TMat<T>& x) {
  TMat<T> out(x.cols, x.rows, zero_like(x.proto()));
  for (Eigen::Index i = 0; i < x.rows; ++i)
    for (Eigen::Index j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

// Gram matrix of columns under the (possibly indefinite) metric G.
template <class T>
TMat<T> gram_t(const TMat<T>& vecs, const TMat<T>& G) {
  if (vecs.cols == 0) return TMat<T>(0, 0, zero_like(G.proto()));
  return mul(transpose(vecs), mul(G, vecs));
}

// <u, w>_G for single columns.
template <class T>
T pair_t(const TMat<T>& u, const TMat<T>& w, const TMat<T>& G) {
  T s = zero_like(u.proto());
  for (Eigen::Index i = 0; i < G.rows; ++i)
    for (Eigen::Index j = 0; j < G.cols; ++j) s += u(i, 0) * G(i, j) * w(j, 0);
  return s;
}

// Linear solve with partial pivoting on the value lane. Throws on pivots
// below piv_tol (absolute).
template <class T>
TMat<T> lu_solve_t(TMat<T> M, TMat<T> rhs, double piv_tol, const char* what) {
  const Eigen::Index n = M.rows;
  for (Eigen::Index s = 0; s < n; ++s) {
    Eigen::Index ip = s;
    for (Eigen::Index i = s + 1; i < n; ++i)
      if (std::abs(val(M(i, s))) > std::abs(val(M(ip, s)))) ip = i;
    if (std::abs(val(M(ip, s))) <= piv_tol) throw DegenerateError(what);
    if (ip != s) {
      for (Eigen::Index j = 0; j < n; ++j) std::swap(M(s, j), M(ip, j));
      for (Eigen::Index j = 0; j < rhs.cols; ++j) std::swap(rhs(s, j), rhs(ip, j));
    }
    for (Eigen::Index i = s + 1; i < n; ++i) {
      T f = M(i, s) / M(s, s);
      for (Eigen::Index j = s; j < n; ++j) M(i, j) -= f * M(s, j);
      for (Eigen::Index j = 0; j < rhs.cols; ++j) rhs(i, j) -= f * rhs(s, j);
    }
  }
  TMat<T> x(n, rhs.cols, zero_like(M.proto()));
  for (Eigen::Index s = n - 1; s >= 0; --s) {
    for (Eigen::Index j = 0; j < rhs.cols; ++j) {
      T acc = rhs(s, j);
      for (Eigen::Index k = s + 1; k < n; ++k) acc -= M(s, k) * x(k, j);
      x(s, j) = acc / M(s, s);
    }
  }
  return x;
}

// Kernel basis of a (rectangular) matrix by Gauss-Jordan with full pivoting.
// Pivots below piv_tol (absolute, on the value lane) end the elimination;
// the remaining columns parametrize the kernel.
template <class T>
struct KernelResult {
  Eigen::Index rank = 0;
  TMat<T> basis;  // cols x k, one kernel coefficient vector per column
};

template <class T>
KernelResult<T> kernel_t(TMat<T> A, double piv_tol) {
  const Eigen::Index r = A.rows, c = A.cols;
  std::vector<Eigen::Index> colp(static_cast<std::size_t>(c));
  for (Eigen::Index j = 0; j < c; ++j) colp[std::size_t(j)] = j;

  Eigen::Index rank = 0;
  const Eigen::Index maxr = std::min(r, c);
  for (Eigen::Index s = 0; s < maxr; ++s) {
    Eigen::Index bi = -1, bj = -1;
    double best = piv_tol;
    for (Eigen::Index i = s; i < r; ++i)
      for (Eigen::Index j = s; j < c; ++j)
        if (std::abs(val(A(i, j))) > best) { best = std::abs(val(A(i, j))); bi = i; bj = j; }
    if (bi < 0) break;
    if (bi != s)
      for (Eigen::Index j = 0; j < c; ++j) std::swap(A(s, j), A(bi, j));
    if (bj != s) {
      for (Eigen::Index i = 0; i < r; ++i) std::swap(A(i, s), A(i, bj));
      std::swap(colp[std::size_t(s)], colp[std::size_t(bj)]);
    }
    for (Eigen::Index i = 0; i < r; ++i) {
      if (i == s) continue;
      T f = A(i, s) / A(s, s);
      for (Eigen::Index j = s; j < c; ++j) A(i, j) -= f * A(s, j);
    }
    ++rank;
  }

  KernelResult<T> out;
  out.rank = rank;
  const Eigen::Index k = c - rank;
  out.basis = TMat<T>(c, k, zero_like(A.proto()));
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Index fc = rank + f;
    out.basis(colp[std::size_t(fc)], f) = make_like(1.0, A.proto());
    for (Eigen::Index s = 0; s < rank; ++s)
      out.basis(colp[std::size_t(s)], f) = -(A(s, fc) / A(s, s));
  }
  return out;
}

// Signed Gram-Schmidt against an indefinite metric. At each step the vector
// with the largest |self product| pivots; when every remaining self product
// vanishes, the largest cross pair is pre-combined into u+v, u-v (hyperbolic
// pair). Output keeps the input slot order.
template <class T>
struct OrthoResult {
  TMat<T> vectors;              // dim x k, slot-ordered
  std::vector<int> signatures;  // per slot
};

template <class T>
OrthoResult<T> orthonormalize_t(const TMat<T>& vecs, const TMat<T>& G, double tol) {
  const Eigen::Index dim = vecs.rows, k = vecs.cols;
  std::vector<TMat<T>> w;
  for (Eigen::Index j = 0; j < k; ++j) w.push_back(vecs.col(j));
  std::vector<bool> done(std::size_t(k), false);

  // Scale for pivot thresholds: largest squared column norm.
  double scale = 0.0;
  const Eigen::MatrixXd vv = vecs.values();
  for (Eigen::Index j = 0; j < k; ++j) scale = std::max(scale, vv.col(j).squaredNorm());
  const double piv_tol = tol * std::max(scale, 1e-300);

  OrthoResult<T> out;
  out.vectors = TMat<T>(dim, k, zero_like(vecs.proto()));
  out.signatures.assign(std::size_t((k)), 0);

  Eigen::Index remaining = k;
  while (remaining > 0) {
    Eigen::Index best = -1;
    double bestval = piv_tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (done[std::size_t(j)]) continue;
      const double sp = std::abs(val(pair_t(w[std::size_t(j)], w[std::size_t(j)], G)));
      if (sp > bestval) { bestval = sp; best = j; }
    }
    if (best < 0) {
      // All remaining self products vanish: combine the strongest cross pair.
      Eigen::Index bi = -1, bj = -1;
      double bc = piv_tol;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (done[std::size_t(i)]) continue;
        for (Eigen::Index j = i + 1; j < k; ++j) {
          if (done[std::size_t(j)]) continue;
          const double cp = std::abs(val(pair_t(w[std::size_t(i)], w[std::size_t(j)], G)));
          if (cp > bc) { bc = cp; bi = i; bj = j; }
        }
      }
      if (bi < 0)
        throw DegenerateError("signed orthonormalization: degenerate span (pivoting exhausted)");
      TMat<T> a = w[std::size_t(bi)], b = w[std::size_t(bj)];
      for (Eigen::Index i = 0; i < dim; ++i) {
        w[std::size_t(bi)](i, 0) = a(i, 0) + b(i, 0);
        w[std::size_t(bj)](i, 0) = a(i, 0) - b(i, 0);
      }
      continue;
    }
    T self = pair_t(w[std::size_t(best)], w[std::size_t(best)], G);
    const int eps = val(self) > 0 ? 1 : -1;
    using std::sqrt;
    T nrm = sqrt(abs_val(self));
    TMat<T> u = w[std::size_t(best)];
    for (Eigen::Index i = 0; i < dim; ++i) u(i, 0) = u(i, 0) / nrm;
    for (Eigen::Index i = 0; i < dim; ++i) out.vectors(i, best) = u(i, 0);
    out.signatures[std::size_t(best)] = eps;
    done[std::size_t(best)] = true;
    --remaining;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (done[std::size_t(j)]) continue;
      T c = pair_t(w[std::size_t(j)], u, G);
      for (Eigen::Index i = 0; i < dim; ++i)
        w[std::size_t(j)](i, 0) -= double(eps) * c * u(i, 0);
    }
  }
  return out;
}

// The lightlike transversal frame dual to the radical basis: solve for the
// minimum-norm V_i orthogonal to the screen and screen-transversal blocks
// with g(V_i, E_j) = delta_ij, then subtract radical corrections
// N_i = V_i - 1/2 sum_k g(V_i, V_k) E_k to kill the N-N products.
template <class T>
TMat<T> null_frame_t(const TMat<T>& E, const TMat<T>& screen, const TMat<T>& strans,
                     const TMat<T>& G, double tol) {
  const Eigen::Index dim = G.rows, r = E.cols;
  const Eigen::Index nrows = screen.cols + strans.cols + r;
  TMat<T> B(nrows, dim, zero_like(G.proto()));
  Eigen::Index row = 0;
  auto add_rows = [&](const TMat<T>& blk) {
    TMat<T> gb = mul(G, blk);  // dim x k
    for (Eigen::Index j = 0; j < blk.cols; ++j, ++row)
      for (Eigen::Index i = 0; i < dim; ++i) B(row, i) = gb(i, j);
  };
  add_rows(screen);
  add_rows(strans);
  add_rows(E);

  TMat<T> R(nrows, r, zero_like(G.proto()));
  for (Eigen::Index i = 0; i < r; ++i) R(nrows - r + i, i) = make_like(1.0, G.proto());

  TMat<T> M = mul(B, transpose(B));
  double scale = 0.0;
  const Eigen::MatrixXd mv = M.values();
  for (Eigen::Index i = 0; i < M.rows; ++i) scale = std::max(scale, mv.row(i).cwiseAbs().maxCoeff());
  TMat<T> X = lu_solve_t(M, R, tol * std::max(scale, 1e-300),
                         "null transversal frame: screen not complementary");
  TMat<T> V = mul(transpose(B), X);  // dim x r

  TMat<T> C = gram_t(V, G);  // r x r, symmetric
  TMat<T> N = V;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index a = 0; a < dim; ++a) {
      T corr = zero_like(G.proto());
      for (Eigen::Index kk = 0; kk < r; ++kk) corr += C(i, kk) * E(a, kk);
      N(a, i) = N(a, i) - 0.5 * corr;
    }
  return N;
}

// ---------------------------------------------------------------------------
// Double-lane public operations (spec surface).

// G_ij = g(v_i, v_j). Throws on dimension mismatch.
Eigen::MatrixXd gram(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& metric);

// Basis of {v in span(vectors) : g(v, w) = 0 for all w in span}. Vectors must
// be linearly independent at tol. Rank decided by singular values of the Gram
// matrix and cross-checked against the elimination rank.
struct RadicalResult {
  FrameBlock block;            // radical vectors in ambient coordinates
  Eigen::MatrixXd coeffs;      // k x r combinations over the input vectors
  Eigen::Index rank = 0;       // radical rank r
  Eigen::VectorXd gram_singular_values;
};
RadicalResult radical(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& metric,
                      double tol);

FrameBlock signed_orthonormalize(const Eigen::MatrixXd& vectors,
                                 const Eigen::MatrixXd& metric, double tol);

FrameBlock null_transversal_frame(const Eigen::MatrixXd& radical_basis,
                                  const Eigen::MatrixXd& screen,
                                  const Eigen::MatrixXd& screen_transversal,
                                  const Eigen::MatrixXd& metric, double tol);

// Euclidean residual of v against span(basis), relative to |v|.
double subspace_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis);

// Euclidean residual of v against span(basis), scaled by 1 + |v| (stable when
// v itself may legitimately vanish).
double subspace_defect(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis);

// max of subspace_residual over the columns of A against span(B) and back.
double mutual_span_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace lightlike::linalg

#endif
