#ifndef LIGHTLIKE_DUAL_HPP
#define LIGHTLIKE_DUAL_HPP

#include <Eigen/Dense>
#include <cmath>

namespace lightlike {

// First-order forward-mode number: value plus gradient with respect to a
// fixed set of seed variables. Gradient length is dynamic (set at seeding).
struct Dual {
  double v = 0.0;
  Eigen::VectorXd g;

  Dual() = default;
  Dual(double value, Eigen::Index n) : v(value), g(Eigen::VectorXd::Zero(n)) {}
  Dual(double value, Eigen::VectorXd grad) : v(value), g(std::move(grad)) {}

  static Dual seed(double value, Eigen::Index n, Eigen::Index k) {
    Dual d(value, n);
    d.g[k] = 1.0;
    return d;
  }
  static Dual constant(double value, Eigen::Index n) { return Dual(value, n); }

  Eigen::Index vars() const { return g.size(); }
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.g + b.g}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.g - b.g}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.g}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g};
}
inline Dual operator*(double s, const Dual& a) { return {s * a.v, s * a.g}; }
inline Dual operator*(const Dual& a, double s) { return s * a; }
inline Dual operator/(const Dual& a, const Dual& b) {
  const double q = a.v / b.v;
  return {q, (a.g - q * b.g) / b.v};
}
inline Dual operator/(const Dual& a, double s) { return {a.v / s, a.g / s}; }
inline Dual& operator+=(Dual& a, const Dual& b) { a.v += b.v; a.g += b.g; return a; }
inline Dual& operator-=(Dual& a, const Dual& b) { a.v -= b.v; a.g -= b.g; return a; }

inline Dual sqrt(const Dual& a) {
  const double r = std::sqrt(a.v);
  return {r, a.g / (2.0 * r)};
}
inline Dual sin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.g}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.g}; }
inline Dual sinh(const Dual& a) { return {std::sinh(a.v), std::cosh(a.v) * a.g}; }
inline Dual cosh(const Dual& a) { return {std::cosh(a.v), std::sinh(a.v) * a.g}; }

// Second-order jet: value, gradient and (symmetric) Hessian with respect to
// the seed variables. The currency of every derivative the frame formulas
// need; exact up to floating rounding.
struct Jet2 {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  Jet2() = default;
  Jet2(double value, Eigen::Index n)
      : v(value), g(Eigen::VectorXd::Zero(n)), h(Eigen::MatrixXd::Zero(n, n)) {}
  Jet2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static Jet2 seed(double value, Eigen::Index n, Eigen::Index k) {
    Jet2 j(value, n);
    j.g[k] = 1.0;
    return j;
  }
  static Jet2 constant(double value, Eigen::Index n) { return Jet2(value, n); }

  Eigen::Index vars() const { return g.size(); }
  Dual dual() const { return {v, g}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.g, -a.h}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g,
          a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
}
inline Jet2 operator*(double s, const Jet2& a) { return {s * a.v, s * a.g, s * a.h}; }
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  // From a = q*b differentiated twice.
  const double q = a.v / b.v;
  Eigen::VectorXd qg = (a.g - q * b.g) / b.v;
  Eigen::MatrixXd qh =
      (a.h - q * b.h - qg * b.g.transpose() - b.g * qg.transpose()) / b.v;
  return {q, std::move(qg), std::move(qh)};
}
inline Jet2& operator+=(Jet2& a, const Jet2& b) { a.v += b.v; a.g += b.g; a.h += b.h; return a; }

// f(u) by the chain rule given f, f', f'' at u.v.
inline Jet2 jet_chain(double f, double df, double ddf, const Jet2& u) {
  return {f, df * u.g, df * u.h + ddf * u.g * u.g.transpose()};
}
inline Dual jet_chain(double f, double df, const Dual& u) { return {f, df * u.g}; }

inline Jet2 sqrt(const Jet2& a) {
  const double r = std::sqrt(a.v);
  return jet_chain(r, 0.5 / r, -0.25 / (a.v * r), a);
}
inline Jet2 sin(const Jet2& a) { return jet_chain(std::sin(a.v), std::cos(a.v), -std::sin(a.v), a); }
inline Jet2 cos(const Jet2& a) { return jet_chain(std::cos(a.v), -std::sin(a.v), -std::cos(a.v), a); }
inline Jet2 sinh(const Jet2& a) { return jet_chain(std::sinh(a.v), std::cosh(a.v), std::sinh(a.v), a); }
inline Jet2 cosh(const Jet2& a) { return jet_chain(std::cosh(a.v), std::sinh(a.v), std::cosh(a.v), a); }

}  // namespace lightlike

#endif
