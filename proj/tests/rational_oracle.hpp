// Exact rational Gram-kernel oracle used to cross-check floating-point rank
// decisions. Test-only; independent of the production linear algebra path.
#ifndef LIGHTLIKE_TESTS_RATIONAL_ORACLE_HPP
#define LIGHTLIKE_TESTS_RATIONAL_ORACLE_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Rat {
  __int128 n = 0, d = 1;

  Rat() = default;
  Rat(long long v) : n(v), d(1) {}
  Rat(__int128 num, __int128 den) : n(num), d(den) { reduce(); }

  void reduce() {
    if (d == 0) throw std::runtime_error("rational: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
  }
  bool zero() const { return n == 0; }
};

inline Rat operator+(const Rat& a, const Rat& b) { return Rat(a.n * b.d + b.n * a.d, a.d * b.d); }
inline Rat operator-(const Rat& a, const Rat& b) { return Rat(a.n * b.d - b.n * a.d, a.d * b.d); }
inline Rat operator*(const Rat& a, const Rat& b) { return Rat(a.n * b.n, a.d * b.d); }
inline Rat operator/(const Rat& a, const Rat& b) {
  if (b.zero()) throw std::runtime_error("rational: division by zero");
  return Rat(a.n * b.d, a.d * b.n);
}

using RMat = std::vector<std::vector<Rat>>;

// Exact rank by Gaussian elimination.
inline int rank(RMat m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int r = 0;
  for (std::size_t c = 0; c < cols && std::size_t(r) < rows; ++c) {
    std::size_t piv = std::size_t(r);
    while (piv < rows && m[piv][c].zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[std::size_t(r)], m[piv]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == std::size_t(r) || m[i][c].zero()) continue;
      Rat f = m[i][c] / m[std::size_t(r)][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[std::size_t(r)][j];
    }
    ++r;
  }
  return r;
}

// Gram matrix of integer vectors (columns) under a +-1 diagonal metric.
inline RMat gram(const std::vector<std::vector<long long>>& cols,
                 const std::vector<int>& signs) {
  const std::size_t k = cols.size();
  RMat g(k, std::vector<Rat>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      __int128 s = 0;
      for (std::size_t a = 0; a < signs.size(); ++a)
        s += __int128(signs[a]) * cols[i][a] * cols[j][a];
      g[i][j] = Rat(s, 1);
    }
  return g;
}

}  // namespace oracle

#endif
