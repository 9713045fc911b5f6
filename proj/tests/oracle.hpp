#pragma once

// Independent reference computations in 113-bit precision. Deliberately
// naive: dense Gauss-Jordan with full pivoting, nothing shared with the
// library's SVD-based paths.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

#include "schottky/numlin.hpp"

namespace oracle {

using qreal = boost::multiprecision::cpp_bin_float_quad;

struct qc {
  qreal re = 0, im = 0;
  qc() = default;
  qc(int r) : re(r) {}
  qc(qreal r, qreal i = 0) : re(std::move(r)), im(std::move(i)) {}
  qc(const schottky::cplx& z) : re(z.real()), im(z.imag()) {}
};
inline qc operator+(const qc& a, const qc& b) { return {a.re + b.re, a.im + b.im}; }
inline qc operator-(const qc& a, const qc& b) { return {a.re - b.re, a.im - b.im}; }
inline qc operator*(const qc& a, const qc& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline qc operator/(const qc& a, const qc& b) {
  const qreal d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline qreal abs2(const qc& a) { return a.re * a.re + a.im * a.im; }

struct QMat {
  int rows = 0, cols = 0;
  std::vector<qc> a;
  QMat() = default;
  QMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}
  qc& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const qc& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
  static QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = qc(1);
    return m;
  }
};

inline QMat from(const schottky::ComplexMatrix& m) {
  QMat q(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < q.rows; ++i)
    for (int j = 0; j < q.cols; ++j) q(i, j) = qc(m(i, j));
  return q;
}

inline QMat mul(const QMat& x, const QMat& y) {
  QMat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const qc& xik = x(i, k);
      if (xik.re == 0 && xik.im == 0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) = z(i, j) + xik * y(k, j);
    }
  return z;
}

inline QMat sub(const QMat& x, const QMat& y) {
  QMat z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
  return z;
}

inline QMat inverse(QMat m) {
  const int n = m.rows;
  QMat inv = QMat::identity(n);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (abs2(m(i, c)) > abs2(m(p, c))) p = i;
    for (int j = 0; j < n; ++j) {
      std::swap(m(c, j), m(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    const qc d = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) / d;
      inv(c, j) = inv(c, j) / d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c) continue;
      const qc f = m(i, c);
      for (int j = 0; j < n; ++j) {
        m(i, j) = m(i, j) - f * m(c, j);
        inv(i, j) = inv(i, j) - f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Rank by full-pivot elimination; pivots below rel * (largest entry) count
/// as zero.
inline int rank(QMat m, double rel = 1e-24) {
  qreal big = 0;
  for (const auto& x : m.a) big = std::max(big, abs2(x));
  if (big == 0) return 0;
  const qreal cut = big * qreal(rel) * qreal(rel);
  int r = 0;
  std::vector<int> colmap(m.cols);
  for (int c = 0; c < m.cols; ++c) colmap[c] = c;
  for (; r < std::min(m.rows, m.cols); ++r) {
    int pi = -1, pj = -1;
    qreal best = cut;
    for (int i = r; i < m.rows; ++i)
      for (int j = r; j < m.cols; ++j)
        if (abs2(m(i, j)) > best) {
          best = abs2(m(i, j));
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(pi, j));
    for (int i = 0; i < m.rows; ++i) std::swap(m(i, r), m(i, pj));
    for (int i = r + 1; i < m.rows; ++i) {
      const qc f = m(i, r) / m(r, r);
      if (f.re == 0 && f.im == 0) continue;
      for (int j = r; j < m.cols; ++j) m(i, j) = m(i, j) - f * m(r, j);
    }
  }
  return r;
}

/// sl(N) basis of elementary matrices; so(S) basis S (E_ij - E_ji).
inline std::vector<QMat> ambient_basis(int N, const schottky::ComplexMatrix* form) {
  std::vector<QMat> out;
  if (!form) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j) {
          QMat e(N, N);
          e(i, j) = qc(1);
          out.push_back(e);
        }
    for (int k = 0; k + 1 < N; ++k) {
      QMat d(N, N);
      d(k, k) = qc(1);
      d(k + 1, k + 1) = qc(-1);
      out.push_back(d);
    }
    return out;
  }
  const QMat s = from(*form);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      QMat k(N, N);
      k(i, j) = qc(1);
      k(j, i) = qc(-1);
      out.push_back(mul(s, k));
    }
  return out;
}

/// dim of { xi in basis span : g xi g^{-1} = xi for all g } = d - rank(psi).
inline int fixed_dim(const std::vector<QMat>& gens, const std::vector<QMat>& basis) {
  if (basis.empty()) return 0;
  const int N = basis.front().rows;
  QMat psi(static_cast<int>(gens.size()) * N * N, static_cast<int>(basis.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const QMat gi = inverse(gens[j]);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const QMat d = sub(mul(mul(gens[j], basis[k]), gi), basis[k]);
      for (int e = 0; e < N * N; ++e) psi(static_cast<int>(j) * N * N + e, static_cast<int>(k)) = d.a[e];
    }
  }
  return static_cast<int>(basis.size()) - rank(psi);
}

inline QMat bracket(const QMat& x, const QMat& y) { return sub(mul(x, y), mul(y, x)); }

/// All right-nested brackets [g_{i1},[g_{i2},...]] up to the given depth;
/// they span the generated Lie algebra.
inline std::vector<QMat> lie_span_set(const std::vector<QMat>& gens, int depth) {
  std::vector<QMat> layer = gens, all = gens;
  for (int d = 1; d < depth; ++d) {
    std::vector<QMat> next;
    for (const auto& g : gens)
      for (const auto& x : layer) next.push_back(bracket(g, x));
    all.insert(all.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return all;
}

inline int span_dim(const std::vector<QMat>& mats, double rel) {
  const int N = mats.front().rows;
  QMat m(N * N, static_cast<int>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k)
    for (int e = 0; e < N * N; ++e) m(e, static_cast<int>(k)) = mats[k].a[e];
  return rank(m, rel);
}

inline int lie_span_dim(const std::vector<QMat>& gens, int depth, double rel = 1e-20) {
  return span_dim(lie_span_set(gens, depth), rel);
}

/// Orbit dimension at the point with basis columns V (one column for a line):
/// rank of { xi V } together with { V E_ab } (the tangent directions that
/// only move the basis), minus k^2.
inline int orbit_dim(const std::vector<QMat>& algebra_span, const QMat& v, double rel) {
  const int N = v.rows, k = v.cols;
  std::vector<QMat> cols;
  for (const auto& x : algebra_span) cols.push_back(mul(x, v));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      QMat e(k, k);
      e(a, b) = qc(1);
      cols.push_back(mul(v, e));
    }
  QMat m(N * k, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int e = 0; e < N * k; ++e) m(e, static_cast<int>(c)) = cols[c].a[e];
  return rank(m, rel) - k * k;
}

}  // namespace oracle
