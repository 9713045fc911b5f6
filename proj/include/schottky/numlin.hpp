#pragma once

// Dense complex linear algebra with a fixed tolerance policy.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "schottky/errors.hpp"

namespace schottky {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct Tolerances {
  double rank_rel = 1e-9;
  double orth = 1e-10;
  double cert_margin = 1e-3;

  void validate() const {
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(rank_rel >= eps && rank_rel < 1 && orth >= eps && cert_margin >= eps))
      fail(ErrorCode::InvalidArgument, "tolerances must lie between machine epsilon and 1");
  }
};

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag()))
      return false;
  return true;
}

/// Singular-value rank. Throws when a singular value sits within a factor of
/// ten of the cutoff, since either answer would be a guess.
inline int rank_from_singular_values(const RealVector& s, const Tolerances& tol) {
  if (s.size() == 0) return 0;
  const double smax = s.maxCoeff();
  if (smax == 0.0) return 0;
  const double cut = tol.rank_rel * smax;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cut / 10 && s[i] < cut * 10) {
      std::ostringstream os;
      os << "singular value " << s[i] << " too close to cutoff " << cut;
      fail(ErrorCode::RankAmbiguous, os.str());
    }
    if (s[i] > cut) ++r;
  }
  return r;
}

inline int rank_with_tol(const ComplexMatrix& m, const Tolerances& tol = {}) {
  if (!all_finite(m)) fail(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), tol);
}

/// Orthonormal column basis of a subspace of C^ambient.
struct SubspaceBasis {
  ComplexMatrix basis;

  Eigen::Index ambient_dim() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }
};

/// Orthonormal basis of the column span of m.
inline SubspaceBasis span_of(const ComplexMatrix& m, const Tolerances& tol = {}) {
  if (m.cols() == 0) return {ComplexMatrix(m.rows(), 0)};
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
  const int r = rank_from_singular_values(svd.singularValues(), tol);
  return {svd.matrixU().leftCols(r)};
}

inline double orthonormality_residual(const SubspaceBasis& b) {
  const auto k = b.dim();
  return (b.basis.adjoint() * b.basis - ComplexMatrix::Identity(k, k)).norm();
}

inline int intersect_dim(const SubspaceBasis& a, const SubspaceBasis& b,
                         const Tolerances& tol = {}) {
  if (a.ambient_dim() != b.ambient_dim())
    fail(ErrorCode::InvalidArgument, "intersect_dim: ambient dimensions differ");
  if (a.dim() == 0 || b.dim() == 0) return 0;
  ComplexMatrix stacked(a.ambient_dim(), a.dim() + b.dim());
  stacked << a.basis, b.basis;
  return static_cast<int>(a.dim() + b.dim()) - rank_with_tol(stacked, tol);
}

// Trace pairing <X,Y> = tr(X^H Y).
inline cplx trace_pairing(const ComplexMatrix& x, const ComplexMatrix& y) {
  return (x.adjoint() * y).trace();
}

inline ComplexMatrix bracket(const ComplexMatrix& x, const ComplexMatrix& y) {
  return x * y - y * x;
}

namespace detail {

// Two passes of Gram-Schmidt against an orthonormal basis. Returns the
// residual norm divided by scale, leaving the remainder in x.
inline double orthogonalize_against(const std::vector<ComplexMatrix>& basis, ComplexMatrix& x, double scale) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) x -= trace_pairing(b, x) * b;
  return x.norm() / scale;
}

// Adds x to the basis if it is independent. The residual is measured against
// scale rather than |x|, so a bracket that is small only through
// cancellation does not get its round-off promoted to a new direction.
// Throws on a borderline residual.
inline bool try_extend(std::vector<ComplexMatrix>& basis, ComplexMatrix x, const Tolerances& tol, double scale) {
  if (scale <= 0.0) return false;
  const double res = orthogonalize_against(basis, x, scale);
  const double cut = tol.rank_rel;
  if (res > cut / 10 && res < cut * 10) {
    std::ostringstream os;
    os << "lie_closure: residual " << res << " too close to cutoff " << cut;
    fail(ErrorCode::RankAmbiguous, os.str());
  }
  if (res <= cut) return false;
  basis.push_back(x / x.norm());
  return true;
}

}  // namespace detail

/// Smallest bracket-closed subspace containing the generators, as a
/// trace-orthonormal basis.
inline std::vector<ComplexMatrix> lie_closure(const std::vector<ComplexMatrix>& gens,
                                              const Tolerances& tol = {}) {
  std::vector<ComplexMatrix> basis;
  if (gens.empty()) return basis;
  const auto n = gens.front().rows();
  for (const auto& g : gens)
    if (g.rows() != n || g.cols() != n)
      fail(ErrorCode::InvalidArgument, "lie_closure: generators must be square of equal size");
  const std::size_t cap = static_cast<std::size_t>(n * n);
  for (const auto& g : gens) detail::try_extend(basis, g, tol, g.norm());
  // basis[i] has been bracketed against basis[0..i) once processed
  std::size_t done = 0;
  while (done < basis.size() && basis.size() < cap) {
    const std::size_t i = done;
    for (std::size_t j = 0; j < i && basis.size() < cap; ++j)
      detail::try_extend(basis, bracket(basis[i], basis[j]), tol, 1.0);
    ++done;
  }
  return basis;
}

/// Residual of the projection of x onto span(basis), relative to |x|.
inline double span_residual(const std::vector<ComplexMatrix>& basis, const ComplexMatrix& x) {
  ComplexMatrix y = x;
  const double n0 = y.norm();
  if (n0 == 0.0) return 0.0;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) y -= trace_pairing(b, y) * b;
  return y.norm() / n0;
}

/// Principal logarithm of a diagonalizable matrix.
inline ComplexMatrix matrix_log_semisimple(const ComplexMatrix& g, const Tolerances& tol = {}) {
  if (g.rows() != g.cols()) fail(ErrorCode::InvalidArgument, "matrix_log: not square");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(g);
  if (es.info() != Eigen::Success) fail(ErrorCode::NotDiagonalizable, "eigensolver failed");
  ComplexMatrix v = es.eigenvectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin == 0.0 || s[0] / smin > 1.0 / tol.rank_rel)
    fail(ErrorCode::NotDiagonalizable, "eigenvector matrix is ill-conditioned");
  const ComplexVector ev = es.eigenvalues();
  ComplexVector lg(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const cplx l = ev[i];
    if (std::abs(l) == 0.0) fail(ErrorCode::BranchCut, "zero eigenvalue");
    if (l.real() < 0 && std::abs(l.imag()) < 1e-6 * std::abs(l))
      fail(ErrorCode::BranchCut, "eigenvalue on the negative real axis");
    lg[i] = std::log(l);
  }
  return v * lg.asDiagonal() * v.inverse();
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const ComplexMatrix& m) {
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (r <= 0 || c <= 0 || re.size() != static_cast<std::size_t>(r * c) || im.size() != re.size())
      fail(ErrorCode::InvalidArgument, "matrix JSON has inconsistent shape");
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = {re[i * c + k], im[i * c + k]};
    if (!all_finite(m)) fail(ErrorCode::InvalidArgument, "matrix JSON has non-finite entries");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed matrix JSON: ") + e.what());
  }
}

}  // namespace schottky
