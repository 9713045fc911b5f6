#pragma once

// Invariants of the quotient by a Schottky group: the Ad-fixed subalgebra,
// deformation count, Zariski-closure algebra, generic orbit codimension and
// the closed-form topology report.

#include <string>
#include <vector>

#include "schottky/schottky.hpp"

namespace schottky {

struct LieSubalgebra {
  int matrix_size = 0;
  std::vector<ComplexMatrix> basis;  // trace-orthonormal
  int dim() const { return static_cast<int>(basis.size()); }
};

/// Trace-orthonormal basis of Lie(Aut X): sl(N) for projective space, so(S)
/// for the quadric and isotropic Grassmannian models.
inline std::vector<ComplexMatrix> ambient_algebra_basis(const FlagModel& model) {
  const int N = model.ambient_dim();
  std::vector<ComplexMatrix> out;
  if (!model.has_form()) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j) {
          ComplexMatrix e = ComplexMatrix::Zero(N, N);
          e(i, j) = 1.0;
          out.push_back(e);
        }
    // traceless diagonal: (e_1 + ... + e_k - k e_{k+1}) / sqrt(k(k+1))
    for (int k = 1; k < N; ++k) {
      ComplexMatrix d = ComplexMatrix::Zero(N, N);
      for (int i = 0; i < k; ++i) d(i, i) = 1.0;
      d(k, k) = -static_cast<double>(k);
      out.push_back(d / std::sqrt(static_cast<double>(k * (k + 1))));
    }
    return out;
  }
  // so(S) = { S^{-1} K : K skew }; S is an involutive permutation here
  const ComplexMatrix s = form_matrix(model);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      ComplexMatrix k = ComplexMatrix::Zero(N, N);
      k(i, j) = 1.0;
      k(j, i) = -1.0;
      out.push_back(s * k / std::sqrt(2.0));
    }
  return out;
}

inline int ambient_algebra_dim(const FlagModel& model) {
  const int N = model.ambient_dim();
  return model.has_form() ? N * (N - 1) / 2 : N * N - 1;
}

/// Matrix of psi(xi) = (g_j xi g_j^{-1} - xi)_j in the ambient basis; one
/// column per basis element.
inline ComplexMatrix psi_matrix(const std::vector<ComplexMatrix>& gens,
                                const std::vector<ComplexMatrix>& basis) {
  if (basis.empty()) return {};
  const auto N = basis.front().rows();
  ComplexMatrix psi(static_cast<Eigen::Index>(gens.size()) * N * N, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    const ComplexMatrix ginv = gens[j].inverse();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const ComplexMatrix d = gens[j] * basis[k] * ginv - basis[k];
      psi.block(static_cast<Eigen::Index>(j) * N * N, static_cast<Eigen::Index>(k), N * N, 1) =
          Eigen::Map<const ComplexVector>(d.data(), N * N);
    }
  }
  return psi;
}

/// Kernel of psi restricted to the ambient algebra, i.e. the elements fixed
/// by Ad of every generator.
inline LieSubalgebra fixed_subalgebra(const FlagModel& model, const std::vector<ComplexMatrix>& gens,
                                      const Tolerances& tol = {}) {
  const auto basis = ambient_algebra_basis(model);
  LieSubalgebra out{model.ambient_dim(), {}};
  if (gens.empty()) {
    out.basis = basis;
    return out;
  }
  const ComplexMatrix psi = psi_matrix(gens, basis);
  Eigen::JacobiSVD<ComplexMatrix> svd(psi, Eigen::ComputeFullV);
  RealVector s = RealVector::Zero(psi.cols());
  s.head(svd.singularValues().size()) = svd.singularValues();
  const int rank = rank_from_singular_values(s, tol);
  const ComplexMatrix& v = svd.matrixV();
  for (Eigen::Index c = rank; c < v.cols(); ++c) {
    ComplexMatrix x = ComplexMatrix::Zero(out.matrix_size, out.matrix_size);
    for (std::size_t k = 0; k < basis.size(); ++k) x += v(static_cast<Eigen::Index>(k), c) * basis[k];
    out.basis.push_back(x);  // V is unitary and the basis orthonormal
  }
  return out;
}

inline LieSubalgebra fixed_subalgebra(const SchottkyGroup& g, const Tolerances& tol = {}) {
  return fixed_subalgebra(g.model, g.gens, tol);
}

/// (r - 1) dim g + dim g^Gamma.
inline long kuranishi_dimension(int r, int dim_g, int dim_fixed) {
  if (r < 1) fail(ErrorCode::InvalidArgument, "rank must be positive");
  return static_cast<long>(r - 1) * dim_g + dim_fixed;
}

/// Lie algebra of the identity component of the Zariski closure: each
/// generator spans the torus f_j exp(C xi0) f_j^{-1} since |lambda_j| != 1.
inline LieSubalgebra zariski_closure_algebra(const SchottkyGroup& g, const Tolerances& tol = {}) {
  const ComplexMatrix x = xi0(g.model);
  std::vector<ComplexMatrix> gens;
  for (int j = 0; j < g.r; ++j) gens.push_back(g.moves[j] * x * g.moves_inv[j]);
  return {g.model.ambient_dim(), lie_closure(gens, tol)};
}

struct OrbitEstimate {
  int orbit_dim = 0;
  int codim = 0;
  int samples_used = 0;
  int samples_skipped = 0;  // rank too close to the cutoff to call
};

/// Tangent vectors of the h-action at x, one column per basis element.
inline ComplexMatrix orbit_tangent_matrix(const FlagModel& model, const LieSubalgebra& h,
                                          const ModelPoint& x) {
  const int N = model.ambient_dim();
  const auto cols = x.m.cols();
  const ComplexMatrix proj = ComplexMatrix::Identity(N, N) - x.m * x.m.adjoint();
  ComplexMatrix t(N * cols, h.dim());
  for (int k = 0; k < h.dim(); ++k) {
    const ComplexMatrix v = proj * h.basis[k] * x.m;
    t.col(k) = Eigen::Map<const ComplexVector>(v.data(), N * cols);
  }
  return t;
}

/// dim X minus the largest orbit dimension seen over sampled points.
inline OrbitEstimate generic_orbit_codim(const LieSubalgebra& h, const FlagModel& model, int n_samples,
                                         std::uint64_t seed, const Tolerances& tol = {}) {
  if (n_samples < 1) fail(ErrorCode::InvalidArgument, "need at least one sample");
  const auto ranks = parallel_map<int>(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    auto rng = stream_for(seed, i, 0x6f726269ULL);
    const ModelPoint x = random_point(model, rng);
    if (h.dim() == 0) return 0;
    try {
      return rank_with_tol(orbit_tangent_matrix(model, h, x), tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankAmbiguous) throw;
      return -1;
    }
  });
  OrbitEstimate est;
  for (int r : ranks) {
    if (r < 0) {
      ++est.samples_skipped;
      continue;
    }
    ++est.samples_used;
    est.orbit_dim = std::max(est.orbit_dim, r);
  }
  if (est.samples_used == 0) fail(ErrorCode::RankAmbiguous, "every orbit sample had an ambiguous rank");
  est.codim = model.complex_dimension() - est.orbit_dim;
  return est;
}

// ---- topology report ----------------------------------------------------------

inline const char* kOutsideHypotheses = "outside cohomology-extension hypotheses";
inline const char* kLowCodim = "not computed (codim < 2)";

/// Models for which cohomology of the quotient extends from the domain:
/// P_{2n+1} with n >= 3, Q_{4k+2} with k >= 2, Q_{2k+1} with k >= 3 and the
/// isotropic Grassmannians Z_n with n >= 4.
inline bool cohomology_extension_applies(const FlagModel& m) {
  switch (m.variant) {
    case Variant::ProjOdd: return m.n >= 3;
    case Variant::QuadricEven: {
      const int d = m.complex_dimension();
      return d % 4 == 2 && (d - 2) / 4 >= 2;
    }
    case Variant::QuadricOdd: return (m.complex_dimension() - 1) / 2 >= 3;
    case Variant::IGr: return m.n >= 4;
  }
  return false;
}

struct InvariantReport {
  int r = 0;
  std::string model;
  int dim_x = 0;
  int core_codim = 0;
  int dim_g = 0;
  int dim_g_fixed = 0;
  long kuranishi_dim = 0;
  int zariski_dim = 0;
  OrbitEstimate orbit;
  int algebraic_dim_estimate = 0;
  bool cohomology_applies = false;
  bool codim_at_least_two = false;
};

inline InvariantReport topology_report(const SchottkyGroup& g, int orbit_samples = 24,
                                       const Tolerances& tol = {}) {
  InvariantReport rep;
  rep.r = g.r;
  rep.model = g.model.label();
  rep.dim_x = g.model.complex_dimension();
  rep.core_codim = g.model.core_codim();
  rep.dim_g = ambient_algebra_dim(g.model);
  rep.dim_g_fixed = fixed_subalgebra(g, tol).dim();
  rep.kuranishi_dim = kuranishi_dimension(g.r, rep.dim_g, rep.dim_g_fixed);
  const auto h = zariski_closure_algebra(g, tol);
  rep.zariski_dim = h.dim();
  rep.orbit = generic_orbit_codim(h, g.model, orbit_samples, g.seed, tol);
  rep.algebraic_dim_estimate = rep.orbit.codim;
  rep.cohomology_applies = cohomology_extension_applies(g.model);
  rep.codim_at_least_two = rep.core_codim >= 2;
  return rep;
}

inline nlohmann::json to_json(const InvariantReport& rep) {
  using nlohmann::json;
  const bool coh = rep.cohomology_applies;
  json j = {
      {"r", rep.r},
      {"model", rep.model},
      {"dim_X", rep.dim_x},
      {"core_codim", rep.core_codim},
      {"dim_g", rep.dim_g},
      {"dim_g_fixed", rep.dim_g_fixed},
      {"kuranishi_dim", rep.kuranishi_dim},
      {"kuranishi_status", coh ? "smooth Kuranishi space of this dimension"
                               : std::string(kOutsideHypotheses) + "; dimension count only"},
      {"zariski_dim", rep.zariski_dim},
      {"zariski_scope", "Lie algebra of the identity component"},
      {"generic_orbit_dim", rep.orbit.orbit_dim},
      {"algebraic_dim_estimate", rep.algebraic_dim_estimate},
      {"orbit_samples", rep.orbit.samples_used},
      {"orbit_samples_skipped", rep.orbit.samples_skipped},
      {"picard", coh ? json{{"torus_rank", rep.r}, {"free_rank", 1}} : json(kOutsideHypotheses)},
      {"h1_O_rank", coh ? json(rep.r) : json(kOutsideHypotheses)},
      {"h2_rank", coh ? json(1) : json(kOutsideHypotheses)},
      {"pi1", rep.codim_at_least_two ? json("free of rank " + std::to_string(rep.r)) : json(kLowCodim)},
      {"kodaira", "-infinity"},
      {"kaehler", rep.codim_at_least_two ? json(false) : json(kLowCodim)},
      {"rationally_connected", true},
      {"provenance",
       {{"computed", {"dim_g_fixed", "kuranishi_dim", "zariski_dim", "generic_orbit_dim"}},
        {"closed_form", {"picard", "h1_O_rank", "h2_rank", "pi1", "kodaira", "kaehler", "rationally_connected"}},
        {"note", "closed-form fields are quoted results about the quotient; they are not computed here"}}},
  };
  return j;
}

// ---- invariant rational maps ----------------------------------------------------

enum class InvariantMap {
  Minors,           // all 2x2 minors of a 2 x (n+1) matrix (projective model)
  QuadricPairings,  // b(z_i, z_j), i <= j, for a 4 x m matrix (even quadric)
  RightCommutation  // word matrices commute with right multiplications
};

// Sine of the angle between the lines, via the projection residual; the
// sqrt(1 - cos^2) form loses half the digits near zero.
inline double projective_distance(const ComplexVector& a, const ComplexVector& b) {
  const ComplexVector ua = a / a.norm(), ub = b / b.norm();
  return (ua - ub.dot(ua) * ub).norm();
}

namespace detail {

inline ComplexMatrix as_matrix(const ComplexVector& v, int rows) {
  const auto cols = v.size() / rows;
  ComplexMatrix z(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) z(i, c) = v[i * cols + c];
  return z;
}

inline ComplexVector map_value(InvariantMap kind, const FlagModel& model, const ComplexVector& x) {
  if (kind == InvariantMap::Minors) {
    const ComplexMatrix z = as_matrix(x, 2);
    std::vector<cplx> out;
    for (Eigen::Index a = 0; a < z.cols(); ++a)
      for (Eigen::Index b = a + 1; b < z.cols(); ++b) out.push_back(z(0, a) * z(1, b) - z(0, b) * z(1, a));
    return Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(out.size()));
  }
  const ComplexMatrix z = as_matrix(x, 4);
  const ComplexMatrix s4 = form_matrix(make_model(Variant::QuadricEven, 2));
  const ComplexMatrix b = z.transpose() * s4 * z;
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = i; j < b.cols(); ++j) out.push_back(b(i, j));
  (void)model;
  return Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

inline Word random_word(int r, int max_len, std::mt19937_64& rng) {
  const int len = std::uniform_int_distribution<int>(1, max_len)(rng);
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter l{std::uniform_int_distribution<int>(0, r - 1)(rng),
                   std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1};
    if (!w.empty() && cancels(w.back(), l)) continue;
    w.push_back(l);
  }
  return w;
}

}  // namespace detail

struct InvarianceResult {
  double max_residual = 0;
  double max_line_residual = 0;  // x0 + x2 on the pairing image (m = 2 only)
  int samples = 0;
};

/// Max over sampled x and sampled words (length <= 3) of the projective
/// distance between map(gamma x) and map(x); for RightCommutation the
/// relative commutator with random right multiplications.
inline InvarianceResult verify_rational_invariance(const SchottkyGroup& g, InvariantMap kind, int n_samples,
                                                   std::uint64_t seed) {
  const FlagModel& M = g.model;
  if (kind == InvariantMap::Minors || kind == InvariantMap::RightCommutation) {
    if (M.variant != Variant::ProjOdd) fail(ErrorCode::InvalidArgument, "map needs a ProjOdd model");
  } else if (M.variant != Variant::QuadricEven || M.n % 2 != 0) {
    fail(ErrorCode::InvalidArgument, "pairing map needs QuadricEven with n even");
  }
  InvarianceResult res;
  res.samples = n_samples;
  if (g.r == 0 || n_samples <= 0) return res;
  const auto out = parallel_map<std::pair<double, double>>(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    auto rng = stream_for(seed, i, 0x696e7661ULL);
    const ComplexMatrix gw = word_matrix(g, detail::random_word(g.r, 3, rng));
    if (kind == InvariantMap::RightCommutation) {
      const int m = M.n + 1;
      ComplexMatrix b(m, m);
      std::normal_distribution<double> nd;
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) b(a, c) = cplx(nd(rng), nd(rng));
      // Z -> Z B on row-major vec(Z) is I_2 (x) B^T
      ComplexMatrix right = ComplexMatrix::Zero(2 * m, 2 * m);
      right.topLeftCorner(m, m) = b.transpose();
      right.bottomRightCorner(m, m) = b.transpose();
      const double rel = (gw * right - right * gw).norm() / (gw.norm() * right.norm());
      return std::make_pair(rel, 0.0);
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
      const ModelPoint x = random_point(M, rng);
      const ComplexVector a = detail::map_value(kind, M, x.m.col(0));
      const ComplexVector b = detail::map_value(kind, M, apply(M, gw, x).m.col(0));
      if (a.norm() < 1e-12 || b.norm() < 1e-12) continue;  // indeterminacy locus
      double line = 0;
      if (kind == InvariantMap::QuadricPairings && a.size() == 3) line = std::abs(a[0] + a[2]) / a.norm();
      return std::make_pair(projective_distance(a, b), line);
    }
    fail(ErrorCode::MapUndefined, "samples keep hitting the indeterminacy locus");
  });
  for (const auto& [a, b] : out) {
    res.max_residual = std::max(res.max_residual, a);
    res.max_line_residual = std::max(res.max_line_residual, b);
  }
  return res;
}

}  // namespace schottky
