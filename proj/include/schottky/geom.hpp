#pragma once

// Matrix models of the four target manifolds:
//   ProjOdd(n)      P_{2n+1} in C^{2n+2}, coordinates [z:w]
//   QuadricEven(n)  Q_{2n-2} in P_{2n-1}, form z.w + w.z
//   QuadricOdd(n)   Q_{2n-1} in P_{2n},   form u^2 + 2 z.w
//   IGr(n)          one component of the maximal isotropic (n+1)-planes in
//                   C^{2n+2} with form u1^2 + u2^2 + 2 z.w
// Points and automorphisms live in these coordinates. The unitary frame change
// A (with A^T A = S) is only used inside the twistor map and to build real
// orthogonal moves.

#include <cmath>
#include <random>
#include <string>

#include "schottky/numlin.hpp"

namespace schottky {

enum class Variant { ProjOdd, QuadricEven, QuadricOdd, IGr };

struct FlagModel {
  Variant variant = Variant::ProjOdd;
  int n = 1;

  int ambient_dim() const {
    switch (variant) {
      case Variant::ProjOdd: return 2 * n + 2;
      case Variant::QuadricEven: return 2 * n;
      case Variant::QuadricOdd: return 2 * n + 1;
      case Variant::IGr: return 2 * n + 2;
    }
    return 0;
  }

  int complex_dimension() const {
    switch (variant) {
      case Variant::ProjOdd: return 2 * n + 1;
      case Variant::QuadricEven: return 2 * n - 2;
      case Variant::QuadricOdd: return 2 * n - 1;
      case Variant::IGr: return n * (n + 1) / 2;
    }
    return 0;
  }

  // codimension of each core of the standard pair
  int core_codim() const {
    switch (variant) {
      case Variant::ProjOdd: return n + 1;
      case Variant::QuadricEven: return n - 1;
      case Variant::QuadricOdd: return n;
      case Variant::IGr: return n;
    }
    return 0;
  }

  bool has_form() const { return variant != Variant::ProjOdd; }
  bool subspace_points() const { return variant == Variant::IGr; }
  // columns of a point matrix
  int point_cols() const { return subspace_points() ? n + 1 : 1; }

  // offset of the z block and size of the z and w blocks
  int z_offset() const {
    switch (variant) {
      case Variant::QuadricOdd: return 1;
      case Variant::IGr: return 2;
      default: return 0;
    }
  }
  int block() const { return variant == Variant::ProjOdd ? n + 1 : n; }

  std::string label() const;
};

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::ProjOdd: return "ProjOdd";
    case Variant::QuadricEven: return "QuadricEven";
    case Variant::QuadricOdd: return "QuadricOdd";
    case Variant::IGr: return "IsotropicGrass";
  }
  return "?";
}

inline std::string FlagModel::label() const {
  switch (variant) {
    case Variant::ProjOdd: return "P_" + std::to_string(2 * n + 1);
    case Variant::QuadricEven: return "Q_" + std::to_string(2 * n - 2);
    case Variant::QuadricOdd: return "Q_" + std::to_string(2 * n - 1);
    case Variant::IGr: return "IGr_" + std::to_string(n) + "(C^" + std::to_string(2 * n + 1) + ")";
  }
  return "?";
}

inline FlagModel make_model(Variant v, int n) {
  const int lo = (v == Variant::ProjOdd) ? 0 : (v == Variant::QuadricEven ? 2 : 1);
  if (n < lo) fail(ErrorCode::InvalidArgument, variant_name(v) + ": n too small");
  if (n > 64) fail(ErrorCode::InvalidArgument, variant_name(v) + ": n too large");
  return {v, n};
}

/// Parses "P:n", "Qeven:n", "Qodd:n" or "IGr:n".
inline FlagModel parse_model(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) fail(ErrorCode::InvalidArgument, "model must look like P:n");
  const std::string head = s.substr(0, colon);
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "bad model parameter in '" + s + "'");
  }
  if (head == "P") return make_model(Variant::ProjOdd, n);
  if (head == "Qeven") return make_model(Variant::QuadricEven, n);
  if (head == "Qodd") return make_model(Variant::QuadricOdd, n);
  if (head == "IGr") return make_model(Variant::IGr, n);
  fail(ErrorCode::InvalidArgument, "unknown model '" + head + "'");
}

inline nlohmann::json to_json(const FlagModel& m) {
  return {{"variant", variant_name(m.variant)}, {"n", m.n}, {"label", m.label()},
          {"ambient_dim", m.ambient_dim()}, {"complex_dimension", m.complex_dimension()}};
}

inline FlagModel model_from_json(const nlohmann::json& j) {
  try {
    const auto v = j.at("variant").get<std::string>();
    const int n = j.at("n").get<int>();
    if (v == "ProjOdd") return make_model(Variant::ProjOdd, n);
    if (v == "QuadricEven") return make_model(Variant::QuadricEven, n);
    if (v == "QuadricOdd") return make_model(Variant::QuadricOdd, n);
    if (v == "IsotropicGrass") return make_model(Variant::IGr, n);
    fail(ErrorCode::InvalidArgument, "unknown variant " + v);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed model JSON: ") + e.what());
  }
}

/// Symmetric form S in model coordinates (identity-sized zero for ProjOdd).
inline ComplexMatrix form_matrix(const FlagModel& m) {
  const int N = m.ambient_dim();
  ComplexMatrix s = ComplexMatrix::Zero(N, N);
  if (!m.has_form()) return s;
  const int o = m.z_offset(), k = m.block();
  for (int i = 0; i < o; ++i) s(i, i) = 1.0;
  for (int i = 0; i < k; ++i) {
    s(o + i, o + k + i) = 1.0;
    s(o + k + i, o + i) = 1.0;
  }
  return s;
}

/// Unitary A with A^T A = S: identity on the u block and
/// (z, w) -> ((z + w)/sqrt2, i(z - w)/sqrt2).
inline ComplexMatrix frame_matrix(const FlagModel& m) {
  const int N = m.ambient_dim();
  if (!m.has_form()) return ComplexMatrix::Identity(N, N);
  ComplexMatrix a = ComplexMatrix::Zero(N, N);
  const int o = m.z_offset(), k = m.block();
  const double r = 1.0 / std::sqrt(2.0);
  const cplx I(0, 1);
  for (int i = 0; i < o; ++i) a(i, i) = 1.0;
  for (int i = 0; i < k; ++i) {
    a(o + i, o + i) = r;
    a(o + i, o + k + i) = r;
    a(o + k + i, o + i) = I * r;
    a(o + k + i, o + k + i) = -I * r;
  }
  return a;
}

// ---- points -----------------------------------------------------------------

/// Column vector (vector models) or orthonormal n+1 columns (IGr).
struct ModelPoint {
  ComplexMatrix m;
};

/// Unit norm, first nonzero coordinate real positive.
inline ComplexVector canonical_vector(ComplexVector v) {
  const double nv = v.norm();
  if (!(nv > 0)) fail(ErrorCode::InvalidArgument, "zero homogeneous vector");
  v /= nv;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      break;
    }
  return v;
}

inline ComplexMatrix orthonormal_columns(const ComplexMatrix& b) {
  Eigen::HouseholderQR<ComplexMatrix> qr(b);
  return qr.householderQ() * ComplexMatrix::Identity(b.rows(), b.cols());
}

inline ModelPoint normalize_point(const FlagModel& model, const ComplexMatrix& x) {
  if (model.subspace_points()) return {orthonormal_columns(x)};
  return {canonical_vector(x.col(0))};
}

inline ModelPoint apply(const FlagModel& model, const ComplexMatrix& g, const ModelPoint& x) {
  return normalize_point(model, g * x.m);
}

/// Residual of the defining equations (and orthonormality for subspaces).
inline double membership_residual(const FlagModel& model, const ModelPoint& x) {
  if (!model.has_form()) return std::abs(x.m.norm() - 1.0);
  const ComplexMatrix s = form_matrix(model);
  double r = (x.m.transpose() * s * x.m).norm();
  if (model.subspace_points())
    r = std::max(r, orthonormality_residual({x.m}));
  return r;
}

// ---- phi and the torus action ------------------------------------------------

/// Twistor map of an isotropic (n+1)-plane: J e1 restricted to e1-perp, where
/// J = -i(2P - I) in the frame where the form is the identity.
inline RealVector twistor_project(const FlagModel& model, const ModelPoint& v) {
  if (!model.subspace_points()) fail(ErrorCode::InvalidArgument, "twistor map needs an IGr model");
  const ComplexMatrix q = orthonormal_columns(frame_matrix(model) * v.m);
  const int N = model.ambient_dim();
  ComplexVector je1 = cplx(0, -2) * (q * q.adjoint().col(0));
  je1[0] += cplx(0, 1);
  double imag = 0;
  RealVector out(N - 1);
  for (int i = 1; i < N; ++i) {
    imag = std::max(imag, std::abs(je1[i].imag()));
    out[i - 1] = je1[i].real();
  }
  imag = std::max(imag, std::abs(je1[0]));  // J is skew
  if (imag > 1e-8) fail(ErrorCode::RealityViolated, "J_V is not real; subspace is not isotropic");
  return out;
}

/// phi in [0,1], zero on C0 and one on C1. For IGr this is the stereographic
/// exhaustion ||s||^2/(1+||s||^2) pulled back along the twistor map, which in
/// closed form is (1 - <pi(V), p>)/2.
inline double phi(const FlagModel& model, const ModelPoint& x) {
  if (model.subspace_points()) {
    const RealVector t = twistor_project(model, x);
    return std::clamp((1.0 - t[0]) / 2.0, 0.0, 1.0);
  }
  const int o = model.z_offset(), k = model.block();
  const double z = x.m.col(0).segment(o, k).squaredNorm();
  const double w = x.m.col(0).segment(o + k, k).squaredNorm();
  if (!(z + w > 0)) fail(ErrorCode::MapUndefined, "phi undefined: z and w both vanish");
  return w / (z + w);
}

/// Level of phi after applying g_lambda with |lambda| = t.
inline double phi_flow(double phi0, double t) {
  const double t2 = t * t;
  return t2 * phi0 / (1.0 + (t2 - 1.0) * phi0);
}

/// Generator of the torus action in model coordinates.
inline ComplexMatrix xi0(const FlagModel& model) {
  const int N = model.ambient_dim();
  ComplexMatrix x = ComplexMatrix::Zero(N, N);
  if (model.variant == Variant::IGr) {
    ComplexMatrix b = ComplexMatrix::Zero(N, N);
    b(0, 1) = cplx(0, 1);
    b(1, 0) = cplx(0, -1);
    const ComplexMatrix a = frame_matrix(model);
    return a.adjoint() * b * a;
  }
  const int o = model.z_offset(), k = model.block();
  for (int i = 0; i < k; ++i) {
    x(o + i, o + i) = -0.5;
    x(o + k + i, o + k + i) = 0.5;
  }
  return x;
}

/// exp(log(lambda) xi0), principal branch. |det| = 1 in every model, and
/// |lambda| = t moves phi by the t-law of phi_flow.
inline ComplexMatrix g_lambda(const FlagModel& model, cplx lambda) {
  if (lambda == cplx(0)) fail(ErrorCode::InvalidArgument, "lambda must be nonzero");
  const int N = model.ambient_dim();
  if (model.variant == Variant::IGr) {
    const cplx c = (lambda + 1.0 / lambda) / 2.0, s = (lambda - 1.0 / lambda) / 2.0;
    ComplexMatrix b = ComplexMatrix::Identity(N, N);
    b(0, 0) = c;
    b(1, 1) = c;
    b(0, 1) = cplx(0, 1) * s;
    b(1, 0) = cplx(0, -1) * s;
    const ComplexMatrix a = frame_matrix(model);
    return a.adjoint() * b * a;
  }
  const cplx h = std::sqrt(lambda);
  const int o = model.z_offset(), k = model.block();
  ComplexMatrix g = ComplexMatrix::Identity(N, N);
  for (int i = 0; i < k; ++i) {
    g(o + i, o + i) = 1.0 / h;
    g(o + k + i, o + k + i) = h;
  }
  return g;
}

/// ||a/s(a) - b/s(b)|| / ||b||, with s chosen to best align a to b: zero iff
/// the matrices agree up to a nonzero scalar.
inline double projective_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  const cplx num = trace_pairing(a, b), den = trace_pairing(a, a);
  if (std::abs(den) == 0.0) return b.norm() == 0.0 ? 0.0 : 1.0;
  return (a * (num / den) - b).norm() / b.norm();
}

// ---- cores ------------------------------------------------------------------

/// The standard pair. For vector models the cores are linear subspaces of the
/// ambient space. For IGr a core is the fiber of the twistor map over an
/// anchor a, i.e. all V containing the isotropic line e1 + i a (identity-form
/// frame); we return that line in model coordinates.
struct CorePair {
  SubspaceBasis c0, c1;
};

inline CorePair schottky_pair_core(const FlagModel& model) {
  const int N = model.ambient_dim();
  if (model.variant == Variant::IGr) {
    const ComplexMatrix a = frame_matrix(model);
    ComplexVector l0 = ComplexVector::Zero(N), l1 = ComplexVector::Zero(N);
    const double r = 1.0 / std::sqrt(2.0);
    l0[0] = r;
    l0[1] = cplx(0, r);
    l1[0] = r;
    l1[1] = cplx(0, -r);
    return {{a.adjoint() * l0}, {a.adjoint() * l1}};
  }
  const int o = model.z_offset(), k = model.block();
  ComplexMatrix b0 = ComplexMatrix::Zero(N, k), b1 = ComplexMatrix::Zero(N, k);
  for (int i = 0; i < k; ++i) {
    b0(o + i, i) = 1.0;
    b1(o + k + i, i) = 1.0;
  }
  return {{b0}, {b1}};
}

/// Whether two cores (given as returned by schottky_pair_core, possibly moved
/// by automorphisms) are disjoint.
inline bool cores_disjoint(const FlagModel& model, const SubspaceBasis& a, const SubspaceBasis& b,
                           const Tolerances& tol = {}) {
  if (model.variant == Variant::IGr) {
    // fibers over anchors a, a' meet iff l^T S l' = 0
    const cplx pairing = (a.basis.transpose() * form_matrix(model) * b.basis)(0, 0);
    return std::abs(pairing) > tol.rank_rel * 10;
  }
  return intersect_dim(a, b, tol) == 0;
}

/// Smallest singular value of [a | b], a scale-free measure of how far apart
/// two cores are (zero when they meet). For IGr this is |l^T S l'|.
inline double core_separation(const FlagModel& model, const SubspaceBasis& a, const SubspaceBasis& b) {
  if (model.variant == Variant::IGr)
    return std::abs((a.basis.transpose() * form_matrix(model) * b.basis)(0, 0));
  ComplexMatrix st(a.ambient_dim(), a.dim() + b.dim());
  st << a.basis, b.basis;
  Eigen::JacobiSVD<ComplexMatrix> svd(st);
  const auto& s = svd.singularValues();
  return s[s.size() - 1];
}

/// Reference point V0 = {(u, iu, z, 0)} for IGr.
inline ModelPoint igr_reference(const FlagModel& model) {
  const int N = model.ambient_dim(), n = model.n;
  ComplexMatrix v = ComplexMatrix::Zero(N, n + 1);
  v(0, 0) = 1.0 / std::sqrt(2.0);
  v(1, 0) = cplx(0, 1.0 / std::sqrt(2.0));
  for (int k = 0; k < n; ++k) v(2 + k, k + 1) = 1.0;
  return {v};
}

/// Same component iff dim(V cap ref) = dim V mod 2.
inline bool component_parity_same(const SubspaceBasis& v, const SubspaceBasis& ref,
                                  const Tolerances& tol = {}) {
  const int d = intersect_dim(v, ref, tol);
  return (d % 2) == (static_cast<int>(v.dim()) % 2);
}

/// [u:z:w] on Q_{2n-1} to [z:w] on P_{2n-1}.
inline ModelPoint double_cover_project(const FlagModel& model, const ModelPoint& x) {
  if (model.variant != Variant::QuadricOdd)
    fail(ErrorCode::InvalidArgument, "double cover needs a QuadricOdd model");
  const ComplexVector zw = x.m.col(0).tail(2 * model.n);
  if (!(zw.norm() > 1e-12)) fail(ErrorCode::MapUndefined, "point has z = w = 0");
  return {canonical_vector(zw)};
}

/// Automorphism of IGr from g in SO(1, 2n+1) (Minkowski form diag(-1, 1, ...)):
/// conjugate by diag(i, 1, ...) into the identity-form frame, then into model
/// coordinates.
inline ComplexMatrix mobius_embed(const FlagModel& model, const RealMatrix& g) {
  if (model.variant != Variant::IGr) fail(ErrorCode::InvalidArgument, "mobius_embed needs IGr");
  const int N = model.ambient_dim();
  if (g.rows() != N || g.cols() != N) fail(ErrorCode::InvalidArgument, "mobius_embed: wrong size");
  RealMatrix eta = RealMatrix::Identity(N, N);
  eta(0, 0) = -1;
  if ((g.transpose() * eta * g - eta).norm() > 1e-9)
    fail(ErrorCode::FormViolation, "matrix does not preserve the Minkowski form");
  ComplexVector d = ComplexVector::Ones(N);
  d[0] = cplx(0, 1);
  ComplexMatrix m = d.asDiagonal() * g.cast<cplx>() * d.cwiseInverse().asDiagonal();
  const ComplexMatrix a = frame_matrix(model);
  return a.adjoint() * m * a;
}

/// Lorentz boost of rapidity beta in the (x0, x1) plane.
inline RealMatrix lorentz_boost(int N, double beta) {
  RealMatrix g = RealMatrix::Identity(N, N);
  g(0, 0) = g(1, 1) = std::cosh(beta);
  g(0, 1) = g(1, 0) = std::sinh(beta);
  return g;
}

// ---- random sampling ---------------------------------------------------------

inline RealMatrix random_special_orthogonal(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RealMatrix x(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) x(i, j) = nd(rng);
  Eigen::HouseholderQR<RealMatrix> qr(x);
  RealMatrix q = qr.householderQ();
  const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

inline ComplexMatrix random_unitary(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexMatrix x(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) x(i, j) = cplx(nd(rng), nd(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(x);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) q.col(j) *= std::abs(r(j, j)) / r(j, j);
  return q;
}

/// Real orthogonal R acting through the identity-form frame: A^H R A.
inline ComplexMatrix orthogonal_move(const FlagModel& model, const RealMatrix& r) {
  const ComplexMatrix a = frame_matrix(model);
  return a.adjoint() * r.cast<cplx>() * a;
}

/// Point drawn from the maximal compact subgroup's invariant measure.
inline ModelPoint random_point(const FlagModel& model, std::mt19937_64& rng) {
  const int N = model.ambient_dim();
  std::normal_distribution<double> nd;
  switch (model.variant) {
    case Variant::ProjOdd: {
      ComplexVector v(N);
      for (int i = 0; i < N; ++i) v[i] = cplx(nd(rng), nd(rng));
      return {canonical_vector(v)};
    }
    case Variant::QuadricEven:
    case Variant::QuadricOdd: {
      const RealMatrix q = random_special_orthogonal(N, rng);
      ComplexVector v = (q.col(0).cast<cplx>() + cplx(0, 1) * q.col(1).cast<cplx>()) / std::sqrt(2.0);
      return {canonical_vector(frame_matrix(model).adjoint() * v)};
    }
    case Variant::IGr: {
      const RealMatrix q = random_special_orthogonal(N, rng);
      return apply(model, orthogonal_move(model, q), igr_reference(model));
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown variant");
}

/// Random point on C0 (which = 0) or C1 (which = 1).
inline ModelPoint random_core_point(const FlagModel& model, int which, std::mt19937_64& rng) {
  const int N = model.ambient_dim();
  std::normal_distribution<double> nd;
  if (model.variant == Variant::IGr) {
    RealMatrix r = RealMatrix::Identity(N, N);
    r.bottomRightCorner(N - 2, N - 2) = random_special_orthogonal(N - 2, rng);
    if (which == 1) {
      // half turn in the (e2, e3) plane sends the anchor p to -p
      RealMatrix h = RealMatrix::Identity(N, N);
      h(1, 1) = h(2, 2) = -1;
      r = h * r;
    }
    return apply(model, orthogonal_move(model, r), igr_reference(model));
  }
  const auto cores = schottky_pair_core(model);
  const ComplexMatrix& b = which == 0 ? cores.c0.basis : cores.c1.basis;
  ComplexVector c(b.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = cplx(nd(rng), nd(rng));
  return {canonical_vector(b * c)};
}

}  // namespace schottky
