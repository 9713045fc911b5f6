#pragma once

// Schottky groups built from a movable pair: move search, epsilon calibration,
// ping-pong certificates, reduced words and limit-set samples.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "schottky/geom.hpp"
#include "schottky/parallel.hpp"
#include "schottky/rng.hpp"

namespace schottky {

// ---- words ------------------------------------------------------------------

/// gen is 0-based; sign is +1 or -1.
struct Letter {
  int gen = 0;
  int sign = 1;
  bool operator==(const Letter&) const = default;
};
using Word = std::vector<Letter>;

inline bool cancels(const Letter& a, const Letter& b) { return a.gen == b.gen && a.sign == -b.sign; }

inline Word reduce_word(const Word& w) {
  Word out;
  for (const auto& l : w) {
    if (l.sign != 1 && l.sign != -1) fail(ErrorCode::InvalidArgument, "letter sign must be +1 or -1");
    if (l.gen < 0) fail(ErrorCode::InvalidArgument, "negative generator index");
    if (!out.empty() && cancels(out.back(), l))
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline std::string word_string(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (const auto& l : w) s += "g" + std::to_string(l.gen + 1) + (l.sign > 0 ? "" : "^-1");
  return s;
}

/// All reduced words of exactly the given length on r generators, in
/// lexicographic order of (gen, sign) letters.
inline std::vector<Word> reduced_words(int r, int length) {
  std::vector<Word> out;
  if (length == 0) {
    out.push_back({});
    return out;
  }
  Word cur;
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == length) {
      out.push_back(cur);
      return;
    }
    for (int g = 0; g < r; ++g)
      for (int s : {1, -1}) {
        const Letter l{g, s};
        if (!cur.empty() && cancels(cur.back(), l)) continue;
        cur.push_back(l);
        rec();
        cur.pop_back();
      }
  };
  rec();
  return out;
}

/// 2r(2r-1)^(l-1) for l >= 1.
inline std::uint64_t reduced_word_count(int r, int length) {
  if (length == 0) return 1;
  std::uint64_t c = 2 * static_cast<std::uint64_t>(r);
  for (int i = 1; i < length; ++i) c *= 2 * static_cast<std::uint64_t>(r) - 1;
  return c;
}

// ---- group ------------------------------------------------------------------

enum class MoveStrategy { GenericMatrix, MobiusOnSphere, LeftFactor };

inline std::string strategy_name(MoveStrategy s) {
  switch (s) {
    case MoveStrategy::GenericMatrix: return "generic-matrix";
    case MoveStrategy::MobiusOnSphere: return "mobius-on-sphere";
    case MoveStrategy::LeftFactor: return "left-factor";
  }
  return "?";
}

inline MoveStrategy parse_strategy(const std::string& s) {
  if (s == "generic-matrix") return MoveStrategy::GenericMatrix;
  if (s == "mobius-on-sphere") return MoveStrategy::MobiusOnSphere;
  if (s == "left-factor") return MoveStrategy::LeftFactor;
  fail(ErrorCode::InvalidArgument, "unknown move strategy '" + s + "'");
}

struct MoveSearchOptions {
  int max_attempts = 200;
  MoveStrategy strategy = MoveStrategy::GenericMatrix;
  int subsphere_m = 0;  // 0: whole sphere
  int candidates = 32;  // disjoint candidates compared per move

  void validate(const FlagModel& model) const {
    if (max_attempts < 1 || candidates < 1) fail(ErrorCode::InvalidArgument, "attempt counts must be positive");
    if (subsphere_m != 0) {
      if (strategy != MoveStrategy::MobiusOnSphere)
        fail(ErrorCode::InvalidArgument, "subsphere needs the mobius-on-sphere strategy");
      if (subsphere_m < 1 || subsphere_m > 2 * model.n)
        fail(ErrorCode::InvalidArgument, "subsphere dimension must lie in [1, 2n]");
    }
    if (strategy == MoveStrategy::MobiusOnSphere && model.variant != Variant::IGr)
      fail(ErrorCode::InvalidArgument, "mobius-on-sphere applies to IGr models only");
    if (strategy == MoveStrategy::LeftFactor) {
      const bool ok = model.variant == Variant::ProjOdd ||
                      (model.variant == Variant::QuadricEven && model.n % 2 == 0);
      if (!ok) fail(ErrorCode::InvalidArgument, "left-factor moves need ProjOdd or QuadricEven with n even");
    }
  }
};

struct SchottkyGroup {
  FlagModel model;
  int r = 0;
  std::uint64_t seed = 0;
  MoveStrategy strategy = MoveStrategy::GenericMatrix;
  int subsphere_m = 0;
  std::vector<ComplexMatrix> moves;  // f_1 = identity
  std::vector<double> eps;
  std::vector<cplx> lambda;

  // derived by finalize()
  std::vector<ComplexMatrix> moves_inv, gens, gens_inv;

  void finalize() {
    if (r < 0 || static_cast<int>(moves.size()) != r || static_cast<int>(eps.size()) != r ||
        static_cast<int>(lambda.size()) != r)
      fail(ErrorCode::InvalidArgument, "group data sizes do not match the rank");
    const int N = model.ambient_dim();
    moves_inv.clear();
    gens.clear();
    gens_inv.clear();
    for (int j = 0; j < r; ++j) {
      if (moves[j].rows() != N || moves[j].cols() != N)
        fail(ErrorCode::InvalidArgument, "move has the wrong size");
      Eigen::FullPivLU<ComplexMatrix> lu(moves[j]);
      if (!lu.isInvertible()) fail(ErrorCode::InvalidArgument, "move is not invertible");
      moves_inv.push_back(lu.inverse());
      gens.push_back(moves[j] * g_lambda(model, lambda[j]) * moves_inv[j]);
      gens_inv.push_back(moves[j] * g_lambda(model, 1.0 / lambda[j]) * moves_inv[j]);
    }
  }

  const ComplexMatrix& letter_matrix(const Letter& l) const {
    return l.sign > 0 ? gens.at(l.gen) : gens_inv.at(l.gen);
  }

  /// phi_j = phi o f_j^{-1}
  double phi_j(int j, const ModelPoint& x) const {
    return phi(model, apply(model, moves_inv[j], x));
  }
};

/// Product of the letter matrices in reading order.
inline ComplexMatrix word_matrix(const SchottkyGroup& g, const Word& w) {
  const int N = g.model.ambient_dim();
  ComplexMatrix m = ComplexMatrix::Identity(N, N);
  for (const auto& l : w) {
    if (l.gen >= g.r) fail(ErrorCode::InvalidArgument, "letter refers to a missing generator");
    m = m * g.letter_matrix(l);
  }
  return m;
}

// ---- moves ------------------------------------------------------------------

inline ComplexMatrix kron_identity(const ComplexMatrix& h, int m) {
  const auto k = h.rows();
  ComplexMatrix out = ComplexMatrix::Zero(k * m, k * m);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      for (int c = 0; c < m; ++c) out(i * m + c, j * m + c) = h(i, j);
  return out;
}

/// Cores f_j(C0), f_j(C1) for j = 1..r, in that order.
inline std::vector<SubspaceBasis> core_images(const FlagModel& model,
                                              const std::vector<ComplexMatrix>& moves) {
  const auto pair = schottky_pair_core(model);
  std::vector<SubspaceBasis> out;
  for (const auto& f : moves) {
    out.push_back({f * pair.c0.basis});
    out.push_back({f * pair.c1.basis});
  }
  return out;
}

/// True when all cores are pairwise disjoint; `sep` receives the smallest
/// pairwise separation.
inline bool cores_pairwise_disjoint(const FlagModel& model, const std::vector<SubspaceBasis>& cores,
                                    double* sep = nullptr, const Tolerances& tol = {}) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cores.size(); ++a)
    for (std::size_t b = a + 1; b < cores.size(); ++b) {
      if (!cores_disjoint(model, cores[a], cores[b], tol)) {
        if (sep) *sep = 0;
        return false;
      }
      best = std::min(best, core_separation(model, cores[a], cores[b]));
    }
  if (sep) *sep = best;
  return true;
}

/// Anchor of the twistor fiber through a moved IGr core, when the move fixes e1
/// in the identity-form frame.
inline RealVector igr_anchor(const FlagModel& model, const ComplexMatrix& f, int which) {
  const auto pair = schottky_pair_core(model);
  const ComplexVector l = frame_matrix(model) * f * (which == 0 ? pair.c0.basis : pair.c1.basis).col(0);
  // l = (e1 + i a)/sqrt2
  RealVector a(l.size() - 1);
  for (Eigen::Index i = 1; i < l.size(); ++i) a[i - 1] = l[i].imag() * std::sqrt(2.0);
  return a;
}

namespace detail {

inline ComplexMatrix candidate_move(const FlagModel& model, const MoveSearchOptions& opts,
                                    std::mt19937_64& rng) {
  const int N = model.ambient_dim();
  switch (opts.strategy) {
    case MoveStrategy::GenericMatrix:
      if (model.variant == Variant::ProjOdd) return random_unitary(N, rng);
      return orthogonal_move(model, random_special_orthogonal(N, rng));
    case MoveStrategy::MobiusOnSphere: {
      const int m = opts.subsphere_m == 0 ? 2 * model.n : opts.subsphere_m;
      RealMatrix r = RealMatrix::Identity(N, N);
      r.block(1, 1, m + 1, m + 1) = random_special_orthogonal(m + 1, rng);
      return orthogonal_move(model, r);
    }
    case MoveStrategy::LeftFactor: {
      if (model.variant == Variant::ProjOdd) {
        return kron_identity(random_unitary(2, rng), model.n + 1);
      }
      const FlagModel q4 = make_model(Variant::QuadricEven, 2);
      return kron_identity(orthogonal_move(q4, random_special_orthogonal(4, rng)), model.n / 2);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown strategy");
}

inline bool anchors_separated(const FlagModel& model, const std::vector<ComplexMatrix>& moves,
                              double min_angle) {
  std::vector<RealVector> anchors;
  for (const auto& f : moves)
    for (int w = 0; w < 2; ++w) anchors.push_back(igr_anchor(model, f, w));
  for (std::size_t a = 0; a < anchors.size(); ++a)
    for (std::size_t b = a + 1; b < anchors.size(); ++b) {
      const double c = std::clamp(anchors[a].dot(anchors[b]), -1.0, 1.0);
      if (std::acos(c) < min_angle) return false;
    }
  return true;
}

// Smallest min(phi_i, 1 - phi_i) over the cores of the other pairs: how deep
// the cores sit inside each other's phi-window. For vector models phi_i on a
// linear core B c is the Rayleigh quotient c^H W c / c^H (W + Z) c, so its
// range is given exactly by the generalized eigenvalues of (W, W + Z). IGr
// cores are sampled.
inline double core_phi_score(const FlagModel& model, const std::vector<ComplexMatrix>& moves,
                             std::mt19937_64& rng) {
  std::vector<ComplexMatrix> inv;
  for (const auto& f : moves) inv.push_back(f.inverse());
  double best = 1.0;
  if (model.variant == Variant::IGr) {
    for (std::size_t j = 0; j < moves.size(); ++j)
      for (int side = 0; side < 2; ++side)
        for (int k = 0; k < 48; ++k) {
          const ModelPoint x = apply(model, moves[j], random_core_point(model, side, rng));
          for (std::size_t i = 0; i < moves.size(); ++i) {
            if (i == j) continue;
            const double p = phi(model, apply(model, inv[i], x));
            best = std::min({best, p, 1 - p});
          }
        }
    return best;
  }
  const auto pair = schottky_pair_core(model);
  const int o = model.z_offset(), k = model.block();
  for (std::size_t j = 0; j < moves.size(); ++j)
    for (const ComplexMatrix* b : {&pair.c0.basis, &pair.c1.basis})
      for (std::size_t i = 0; i < moves.size(); ++i) {
        if (i == j) continue;
        const ComplexMatrix y = inv[i] * moves[j] * *b;
        const ComplexMatrix yz = y.middleRows(o, k), yw = y.middleRows(o + k, k);
        const ComplexMatrix w = yw.adjoint() * yw, t = w + yz.adjoint() * yz;
        Eigen::LLT<ComplexMatrix> llt(t);
        if (llt.info() != Eigen::Success) return 0.0;
        const ComplexMatrix linv = llt.matrixL().solve(ComplexMatrix::Identity(t.rows(), t.cols()));
        const ComplexMatrix m = linv * w * linv.adjoint();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        best = std::min({best, ev[0], 1 - ev[ev.size() - 1]});
      }
  return best;
}

}  // namespace detail

/// Moves f_2..f_r making all 2r cores pairwise disjoint (exact rank test).
/// Each move is the best of the first `candidates` disjoint draws, ranked by
/// how far every core stays from the other pairs' phi-extremes.
inline std::vector<ComplexMatrix> find_moves(const FlagModel& model, int r, std::uint64_t seed,
                                             const MoveSearchOptions& opts = {},
                                             const Tolerances& tol = {}) {
  if (model.variant == Variant::QuadricEven && model.n % 2 == 1) {
    std::ostringstream os;
    os << model.label() << ": dim(C0 cap f(C0)) = " << model.n - 1
       << " mod 2 for every f in SO(" << 2 * model.n << ",C), so no disjoint copy of C0 exists";
    fail(ErrorCode::ParityObstruction, os.str());
  }
  if (r < 1) fail(ErrorCode::InvalidArgument, "rank must be at least 1");
  opts.validate(model);
  const int N = model.ambient_dim();
  std::vector<ComplexMatrix> moves{ComplexMatrix::Identity(N, N)};
  auto rng = stream_for(seed, 0, 0x6d6f766573ULL);
  int attempts = 0;
  for (int j = 1; j < r; ++j) {
    ComplexMatrix best;
    double best_sep = -1;
    int found = 0;
    while (found < opts.candidates) {
      if (attempts >= opts.max_attempts) {
        if (found > 0) break;
        fail(ErrorCode::MaxAttemptsExceeded,
             "no disjoint move found within " + std::to_string(opts.max_attempts) + " attempts");
      }
      ++attempts;
      ComplexMatrix f = detail::candidate_move(model, opts, rng);
      auto trial = moves;
      trial.push_back(f);
      double sep = 0;
      bool ok = false;
      try {
        ok = cores_pairwise_disjoint(model, core_images(model, trial), &sep, tol);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankAmbiguous) throw;
      }
      if (ok && opts.strategy == MoveStrategy::MobiusOnSphere)
        ok = detail::anchors_separated(model, trial, 0.1);
      if (!ok) continue;
      ++found;
      sep = detail::core_phi_score(model, trial, rng);
      if (sep > best_sep) {
        best_sep = sep;
        best = f;
      }
    }
    moves.push_back(best);
  }
  moves.erase(moves.begin());
  return moves;
}

/// Unipotent isometry [[I,B],[0,I]] [[I,0],[C,I]] of z.w + w.z for skew B, C.
inline ComplexMatrix quadric_bc_move(const ComplexMatrix& b, const ComplexMatrix& c) {
  const auto n = b.rows();
  if ((b + b.transpose()).norm() > 1e-12 || (c + c.transpose()).norm() > 1e-12)
    fail(ErrorCode::FormViolation, "B and C must be skew-symmetric");
  ComplexMatrix u = ComplexMatrix::Identity(2 * n, 2 * n), l = u;
  u.topRightCorner(n, n) = b;
  l.bottomLeftCorner(n, n) = c;
  return u * l;
}

// ---- calibration ------------------------------------------------------------

/// Moves y along the torus flow (real parameter) to phi = target.
inline ModelPoint push_to_level(const FlagModel& model, const ModelPoint& y, double target) {
  const double p = phi(model, y);
  if (!(p > 0 && p < 1)) fail(ErrorCode::MapUndefined, "point lies on a core");
  const double t2 = target * (1 - p) / (p * (1 - target));
  return apply(model, g_lambda(model, std::sqrt(t2)), y);
}

/// Sample of cl(U_j) (side 0, phi_j <= eps) or cl(V_j) (side 1, phi_j >= 1-eps),
/// where the depth below the boundary is depth_frac * eps.
inline ModelPoint sample_closed_set(const FlagModel& model, const ComplexMatrix& move, double eps,
                                    int side, double depth_frac, std::mt19937_64& rng) {
  ModelPoint y;
  if (depth_frac >= 1.0) {
    y = random_core_point(model, side, rng);
  } else {
    ModelPoint z;
    double p = 0;
    do {
      z = random_point(model, rng);
      p = phi(model, z);
    } while (!(p > 1e-9 && p < 1 - 1e-9));
    const double a = eps * (1.0 - depth_frac);
    y = push_to_level(model, z, side == 0 ? a : 1.0 - a);
  }
  return apply(model, move, y);
}

// depth profile: a quarter on the boundary, an eighth on the core
inline double draw_depth(std::size_t i, std::mt19937_64& rng) {
  if (i % 8 < 2) return 0.0;
  if (i % 8 == 2) return 1.0;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

struct CalibrationOptions {
  double margin = 0.01;
  int samples_per_set = 2048;
  int refine_per_set = 8;     // worst samples improved by local search
  int refine_steps = 60;
  int min_exponent = 2;
  int max_exponent = 20;
};

/// Element of the maximal compact subgroup close to the identity, via the
/// Cayley transform of a random skew (or skew-Hermitian) matrix of norm step.
inline ComplexMatrix compact_perturbation(const FlagModel& model, double step, std::mt19937_64& rng) {
  const int N = model.ambient_dim();
  std::normal_distribution<double> nd;
  ComplexMatrix k = ComplexMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const cplx v = model.has_form() ? cplx(nd(rng), 0) : cplx(nd(rng), nd(rng));
      k(i, j) = v;
      k(j, i) = -std::conj(v);
    }
  if (!model.has_form())
    for (int i = 0; i < N; ++i) k(i, i) = cplx(0, nd(rng));
  k *= step / k.norm();
  const ComplexMatrix id = ComplexMatrix::Identity(N, N);
  const ComplexMatrix c = (id - k / 2.0).inverse() * (id + k / 2.0);
  return model.has_form() ? orthogonal_move(model, c.real()) : c;
}

namespace detail {

struct Probe {
  ModelPoint y;  // base point before pushing and moving
  double level = 0;
  double value = 0;
};

// window distance of f_j(push(y, level)) for every other generator
inline double probe_value(const FlagModel& model, const std::vector<ComplexMatrix>& moves,
                          const std::vector<ComplexMatrix>& moves_inv, const std::vector<double>& eps,
                          int j, const ModelPoint& y, double level) {
  const ModelPoint x = apply(model, moves[j], push_to_level(model, y, level));
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < moves.size(); ++i) {
    if (static_cast<int>(i) == j) continue;
    const double p = phi(model, apply(model, moves_inv[i], x));
    m = std::min({m, p - eps[i], (1 - eps[i]) - p});
  }
  return m;
}

}  // namespace detail

/// Smallest phi-distance from the window [eps_i, 1-eps_i] over points of
/// every closed set cl(U_j), cl(V_j), i != j. Random points are pushed along
/// the flow to levels inside the set; the worst ones are then improved by a
/// local search over the maximal compact subgroup.
inline double cross_separation(const FlagModel& model, const std::vector<ComplexMatrix>& moves,
                               const std::vector<ComplexMatrix>& moves_inv,
                               const std::vector<double>& eps, const CalibrationOptions& opts,
                               std::uint64_t seed) {
  const int r = static_cast<int>(moves.size());
  if (r < 2) return std::numeric_limits<double>::infinity();
  const std::size_t S = static_cast<std::size_t>(opts.samples_per_set);
  auto level_for = [&](int j, int side, double depth) {
    const double a = std::max(eps[j] * (1.0 - depth), 1e-12);
    return side == 0 ? a : 1.0 - a;
  };
  auto probes = parallel_map<detail::Probe>(static_cast<std::size_t>(2 * r) * S, [&](std::size_t idx) {
    const int set = static_cast<int>(idx / S);
    auto rng = stream_for(seed, idx, 0x63616c6962ULL);
    detail::Probe pr;
    double p = 0;
    do {
      pr.y = random_point(model, rng);
      p = phi(model, pr.y);
    } while (!(p > 1e-9 && p < 1 - 1e-9));
    pr.level = level_for(set / 2, set % 2, draw_depth(idx, rng));
    pr.value = detail::probe_value(model, moves, moves_inv, eps, set / 2, pr.y, pr.level);
    return pr;
  });
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pr : probes) best = std::min(best, pr.value);
  if (best < opts.margin || opts.refine_per_set <= 0) return best;

  std::vector<std::size_t> worst;
  for (int set = 0; set < 2 * r; ++set) {
    std::vector<std::size_t> ids(S);
    for (std::size_t i = 0; i < S; ++i) ids[i] = set * S + i;
    const std::size_t k = std::min<std::size_t>(opts.refine_per_set, S);
    std::partial_sort(ids.begin(), ids.begin() + k, ids.end(),
                      [&](std::size_t a, std::size_t b) { return probes[a].value < probes[b].value; });
    worst.insert(worst.end(), ids.begin(), ids.begin() + k);
  }
  const auto refined = parallel_map<double>(worst.size(), [&](std::size_t w) {
    const std::size_t idx = worst[w];
    const int j = static_cast<int>(idx / S) / 2;
    auto rng = stream_for(seed, idx, 0x726566696e65ULL);
    detail::Probe cur = probes[idx];
    double step = 0.2;
    for (int it = 0; it < opts.refine_steps && cur.value >= opts.margin; ++it) {
      const ModelPoint y = apply(model, compact_perturbation(model, step, rng), cur.y);
      const double p = phi(model, y);
      if (!(p > 1e-9 && p < 1 - 1e-9)) continue;
      const double v = detail::probe_value(model, moves, moves_inv, eps, j, y, cur.level);
      if (v < cur.value) {
        cur.y = y;
        cur.value = v;
        step = std::min(step * 1.5, 0.5);
      } else {
        step *= 0.8;
      }
    }
    return cur.value;
  });
  for (double v : refined) best = std::min(best, v);
  return best;
}

/// Largest uniform eps = 2^-k whose closed neighborhoods are separated by the
/// margin on samples.
inline std::vector<double> calibrate_epsilons(const FlagModel& model,
                                              const std::vector<ComplexMatrix>& moves,
                                              std::uint64_t seed,
                                              const CalibrationOptions& opts = {}) {
  const int r = static_cast<int>(moves.size());
  if (r < 1) fail(ErrorCode::InvalidArgument, "need at least one generator");
  std::vector<ComplexMatrix> inv;
  for (const auto& f : moves) inv.push_back(f.inverse());
  for (int k = opts.min_exponent; k <= opts.max_exponent; ++k) {
    const std::vector<double> eps(r, std::ldexp(1.0, -k));
    if (cross_separation(model, moves, inv, eps, opts, seed) >= opts.margin)
      return eps;
  }
  fail(ErrorCode::SeparationFailure,
       "closed neighborhoods overlap for every eps >= 2^-" + std::to_string(opts.max_exponent));
}

inline cplx lambda_for(double eps, double phase = 0.0) {
  return std::polar((1.0 - eps) / eps, phase);
}

struct ConstructOptions {
  MoveSearchOptions moves;
  CalibrationOptions calibration;
  double lambda_phase = 0.0;
  // fresh move searches tried while the calibrated eps stays below good_eps;
  // the largest eps wins
  int restarts = 4;
  double good_eps = 1.0 / 64;
};

inline SchottkyGroup construct_group(const FlagModel& model, int r, std::uint64_t seed,
                                     const ConstructOptions& opts = {}, const Tolerances& tol = {}) {
  SchottkyGroup g;
  g.model = model;
  g.r = r;
  g.seed = seed;
  g.strategy = opts.moves.strategy;
  g.subsphere_m = opts.moves.subsphere_m;
  const int N = model.ambient_dim();
  std::optional<Error> last;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    const std::uint64_t sub = attempt == 0 ? seed : splitmix64(seed + static_cast<std::uint64_t>(attempt));
    std::vector<ComplexMatrix> moves;
    std::vector<double> eps;
    try {
      moves = find_moves(model, r, sub, opts.moves, tol);
      moves.insert(moves.begin(), ComplexMatrix::Identity(N, N));
      eps = calibrate_epsilons(model, moves, sub, opts.calibration);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SeparationFailure && e.code() != ErrorCode::MaxAttemptsExceeded) throw;
      last = e;
      continue;
    }
    if (g.eps.empty() || eps[0] > g.eps[0]) {
      g.moves = moves;
      g.eps = eps;
    }
    if (g.eps[0] >= opts.good_eps) break;
  }
  if (g.eps.empty()) throw *last;
  for (double e : g.eps) g.lambda.push_back(lambda_for(e, opts.lambda_phase));
  g.finalize();
  return g;
}

// ---- sampling ---------------------------------------------------------------

inline bool in_fundamental_domain(const SchottkyGroup& g, const ModelPoint& x) {
  for (int j = 0; j < g.r; ++j) {
    const double p = g.phi_j(j, x);
    if (p < g.eps[j] || p > 1 - g.eps[j]) return false;
  }
  return true;
}

/// Rejection sample of F = X minus the union of all U_j and V_j.
inline std::vector<ModelPoint> fundamental_domain_sample(const SchottkyGroup& g, std::size_t n,
                                                         std::uint64_t seed) {
  std::vector<ModelPoint> out;
  out.reserve(n);
  const std::size_t chunk = 4096;
  std::size_t proposed = 0;
  while (out.size() < n) {
    const auto batch = parallel_map<std::pair<bool, ModelPoint>>(chunk, [&](std::size_t i) {
      auto rng = stream_for(seed, proposed + i, 0x66646f6dULL);
      ModelPoint x = random_point(g.model, rng);
      return std::make_pair(in_fundamental_domain(g, x), x);
    });
    proposed += chunk;
    for (const auto& [ok, x] : batch)
      if (ok && out.size() < n) out.push_back(x);
    if (proposed >= 10000 && static_cast<double>(out.size()) < 1e-4 * static_cast<double>(proposed))
      fail(ErrorCode::SamplingStarved, "fundamental domain acceptance below 1e-4");
    if (proposed > 100000000) fail(ErrorCode::SamplingStarved, "too many proposals");
  }
  return out;
}

// ---- certificate --------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0;      // worst observed quantity
  double threshold = 0;  // required bound
  std::string detail;
};

struct PingPongCertificate {
  std::size_t samples = 0;
  int max_word_len = 0;
  double margin = 0;
  std::vector<CheckResult> checks;
  std::vector<double> per_generator_margin;  // check (ii), per generator
  bool pass = false;

  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
};

inline nlohmann::json to_json(const PingPongCertificate& c) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& k : c.checks)
    checks.push_back({{"name", k.name}, {"passed", k.passed}, {"value", k.value},
                      {"threshold", k.threshold}, {"detail", k.detail}});
  nlohmann::json j = {{"samples", c.samples},
                      {"max_word_len", c.max_word_len},
                      {"margin", c.margin},
                      {"checks", checks},
                      {"per_generator_margin", c.per_generator_margin},
                      {"verdict", c.pass ? "pass" : "fail"},
                      {"scope",
                       "sampled evidence of the ping-pong inclusions and of non-scalar words; "
                       "properness of the action is not finitely checkable"}};
  if (const auto* f = c.first_failure()) j["first_failure"] = f->name;
  return j;
}

struct CertifyOptions {
  std::size_t samples = 2000;
  int max_word_len = 4;
  double equivariance_tol = 1e-8;
  double closure_tol = 1e-9;
  double nonscalar_min = 1e-6;
};

inline double nonscalar_distance(const ComplexMatrix& m) {
  const auto N = m.rows();
  const cplx s = m.trace() / static_cast<double>(N);
  return (m - s * ComplexMatrix::Identity(N, N)).norm() / m.norm();
}

namespace detail {

// target phi_j excess for a point claimed to be in cl(V_j) (sign +) or cl(U_j)
inline double target_excess(const SchottkyGroup& g, const Letter& l, const ModelPoint& y) {
  const double p = g.phi_j(l.gen, y);
  const double e = g.eps[l.gen];
  return l.sign > 0 ? p - (1 - e) : e - p;
}

}  // namespace detail

inline PingPongCertificate certify_ping_pong(const SchottkyGroup& g, const CertifyOptions& opts = {},
                                             const Tolerances& tol = {}) {
  tol.validate();
  if (g.gens.size() != static_cast<std::size_t>(g.r)) fail(ErrorCode::InvalidArgument, "group not finalized");
  PingPongCertificate cert;
  cert.samples = opts.samples;
  cert.max_word_len = opts.max_word_len;
  cert.margin = tol.cert_margin;
  const FlagModel& M = g.model;
  const std::size_t n = opts.samples;
  const double inf = std::numeric_limits<double>::infinity();

  // (i) equivariance of phi_j under gamma_j^{+-1}
  {
    const auto res = parallel_map<double>(n * g.r, [&](std::size_t idx) {
      const int j = static_cast<int>(idx / n);
      auto rng = stream_for(g.seed, idx, 0x65717569ULL);
      const ModelPoint x = random_point(M, rng);
      const double p = g.phi_j(j, x);
      const double t = std::abs(g.lambda[j]);
      const double a = std::abs(g.phi_j(j, apply(M, g.gens[j], x)) - phi_flow(p, t));
      const double b = std::abs(g.phi_j(j, apply(M, g.gens_inv[j], x)) - phi_flow(p, 1 / t));
      return std::max(a, b);
    });
    const double worst = res.empty() ? 0 : *std::max_element(res.begin(), res.end());
    cert.checks.push_back({"equivariance", worst < opts.equivariance_tol, worst, opts.equivariance_tol,
                           "max |phi_j(gamma_j x) - t^2 phi/(1+(t^2-1)phi)|"});
  }

  // (ii) ping-pong inclusions on sampled closed sets
  {
    const int sets = 2 * g.r;
    // work item: generator j, sign, sample i; the source cycles over the
    // closed sets
    const auto res = parallel_map<std::pair<double, double>>(n * 2 * g.r, [&](std::size_t idx) {
      const int gs = static_cast<int>(idx / n);
      const std::size_t i = idx % n;
      const int j = gs / 2;
      const Letter l{j, gs % 2 == 0 ? 1 : -1};
      const int excluded = 2 * j + (l.sign > 0 ? 0 : 1);  // cl(U_j) for +, cl(V_j) for -
      auto rng = stream_for(g.seed, idx, 0x70696e67ULL);
      const int src = static_cast<int>(i % sets);
      double own = inf;
      // the excluded set's slot is used for the open-set exchange instead
      if (src == excluded) {
        // U_j -> complement of cl(V_j) (and V_j -> complement of cl(U_j) for -)
        const double e = g.eps[j];
        const double a = std::max(0.0, e - tol.cert_margin) * std::uniform_real_distribution<double>(0, 1)(rng);
        const double depth = e > 0 ? 1.0 - a / e : 1.0;
        const ModelPoint x = sample_closed_set(M, g.moves[j], e, l.sign > 0 ? 0 : 1,
                                               std::min(depth, 1.0), rng);
        const ModelPoint y = apply(M, g.letter_matrix(l), x);
        const double p = g.phi_j(j, y);
        own = l.sign > 0 ? (1 - e) - p : p - e;
        return std::make_pair(inf, own);
      }
      const int sj = src / 2, side = src % 2;
      const ModelPoint x = sample_closed_set(M, g.moves[sj], g.eps[sj], side, draw_depth(i / sets, rng), rng);
      const ModelPoint y = apply(M, g.letter_matrix(l), x);
      return std::make_pair(detail::target_excess(g, l, y), own);
    });
    double worst = inf, worst_own = inf;
    cert.per_generator_margin.assign(g.r, inf);
    for (std::size_t idx = 0; idx < res.size(); ++idx) {
      const int j = static_cast<int>(idx / n) / 2;
      worst = std::min(worst, res[idx].first);
      worst_own = std::min(worst_own, res[idx].second);
      cert.per_generator_margin[j] = std::min(cert.per_generator_margin[j], res[idx].first);
    }
    cert.checks.push_back({"ping_pong_inclusion", worst >= tol.cert_margin, worst, tol.cert_margin,
                           "min phi-margin of gamma_j^{+-1} images of the other closed sets inside V_j / U_j"});
    cert.checks.push_back({"open_set_exchange", worst_own >= tol.cert_margin, worst_own, tol.cert_margin,
                           "min phi-margin of gamma_j(U_j) outside cl(V_j), sampled eps_j - margin deep"});
  }

  // (iii) reduced words move fundamental-domain points into the predicted sets
  if (g.r >= 2 && opts.max_word_len >= 1) {
    const auto F = fundamental_domain_sample(g, n, g.seed ^ 0x5eedULL);
    const int L = opts.max_word_len;
    const auto res = parallel_map<std::pair<double, double>>(F.size(), [&](std::size_t i) {
      double len1 = inf, deeper = inf;
      // prepend letters: w = l w', image = l(w' x)
      std::function<void(const ModelPoint&, const Letter*, int)> rec =
          [&](const ModelPoint& y, const Letter* first, int depth) {
            if (depth == L) return;
            for (int gi = 0; gi < g.r; ++gi)
              for (int s : {1, -1}) {
                const Letter l{gi, s};
                if (first && cancels(l, *first)) continue;
                const ModelPoint z = apply(M, g.letter_matrix(l), y);
                const double ex = detail::target_excess(g, l, z);
                if (depth == 0)
                  len1 = std::min(len1, ex);
                else
                  deeper = std::min(deeper, ex);
                rec(z, &l, depth + 1);
              }
          };
      rec(F[i], nullptr, 0);
      return std::make_pair(len1, deeper);
    });
    double len1 = inf, deeper = inf;
    for (const auto& [a, b] : res) {
      len1 = std::min(len1, a);
      deeper = std::min(deeper, b);
    }
    cert.checks.push_back({"words_length1_closure", len1 >= -opts.closure_tol, len1, -opts.closure_tol,
                           "single letters map F into the closed target set"});
    if (L >= 2)
      cert.checks.push_back({"words_leave_domain", deeper >= tol.cert_margin, deeper, tol.cert_margin,
                             "reduced words of length 2.." + std::to_string(L) +
                                 " map F into the leading letter's set with margin"});
  } else {
    cert.checks.push_back({"words_leave_domain", true, 0, 0, "not applicable for rank 1"});
  }

  // (iv) words are not scalar
  {
    double worst = inf;
    std::size_t count = 0;
    for (int len = 1; len <= opts.max_word_len; ++len)
      for (const auto& w : reduced_words(g.r, len)) {
        worst = std::min(worst, nonscalar_distance(word_matrix(g, w)));
        ++count;
      }
    cert.checks.push_back({"nonscalar_words", worst >= opts.nonscalar_min, worst, opts.nonscalar_min,
                           std::to_string(count) + " reduced words checked"});
  }

  cert.pass = true;
  for (const auto& c : cert.checks) cert.pass = cert.pass && c.passed;
  return cert;
}

/// Throws CertificateFailed naming the first failed check.
inline void require_pass(const PingPongCertificate& c) {
  if (const auto* f = c.first_failure()) {
    std::ostringstream os;
    os << "check " << f->name << " failed: value " << f->value << " vs threshold " << f->threshold;
    fail(ErrorCode::CertificateFailed, os.str());
  }
}

// ---- limit set ----------------------------------------------------------------

struct LimitPoint {
  Word word;
  int base = 0;  // index into the 2r core base points
  ModelPoint point;
};

/// Images of one sampled point on each of the 2r cores under every reduced
/// word of the given length.
inline std::vector<LimitPoint> limit_set_sample(const SchottkyGroup& g, int depth, std::uint64_t seed) {
  if (depth < 0 || depth > 12) fail(ErrorCode::InvalidArgument, "depth must lie in [0, 12]");
  std::vector<ModelPoint> bases;
  auto rng = stream_for(seed, 0, 0x6c696d6974ULL);
  for (int j = 0; j < g.r; ++j)
    for (int side = 0; side < 2; ++side)
      bases.push_back(apply(g.model, g.moves[j], random_core_point(g.model, side, rng)));
  const auto words = reduced_words(g.r, depth);
  std::vector<LimitPoint> out;
  for (const auto& w : words) {
    const ComplexMatrix m = word_matrix(g, w);
    for (std::size_t b = 0; b < bases.size(); ++b)
      out.push_back({w, static_cast<int>(b), apply(g.model, m, bases[b])});
  }
  return out;
}

// ---- serialization -----------------------------------------------------------

inline nlohmann::json to_json(const SchottkyGroup& g) {
  nlohmann::json moves = nlohmann::json::array(), lam = nlohmann::json::array();
  for (const auto& f : g.moves) moves.push_back(to_json(f));
  for (const auto& l : g.lambda) lam.push_back({{"re", l.real()}, {"im", l.imag()}});
  const auto pair = schottky_pair_core(g.model);
  return {{"model", to_json(g.model)},
          {"seed", g.seed},
          {"r", g.r},
          {"strategy", strategy_name(g.strategy)},
          {"subsphere_m", g.subsphere_m},
          {"eps", g.eps},
          {"lambda", lam},
          {"moves", moves},
          {"pair_core", {{"c0", to_json(pair.c0.basis)}, {"c1", to_json(pair.c1.basis)},
                         {"xi0", to_json(xi0(g.model))}}}};
}

inline SchottkyGroup group_from_json(const nlohmann::json& j) {
  SchottkyGroup g;
  try {
    g.model = model_from_json(j.at("model"));
    g.seed = j.at("seed").get<std::uint64_t>();
    g.r = j.at("r").get<int>();
    g.strategy = parse_strategy(j.value("strategy", std::string("generic-matrix")));
    g.subsphere_m = j.value("subsphere_m", 0);
    g.eps = j.at("eps").get<std::vector<double>>();
    for (const auto& l : j.at("lambda")) g.lambda.emplace_back(l.at("re").get<double>(), l.at("im").get<double>());
    for (const auto& m : j.at("moves")) g.moves.push_back(matrix_from_json(m));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed group JSON: ") + e.what());
  }
  if (g.r < 1) fail(ErrorCode::InvalidArgument, "group rank must be positive");
  for (std::size_t i = 0; i < g.eps.size() && i < g.lambda.size(); ++i) {
    const double e = g.eps[i];
    if (!(e > 0 && e < 0.5)) fail(ErrorCode::InvalidArgument, "eps must lie in (0, 1/2)");
    const double want = (1 - e) / e;
    if (std::abs(std::abs(g.lambda[i]) - want) > 1e-12 * want)
      fail(ErrorCode::InvalidArgument, "|lambda_j| must equal (1 - eps_j)/eps_j");
  }
  g.finalize();
  return g;
}

}  // namespace schottky
