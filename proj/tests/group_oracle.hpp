#pragma once

// Oracle computations on whole Schottky groups, built on the quad-precision
// primitives.

#include "oracle.hpp"
#include "schottky/rng.hpp"
#include "schottky/schottky.hpp"

namespace oracle {

using schottky::SchottkyGroup;

// Quad-precision generators f diag(1, lambda) f^{-1}; on P(C^N) this differs
// from the library's g_lambda by a scalar, which Ad ignores.
inline std::vector<QMat> quad_generators(const SchottkyGroup& g) {
  std::vector<QMat> out;
  const int N = g.model.ambient_dim();
  for (int j = 0; j < g.r; ++j) {
    QMat d = QMat::identity(N);
    for (int i = N / 2; i < N; ++i) d(i, i) = qc(g.lambda[j]);
    const QMat f = from(g.moves[j]);
    out.push_back(mul(mul(f, d), inverse(f)));
  }
  return out;
}

inline int fixed_dim(const SchottkyGroup& g) {
  return fixed_dim(quad_generators(g), ambient_basis(g.model.ambient_dim(), nullptr));
}

inline std::vector<QMat> zariski_span(const SchottkyGroup& g, int depth) {
  const QMat x = from(schottky::xi0(g.model));
  std::vector<QMat> gens;
  for (int j = 0; j < g.r; ++j) {
    const QMat f = from(g.moves[j]);
    gens.push_back(mul(mul(f, x), inverse(f)));
  }
  return lie_span_set(gens, depth);
}

// Inputs carry double round-off (moves are isometries only to ~1e-16), so the
// quad rank cut sits well above that and well below O(1).
constexpr double kFormRel = 1e-10;

inline int orbit_estimate(const SchottkyGroup& g, int depth, double rel, int samples = 6) {
  const auto span = zariski_span(g, depth);
  int best = 0;
  for (int i = 0; i < samples; ++i) {
    auto rng = schottky::stream_for(99, i);
    best = std::max(best, orbit_dim(span, from(schottky::random_point(g.model, rng).m), rel));
  }
  return g.model.complex_dimension() - best;
}

}  // namespace oracle
