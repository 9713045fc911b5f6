#pragma once

// Root systems with exact coordinates. Every coordinate is stored multiplied
// by two so the half-integer E and F roots stay integral.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "schottky/errors.hpp"

namespace schottky {

using RootVector = std::vector<int>;  // twice the actual coordinates

enum class RootType { A, B, C, D, E6, E7, F4, G2 };

inline std::string type_name(RootType t) {
  switch (t) {
    case RootType::A: return "A";
    case RootType::B: return "B";
    case RootType::C: return "C";
    case RootType::D: return "D";
    case RootType::E6: return "E6";
    case RootType::E7: return "E7";
    case RootType::F4: return "F4";
    case RootType::G2: return "G2";
  }
  return "?";
}

inline RootType parse_root_type(const std::string& s) {
  if (s == "A") return RootType::A;
  if (s == "B") return RootType::B;
  if (s == "C") return RootType::C;
  if (s == "D") return RootType::D;
  if (s == "E6" || s == "E") return RootType::E6;
  if (s == "E7") return RootType::E7;
  if (s == "F4" || s == "F") return RootType::F4;
  if (s == "G2" || s == "G") return RootType::G2;
  fail(ErrorCode::UnsupportedType, "unknown root system type '" + s + "'");
}

/// Pairing of two scaled vectors; equals 4 times the true inner product.
inline long long dot4(const RootVector& a, const RootVector& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

inline RootVector operator+(const RootVector& a, const RootVector& b) {
  RootVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RootVector scaled(const RootVector& a, int c) {
  RootVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

inline RootVector negated(const RootVector& a) { return scaled(a, -1); }

/// Reflection of b in the hyperplane orthogonal to a.
inline RootVector reflect(const RootVector& b, const RootVector& a) {
  const long long num = 2 * dot4(b, a);
  const long long den = dot4(a, a);
  if (num % den != 0) fail(ErrorCode::NotARoot, "reflection with non-integral Cartan number");
  const int c = static_cast<int>(num / den);
  RootVector r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - c * a[i];
  return r;
}

/// Closure of a set of simple roots under the reflections they generate.
inline std::vector<RootVector> weyl_closure(const std::vector<RootVector>& simple) {
  std::set<RootVector> seen(simple.begin(), simple.end());
  std::vector<RootVector> todo(simple.begin(), simple.end());
  while (!todo.empty()) {
    RootVector b = todo.back();
    todo.pop_back();
    for (const auto& a : simple) {
      RootVector r = reflect(b, a);
      if (seen.insert(r).second) todo.push_back(std::move(r));
    }
  }
  return {seen.begin(), seen.end()};
}

struct RootSystem {
  RootType type = RootType::A;
  int rank = 0;
  int ambient_dim = 0;
  std::vector<RootVector> roots;           // sorted
  std::vector<RootVector> simple_roots;    // alpha_1 .. alpha_rank
  std::vector<std::vector<int>> coords;    // simple coordinates, parallel to roots
  std::vector<bool> positive;              // parallel to roots
  std::map<RootVector, int> index;         // root -> position in roots

  std::string label() const {
    if (type == RootType::A || type == RootType::B || type == RootType::C || type == RootType::D)
      return type_name(type) + std::to_string(rank);
    return type_name(type);
  }

  std::vector<int> positive_indices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(roots.size()); ++i)
      if (positive[i]) out.push_back(i);
    return out;
  }

  int find(const RootVector& v) const {
    auto it = index.find(v);
    return it == index.end() ? -1 : it->second;
  }

  /// Root with the given simple coordinates, or -1.
  int find_by_coords(const std::vector<int>& c) const {
    RootVector v(ambient_dim, 0);
    for (int i = 0; i < rank; ++i) v = v + scaled(simple_roots[i], c[i]);
    return find(v);
  }
};

namespace detail {

struct Frac {
  long long num = 0, den = 1;
  void normalize() {
    if (den < 0) { num = -num; den = -den; }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
};

inline Frac fsub(Frac a, Frac b) { Frac r{a.num * b.den - b.num * a.den, a.den * b.den}; r.normalize(); return r; }
inline Frac fmul(Frac a, Frac b) { Frac r{a.num * b.num, a.den * b.den}; r.normalize(); return r; }
inline Frac fdiv(Frac a, Frac b) { Frac r{a.num * b.den, a.den * b.num}; r.normalize(); return r; }

// Exact solve of the Gram system <alpha_i, alpha_j> c_j = <alpha_i, v>.
inline std::vector<Frac> gram_solve(const std::vector<RootVector>& simple, const RootVector& v) {
  const int n = static_cast<int>(simple.size());
  std::vector<std::vector<Frac>> m(n, std::vector<Frac>(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = {dot4(simple[i], simple[j]), 1};
    m[i][n] = {dot4(simple[i], v), 1};
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && m[piv][col].num == 0) ++piv;
    if (piv == n) fail(ErrorCode::NotARoot, "simple roots are linearly dependent");
    std::swap(m[piv], m[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col].num == 0) continue;
      const Frac f = fdiv(m[r][col], m[col][col]);
      for (int k = col; k <= n; ++k) m[r][k] = fsub(m[r][k], fmul(f, m[col][k]));
    }
  }
  std::vector<Frac> c(n);
  for (int i = 0; i < n; ++i) c[i] = fdiv(m[i][n], m[i][i]);
  return c;
}

inline RootVector unit(int dim, int k, int scale = 2) {
  RootVector v(dim, 0);
  v[k] = scale;
  return v;
}

inline RootVector diff(int dim, int k, int l) {  // e_k - e_l
  return unit(dim, k) + negated(unit(dim, l));
}

inline RootVector sum(int dim, int k, int l) {  // e_k + e_l
  return unit(dim, k) + unit(dim, l);
}

}  // namespace detail

/// Expansion of v in the simple roots. Throws NotARoot unless v is a root.
inline std::vector<int> simple_coordinates(const RootSystem& rs, const RootVector& v) {
  if (static_cast<int>(v.size()) != rs.ambient_dim)
    fail(ErrorCode::NotARoot, "vector has wrong ambient dimension");
  if (rs.find(v) < 0) fail(ErrorCode::NotARoot, "vector is not in the root system");
  const auto c = detail::gram_solve(rs.simple_roots, v);
  std::vector<int> out(c.size());
  bool pos = false, neg = false;
  RootVector back(rs.ambient_dim, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].den != 1) fail(ErrorCode::NotARoot, "non-integral simple coordinates");
    out[i] = static_cast<int>(c[i].num);
    pos |= out[i] > 0;
    neg |= out[i] < 0;
    back = back + scaled(rs.simple_roots[i], out[i]);
  }
  if ((pos && neg) || back != v) fail(ErrorCode::NotARoot, "expansion is not a root expansion");
  return out;
}

namespace detail {

inline void finish(RootSystem& rs, std::vector<RootVector> roots) {
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  rs.roots = std::move(roots);
  rs.index.clear();
  for (int i = 0; i < static_cast<int>(rs.roots.size()); ++i) rs.index[rs.roots[i]] = i;
  rs.coords.resize(rs.roots.size());
  rs.positive.resize(rs.roots.size());
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    rs.coords[i] = simple_coordinates(rs, rs.roots[i]);
    rs.positive[i] = std::any_of(rs.coords[i].begin(), rs.coords[i].end(), [](int c) { return c > 0; });
  }
}

}  // namespace detail

inline RootSystem build_root_system(RootType type, int rank) {
  using namespace detail;
  RootSystem rs;
  rs.type = type;
  rs.rank = rank;
  std::vector<RootVector> roots;
  const int n = rank;
  switch (type) {
    case RootType::A: {
      if (n < 1) fail(ErrorCode::UnsupportedType, "A_n needs n >= 1");
      rs.ambient_dim = n + 1;
      for (int k = 0; k < n; ++k) rs.simple_roots.push_back(diff(n + 1, k, k + 1));
      for (int k = 0; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) {
          roots.push_back(diff(n + 1, k, l));
          roots.push_back(diff(n + 1, l, k));
        }
      break;
    }
    case RootType::B:
    case RootType::C:
    case RootType::D: {
      const int min_rank = type == RootType::D ? 4 : 2;
      if (n < min_rank)
        fail(ErrorCode::UnsupportedType, type_name(type) + "_n needs n >= " + std::to_string(min_rank));
      rs.ambient_dim = n;
      for (int k = 0; k + 1 < n; ++k) rs.simple_roots.push_back(diff(n, k, k + 1));
      if (type == RootType::B) rs.simple_roots.push_back(unit(n, n - 1));
      if (type == RootType::C) rs.simple_roots.push_back(unit(n, n - 1, 4));
      if (type == RootType::D) rs.simple_roots.push_back(sum(n, n - 2, n - 1));
      for (int k = 0; k < n; ++k) {
        if (type == RootType::B) {
          roots.push_back(unit(n, k));
          roots.push_back(unit(n, k, -2));
        }
        if (type == RootType::C) {
          roots.push_back(unit(n, k, 4));
          roots.push_back(unit(n, k, -4));
        }
        for (int l = k + 1; l < n; ++l) {
          roots.push_back(diff(n, k, l));
          roots.push_back(diff(n, l, k));
          roots.push_back(sum(n, k, l));
          roots.push_back(negated(sum(n, k, l)));
        }
      }
      break;
    }
    case RootType::F4: {
      if (n != 4) fail(ErrorCode::UnsupportedType, "F4 has rank 4");
      rs.ambient_dim = 4;
      rs.simple_roots = {{1, -1, -1, -1}, unit(4, 3), diff(4, 2, 3), diff(4, 1, 2)};
      for (int k = 0; k < 4; ++k) {
        roots.push_back(unit(4, k));
        roots.push_back(unit(4, k, -2));
        for (int l = k + 1; l < 4; ++l) {
          roots.push_back(diff(4, k, l));
          roots.push_back(diff(4, l, k));
          roots.push_back(sum(4, k, l));
          roots.push_back(negated(sum(4, k, l)));
        }
      }
      for (int mask = 0; mask < 16; ++mask) {
        RootVector v(4);
        for (int k = 0; k < 4; ++k) v[k] = (mask >> k & 1) ? -1 : 1;
        roots.push_back(v);
      }
      break;
    }
    case RootType::E6:
    case RootType::E7: {
      const int want = type == RootType::E6 ? 6 : 7;
      if (n != want) fail(ErrorCode::UnsupportedType, type_name(type) + " has rank " + std::to_string(want));
      rs.ambient_dim = 8;
      rs.simple_roots.push_back({1, -1, -1, -1, -1, -1, -1, 1});
      rs.simple_roots.push_back(sum(8, 0, 1));
      for (int j = 3; j <= n; ++j) rs.simple_roots.push_back(diff(8, j - 2, j - 3));
      roots = weyl_closure(rs.simple_roots);
      break;
    }
    case RootType::G2: {
      if (n != 2) fail(ErrorCode::UnsupportedType, "G2 has rank 2");
      rs.ambient_dim = 3;
      rs.simple_roots = {diff(3, 0, 1), {-4, 2, 2}};
      roots = weyl_closure(rs.simple_roots);
      break;
    }
  }
  finish(rs, std::move(roots));
  return rs;
}

inline RootSystem build_root_system(const std::string& type, int rank) {
  return build_root_system(parse_root_type(type), rank);
}

/// Expected |Delta| for each supported type.
inline int classical_root_count(RootType t, int n) {
  switch (t) {
    case RootType::A: return n * (n + 1);
    case RootType::B:
    case RootType::C: return 2 * n * n;
    case RootType::D: return 2 * n * (n - 1);
    case RootType::E6: return 72;
    case RootType::E7: return 126;
    case RootType::F4: return 48;
    case RootType::G2: return 12;
  }
  return 0;
}

// ---- parabolic subsets -------------------------------------------------------

struct ParabolicSubset {
  std::vector<int> gamma;        // 0-based simple-root indices in Gamma
  std::vector<int> levi_roots;   // indices into rs.roots: Z<Gamma> ∩ Delta
  std::vector<int> nilradical;   // indices into rs.roots: Delta+ \ levi
};

inline ParabolicSubset parabolic(const RootSystem& rs, std::vector<int> gamma) {
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  std::vector<bool> in_gamma(rs.rank, false);
  for (int g : gamma) {
    if (g < 0 || g >= rs.rank) fail(ErrorCode::InvalidArgument, "simple root index out of range");
    in_gamma[g] = true;
  }
  ParabolicSubset p;
  p.gamma = gamma;
  for (int i = 0; i < static_cast<int>(rs.roots.size()); ++i) {
    bool levi = true;
    for (int k = 0; k < rs.rank; ++k)
      if (rs.coords[i][k] != 0 && !in_gamma[k]) levi = false;
    if (levi) p.levi_roots.push_back(i);
    else if (rs.positive[i]) p.nilradical.push_back(i);
  }
  return p;
}

/// Gamma = Pi minus the listed simple roots (0-based).
inline std::vector<int> complement_of(const RootSystem& rs, const std::vector<int>& removed) {
  std::vector<int> g;
  for (int k = 0; k < rs.rank; ++k)
    if (std::find(removed.begin(), removed.end(), k) == removed.end()) g.push_back(k);
  return g;
}

// ---- formatting ----------------------------------------------------------------

/// Human-readable form such as "e1-e4" or "1/2(e1-e2-e3-e4)".
inline std::string format_root(const RootVector& v) {
  const bool half = std::any_of(v.begin(), v.end(), [](int x) { return x % 2 != 0; });
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0) continue;
    const int c = half ? v[k] : v[k] / 2;
    const int mag = c < 0 ? -c : c;
    if (c < 0) out += "-";
    else if (!out.empty()) out += "+";
    if (mag != 1) out += std::to_string(mag);
    out += "e" + std::to_string(k + 1);
  }
  return half ? "1/2(" + out + ")" : out;
}

inline nlohmann::json to_json(const RootSystem& rs) {
  nlohmann::json j;
  j["type"] = type_name(rs.type);
  j["rank"] = rs.rank;
  j["ambient_dim"] = rs.ambient_dim;
  j["coordinate_scale"] = 2;
  j["simple_roots"] = rs.simple_roots;
  nlohmann::json pos = nlohmann::json::array();
  for (int i : rs.positive_indices()) pos.push_back({{"root", rs.roots[i]}, {"simple_coords", rs.coords[i]}});
  j["positive_roots"] = pos;
  j["root_count"] = rs.roots.size();
  return j;
}

}  // namespace schottky
