#pragma once

// Real-form involutions on root systems and the scan for real forms whose
// closed orbit in G/Q_Gamma is a real hypersurface.

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schottky/parallel.hpp"
#include "schottky/rootsys.hpp"

namespace schottky {

enum class FormFamily { SU, SO, SP, SOStar, EII, EIII, EVI, EVII, FII, Split };

struct RealFormSpec {
  FormFamily family = FormFamily::Split;
  int p = 0;
  int q = 0;

  std::string name(const RootSystem& rs) const {
    const std::string pq = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    switch (family) {
      case FormFamily::SU: return "su" + pq;
      case FormFamily::SO: return "so" + pq;
      case FormFamily::SP: return "sp" + pq;
      case FormFamily::SOStar: return "so*(" + std::to_string(2 * rs.rank) + ")";
      case FormFamily::EII: return "EII";
      case FormFamily::EIII: return "EIII";
      case FormFamily::EVI: return "EVI";
      case FormFamily::EVII: return "EVII";
      case FormFamily::FII: return "FII";
      case FormFamily::Split: return "split(" + rs.label() + ")";
    }
    return "?";
  }
};

/// sigma as an integer matrix on simple coordinates together with the induced
/// permutation of the roots.
struct SigmaInvolution {
  std::vector<std::vector<int>> matrix;  // column j: simple coords of sigma(alpha_j)
  std::vector<int> perm;                 // roots[perm[i]] = sigma(roots[i])
  std::vector<int> imaginary;            // sigma(a) = -a
  std::vector<int> real;                 // sigma(a) = a
};

namespace detail {

// Signed permutation of ambient coordinates: e_k -> sign[k] * e_{target[k]}.
struct AmbientMap {
  std::vector<int> target;
  std::vector<int> sign;

  RootVector apply(const RootVector& v) const {
    RootVector r(v.size(), 0);
    for (std::size_t k = 0; k < v.size(); ++k) r[target[k]] += sign[k] * v[k];
    return r;
  }
};

inline AmbientMap ambient_identity(int dim) {
  AmbientMap m;
  for (int k = 0; k < dim; ++k) {
    m.target.push_back(k);
    m.sign.push_back(1);
  }
  return m;
}

// Pairs (e1,e2), (e3,e4), ... swapped for the first 2*pairs coordinates.
inline void swap_pairs(AmbientMap& m, int pairs) {
  for (int i = 0; i < pairs; ++i) {
    m.target[2 * i] = 2 * i + 1;
    m.target[2 * i + 1] = 2 * i;
  }
}

using SimpleTable = std::vector<std::vector<int>>;  // row j: sigma(alpha_{j+1})

inline SimpleTable table_from_ambient(const RootSystem& rs, const AmbientMap& m) {
  SimpleTable t;
  for (const auto& a : rs.simple_roots) {
    const RootVector img = m.apply(a);
    if (rs.find(img) < 0) fail(ErrorCode::UnsupportedRealForm, "ambient map does not preserve the roots");
    t.push_back(simple_coordinates(rs, img));
  }
  return t;
}

// Builds a row of simple coordinates from (index, coefficient) pairs, 1-based.
inline std::vector<int> combo(int rank, std::initializer_list<std::pair<int, int>> terms) {
  std::vector<int> v(rank, 0);
  for (auto [i, c] : terms) v[i - 1] += c;
  return v;
}

inline SimpleTable exceptional_table(FormFamily f, int rank) {
  auto id = [rank](int i) { return combo(rank, {{i, 1}}); };
  auto neg = [rank](int i) { return combo(rank, {{i, -1}}); };
  switch (f) {
    case FormFamily::EII:
      return {id(6), id(2), id(5), id(4), id(3), id(1)};
    case FormFamily::EIII:
      return {combo(rank, {{6, 1}, {3, 1}, {4, 1}, {5, 1}}),
              combo(rank, {{2, 1}, {3, 1}, {4, 2}, {5, 1}}),
              neg(3), neg(4), neg(5),
              combo(rank, {{1, 1}, {3, 1}, {4, 1}, {5, 1}})};
    case FormFamily::EVI:
      return {id(1), neg(2), id(3),
              combo(rank, {{2, 1}, {4, 1}, {5, 1}}),
              neg(5),
              combo(rank, {{5, 1}, {6, 1}, {7, 1}}),
              neg(7)};
    case FormFamily::EVII:
      return {combo(rank, {{1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 1}}),
              neg(2), neg(3), neg(4), neg(5),
              combo(rank, {{2, 1}, {3, 1}, {4, 2}, {5, 2}, {6, 1}}),
              id(7)};
    case FormFamily::FII:
      return {combo(rank, {{1, 1}, {2, 3}, {3, 2}, {4, 1}}), neg(2), neg(3), neg(4)};
    default: break;
  }
  fail(ErrorCode::UnsupportedRealForm, "no simple-root table for this form");
}

}  // namespace detail

/// Turns a simple-root table into an involution and checks sigma^2 = id,
/// sigma(Delta) = Delta and the sigma-order property.
inline SigmaInvolution sigma_from_table(const RootSystem& rs, const std::vector<std::vector<int>>& table) {
  const int n = rs.rank;
  if (static_cast<int>(table.size()) != n) fail(ErrorCode::UnsupportedRealForm, "table has wrong size");
  SigmaInvolution s;
  s.matrix.assign(n, std::vector<int>(n, 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) s.matrix[i][j] = table[j][i];
  auto apply = [&](const std::vector<int>& c) {
    std::vector<int> r(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] += s.matrix[i][j] * c[j];
    return r;
  };
  s.perm.resize(rs.roots.size());
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const int k = rs.find_by_coords(apply(rs.coords[i]));
    if (k < 0) fail(ErrorCode::UnsupportedRealForm, "sigma does not map roots to roots");
    s.perm[i] = k;
  }
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    if (s.perm[s.perm[i]] != static_cast<int>(i))
      fail(ErrorCode::UnsupportedRealForm, "sigma is not an involution");
    const int neg = rs.find(negated(rs.roots[i]));
    if (s.perm[i] == neg) s.imaginary.push_back(static_cast<int>(i));
    if (s.perm[i] == static_cast<int>(i)) s.real.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const bool imag = std::binary_search(s.imaginary.begin(), s.imaginary.end(), static_cast<int>(i));
    if (rs.positive[i] && !imag && !rs.positive[s.perm[i]])
      fail(ErrorCode::UnsupportedRealForm, "positive system is not a sigma-order");
  }
  return s;
}

/// Reason string when the form is outside the computed scan, else nullopt.
inline std::optional<std::string> excluded_reason(const RootSystem& rs, const RealFormSpec& f) {
  if (f.family == FormFamily::SO && rs.type == RootType::D && f.p == 1)
    return "so(1,2n-1) has a single conjugacy class of Cartan subalgebras, so no real roots";
  return std::nullopt;
}

inline SigmaInvolution sigma_for(const RootSystem& rs, const RealFormSpec& f) {
  using namespace detail;
  if (auto why = excluded_reason(rs, f)) fail(ErrorCode::UnsupportedRealForm, *why);
  const int n = rs.rank;
  const int dim = rs.ambient_dim;
  auto bad = [&] { fail(ErrorCode::UnsupportedRealForm, f.name(rs) + " is not a real form of " + rs.label()); };
  switch (f.family) {
    case FormFamily::Split: {
      SimpleTable t;
      for (int j = 1; j <= n; ++j) t.push_back(combo(n, {{j, 1}}));
      return sigma_from_table(rs, t);
    }
    case FormFamily::SU: {
      if (rs.type != RootType::A || f.p < 1 || f.p > f.q || f.p + f.q != n + 1) bad();
      AmbientMap m = ambient_identity(dim);
      for (int k = 1; k <= n + 1; ++k) {
        m.sign[k - 1] = -1;
        if (k <= f.p || k >= f.q + 1) m.target[k - 1] = n + 2 - k - 1;
      }
      return sigma_from_table(rs, table_from_ambient(rs, m));
    }
    case FormFamily::SO: {
      const bool b = rs.type == RootType::B && f.p + f.q == 2 * n + 1;
      const bool d = rs.type == RootType::D && f.p + f.q == 2 * n;
      if (!(b || d) || f.p < 1 || f.p > f.q) bad();
      AmbientMap m = ambient_identity(dim);
      for (int k = f.p; k < n; ++k) m.sign[k] = -1;
      return sigma_from_table(rs, table_from_ambient(rs, m));
    }
    case FormFamily::SP: {
      if (rs.type != RootType::C || f.p < 1 || f.p > f.q || f.p + f.q != n) bad();
      AmbientMap m = ambient_identity(dim);
      swap_pairs(m, f.p);
      for (int k = 2 * f.p; k < n; ++k) m.sign[k] = -1;
      return sigma_from_table(rs, table_from_ambient(rs, m));
    }
    case FormFamily::SOStar: {
      if (rs.type != RootType::D) bad();
      AmbientMap m = ambient_identity(dim);
      swap_pairs(m, n / 2);
      if (n % 2 == 1) m.sign[n - 1] = -1;
      return sigma_from_table(rs, table_from_ambient(rs, m));
    }
    case FormFamily::EII:
    case FormFamily::EIII:
      if (rs.type != RootType::E6) bad();
      return sigma_from_table(rs, exceptional_table(f.family, n));
    case FormFamily::EVI:
    case FormFamily::EVII:
      if (rs.type != RootType::E7) bad();
      return sigma_from_table(rs, exceptional_table(f.family, n));
    case FormFamily::FII: {
      if (rs.type != RootType::F4) bad();
      SigmaInvolution s = sigma_from_table(rs, exceptional_table(f.family, n));
      // cross-check against the ambient description e1 -> e1, e_k -> -e_k
      AmbientMap m = ambient_identity(dim);
      for (int k = 1; k < 4; ++k) m.sign[k] = -1;
      if (table_from_ambient(rs, m) != exceptional_table(f.family, n))
        fail(ErrorCode::UnsupportedRealForm, "FII table disagrees with its ambient form");
      return s;
    }
  }
  fail(ErrorCode::UnsupportedRealForm, "unknown real form family");
}

/// Gamma^n ∩ sigma(Gamma^n), as root indices.
inline std::vector<int> codim_witness(const RootSystem& rs, const SigmaInvolution& s,
                                      const ParabolicSubset& p) {
  std::vector<bool> in_n(rs.roots.size(), false);
  for (int i : p.nilradical) in_n[i] = true;
  std::vector<int> out;
  for (int i : p.nilradical)
    if (in_n[s.perm[i]]) out.push_back(i);
  return out;
}

inline int minimal_orbit_codim(const RootSystem& rs, const SigmaInvolution& s, const ParabolicSubset& p) {
  return static_cast<int>(codim_witness(rs, s, p).size());
}

// ---- classification scan --------------------------------------------------------

struct ClassificationRecord {
  std::string type_label;
  int rank = 0;
  std::string real_form;
  std::vector<int> gamma;     // 1-based indices in Gamma
  std::vector<int> removed;   // 1-based indices of Pi \ Gamma
  int codim = 0;
  bool is_hypersurface = false;
  std::vector<std::string> witness;
  std::string manifold_name;
  std::string family;
  std::string status = "computed";
  std::string citation;
};

struct ScanEntry {
  RootType type;
  int rank;
  RealFormSpec form;
};

/// Names the manifold G/Q_Gamma for the cases that turn up as hypersurface hits.
inline std::pair<std::string, std::string> describe_hit(const RootSystem& rs, const RealFormSpec& f,
                                                        const std::vector<int>& removed) {
  const int n = rs.rank;
  auto s = [](int k) { return std::to_string(k); };
  if (removed.size() != 1) {
    if (rs.type == RootType::A && n == 1) return {"P_1", "SL(2,R) acting on P_1"};
    return {"G/Q", "unclassified"};
  }
  const int k = removed[0];
  switch (f.family) {
    case FormFamily::Split:
      if (rs.type == RootType::A && n == 1) return {"P_1", "SL(2,R) acting on P_1"};
      break;
    case FormFamily::SU:
      if (k == 1 || k == n) {
        if (f.p == 1) return {"P_" + s(n), "SU(1,n) acting on Gr_k(C^{n+1})"};
        return {"P_" + s(n), "SU(p,q) acting on P_{p+q-1}"};
      }
      return {"Gr_" + s(k) + "(C^" + s(n + 1) + ")", "SU(1,n) acting on Gr_k(C^{n+1})"};
    case FormFamily::SP:
      return {"P_" + s(2 * n - 1), "Sp(p,q) acting on P_{2(p+q)-1}"};
    case FormFamily::SOStar:
      if (k == 1) return {"Q_" + s(2 * n - 2), "SO*(2n) acting on Q_{2n-2}"};
      return {"Q_" + s(2 * n - 2) + " (triality image)", "SO*(8) = SO(6,2) acting on Q_6"};
    case FormFamily::SO:
      if (rs.type == RootType::B) return {"IGr_" + s(n) + "(C^" + s(2 * n + 1) + ")", "SO(1,2n) acting on IGr_n(C^{2n+1})"};
      return {"IGr_" + s(n) + "(C^" + s(2 * n) + ")^0", "SO(2,2n) acting on IGr_{n+1}(C^{2n+2})^0"};
    default: break;
  }
  return {"G/Q", "unclassified"};
}

/// Real forms scanned for one root system, in output order.
inline std::vector<RealFormSpec> forms_for(RootType t, int n) {
  std::vector<RealFormSpec> out;
  switch (t) {
    case RootType::A:
      if (n >= 2)
        for (int p = 1; 2 * p <= n + 1; ++p) out.push_back({FormFamily::SU, p, n + 1 - p});
      break;
    case RootType::B:
      for (int p = 1; p < n; ++p) out.push_back({FormFamily::SO, p, 2 * n + 1 - p});
      break;
    case RootType::C:
      for (int p = 1; 2 * p <= n; ++p) out.push_back({FormFamily::SP, p, n - p});
      break;
    case RootType::D:
      out.push_back({FormFamily::SOStar, 0, 0});
      for (int p = 2; p < n; ++p) out.push_back({FormFamily::SO, p, 2 * n - p});
      break;
    case RootType::E6:
      out.push_back({FormFamily::EII, 0, 0});
      out.push_back({FormFamily::EIII, 0, 0});
      break;
    case RootType::E7:
      out.push_back({FormFamily::EVI, 0, 0});
      out.push_back({FormFamily::EVII, 0, 0});
      break;
    case RootType::F4:
      out.push_back({FormFamily::FII, 0, 0});
      break;
    case RootType::G2: break;
  }
  out.push_back({FormFamily::Split, 0, 0});
  return out;
}

/// Forms that are recorded but not scanned, with the reason.
inline std::vector<ClassificationRecord> excluded_records(int max_rank) {
  std::vector<ClassificationRecord> out;
  auto add = [&](std::string type, int rank, std::string form, std::string why) {
    ClassificationRecord r;
    r.type_label = std::move(type);
    r.rank = rank;
    r.real_form = std::move(form);
    r.status = "excluded_with_citation";
    r.citation = std::move(why);
    out.push_back(std::move(r));
  };
  for (int n = 3; n <= max_rank; n += 2)
    add("A" + std::to_string(n), n, "sl(" + std::to_string((n + 1) / 2) + ",H)",
        "sl(m,H) has only one conjugacy class of Cartan subalgebras");
  for (int n = 4; n <= max_rank; ++n)
    add("D" + std::to_string(n), n, "so(1," + std::to_string(2 * n - 1) + ")",
        "so(1,2n-1) has only one conjugacy class of Cartan subalgebras");
  add("E6", 6, "EIV", "involution not tabulated in this library");
  if (max_rank >= 8) {
    add("E8", 8, "EVIII", "no real form of E8 has a compact hypersurface orbit in any E8-homogeneous rational manifold");
    add("E8", 8, "EIX", "no real form of E8 has a compact hypersurface orbit in any E8-homogeneous rational manifold");
  }
  add("G2", 2, "nonsplit", "the only non-compact real form of G2 is split");
  return out;
}

inline std::vector<ScanEntry> scan_entries(int max_rank) {
  std::vector<ScanEntry> entries;
  entries.push_back({RootType::A, 1, {FormFamily::Split, 0, 0}});
  for (int n = 2; n <= max_rank; ++n)
    for (auto f : forms_for(RootType::A, n)) entries.push_back({RootType::A, n, f});
  for (int n = 2; n <= max_rank; ++n)
    for (auto f : forms_for(RootType::B, n)) entries.push_back({RootType::B, n, f});
  for (int n = 2; n <= max_rank; ++n)
    for (auto f : forms_for(RootType::C, n)) entries.push_back({RootType::C, n, f});
  for (int n = 4; n <= max_rank; ++n)
    for (auto f : forms_for(RootType::D, n)) entries.push_back({RootType::D, n, f});
  const std::pair<RootType, int> exc[] = {{RootType::E6, 6}, {RootType::E7, 7}, {RootType::F4, 4}, {RootType::G2, 2}};
  for (auto [t, r] : exc)
    if (r <= max_rank)
      for (auto f : forms_for(t, r)) entries.push_back({t, r, f});
  return entries;
}

/// Every (form, Gamma) record for one scan entry, Gamma ordered by bitmask.
inline std::vector<ClassificationRecord> scan_form(const ScanEntry& e) {
  const RootSystem rs = build_root_system(e.type, e.rank);
  const SigmaInvolution sigma = sigma_for(rs, e.form);
  std::vector<ClassificationRecord> out;
  for (unsigned mask = 0; mask < (1u << rs.rank); ++mask) {
    std::vector<int> gamma, removed;
    for (int k = 0; k < rs.rank; ++k) (mask >> k & 1 ? gamma : removed).push_back(k);
    const ParabolicSubset p = parabolic(rs, gamma);
    const auto wit = codim_witness(rs, sigma, p);
    ClassificationRecord r;
    r.type_label = rs.label();
    r.rank = rs.rank;
    r.real_form = e.form.name(rs);
    for (int g : gamma) r.gamma.push_back(g + 1);
    for (int g : removed) r.removed.push_back(g + 1);
    r.codim = static_cast<int>(wit.size());
    r.is_hypersurface = r.codim == 1;
    for (int i : wit) r.witness.push_back(format_root(rs.roots[i]));
    if (r.is_hypersurface) std::tie(r.manifold_name, r.family) = describe_hit(rs, e.form, r.removed);
    out.push_back(std::move(r));
  }
  return out;
}

/// Exhaustive scan over all Gamma for every supported form of rank <= max_rank.
inline std::vector<ClassificationRecord> classify_all(int max_rank) {
  if (max_rank < 2) fail(ErrorCode::InvalidArgument, "classify needs max_rank >= 2");
  const auto entries = scan_entries(max_rank);
  auto per = parallel_map<std::vector<ClassificationRecord>>(entries.size(), [&](std::size_t i) { return scan_form(entries[i]); });
  std::vector<ClassificationRecord> out;
  for (auto& v : per)
    for (auto& r : v) out.push_back(std::move(r));
  for (auto& r : excluded_records(max_rank)) out.push_back(std::move(r));
  return out;
}

inline nlohmann::json to_json(const ClassificationRecord& r) {
  nlohmann::json j{{"type", r.type_label}, {"rank", r.rank}, {"real_form", r.real_form}, {"status", r.status}};
  if (r.status == "computed") {
    j["gamma"] = r.gamma;
    j["removed"] = r.removed;
    j["codim"] = r.codim;
    j["is_hypersurface"] = r.is_hypersurface;
    j["witness"] = r.witness;
    if (r.is_hypersurface) {
      j["manifold"] = r.manifold_name;
      j["family"] = r.family;
    }
  } else {
    j["citation"] = r.citation;
  }
  return j;
}

}  // namespace schottky
