// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "group_oracle.hpp"
#include "schottky/invariants.hpp"
#include "schottky/satake.hpp"

using namespace schottky;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream note;
  std::string failures;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += "; failed: " + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SchottkyGroup build(const std::string& model, int r, std::uint64_t seed,
                    MoveStrategy s = MoveStrategy::GenericMatrix, int subsphere = 0) {
  ConstructOptions o;
  o.moves.strategy = s;
  o.moves.subsphere_m = subsphere;
  return construct_group(parse_model(model), r, seed, o);
}

// ---- 1 ----
Verdict classification_golden() {
  Verdict v;
  using Key = std::tuple<std::string, std::string, std::vector<int>>;
  std::ifstream f(std::string(SCHOTTKY_DATA_DIR) + "/hypersurface_orbits.json");
  v.require(f.good(), "golden file readable");
  if (!f.good()) return v;
  const auto golden = nlohmann::json::parse(f);
  std::map<Key, std::string> want;
  for (const auto& r : golden.at("hypersurface_orbits"))
    want[{r.at("type"), r.at("real_form"), r.at("removed").get<std::vector<int>>()}] = r.at("manifold");
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = classify_all(8);
  const double secs = seconds_since(t0);
  std::map<Key, std::string> got;
  for (const auto& r : recs)
    if (r.status == "computed" && r.is_hypersurface) got[{r.type_label, r.real_form, r.removed}] = r.manifold_name;
  v.require(got == want, "hypersurface records equal the golden table");
  v.require(secs < 10, "runtime < 10 s");
  v.note << got.size() << " hypersurface records, " << recs.size() << " scanned, " << secs << " s";
  return v;
}

// ---- 2 ----
std::vector<std::string> witness(const RootSystem& rs, const RealFormSpec& f, std::vector<int> removed) {
  const auto p = parabolic(rs, complement_of(rs, removed));
  std::vector<std::string> out;
  for (int i : codim_witness(rs, sigma_for(rs, f), p)) out.push_back(format_root(rs.roots[i]));
  return out;
}

Verdict codim_spot_values() {
  Verdict v;
  using S = std::vector<std::string>;
  v.require(witness(build_root_system(RootType::A, 3), {FormFamily::SU, 2, 2}, {0}) == S{"e1-e4"}, "A3 su(2,2)");
  int cases = 1;
  for (int n = 2; n <= 8; ++n) {
    const auto cn = build_root_system(RootType::C, n);
    for (int p = 1; 2 * p <= n; ++p, ++cases)
      v.require(witness(cn, {FormFamily::SP, p, n - p}, {0}) == S{"e1+e2"}, "C" + std::to_string(n) + " sp");
    v.require(witness(build_root_system(RootType::B, n), {FormFamily::SO, 1, 2 * n}, {n - 1}) == S{"e1"},
              "B" + std::to_string(n) + " so(1,2n)");
    ++cases;
  }
  const auto e6 = build_root_system(RootType::E6, 6);
  for (int k = 0; k < 6; ++k, ++cases)
    v.require(witness(e6, {FormFamily::EIII, 0, 0}, {k}).size() >= 2, "E6 EIII node " + std::to_string(k + 1));
  v.note << cases << " exact cases";
  return v;
}

// ---- 3 ----
Verdict phi_equivariance() {
  Verdict v;
  double worst = 0;
  for (const char* spec : {"P:1", "Qeven:4", "Qodd:3", "IGr:2"}) {
    const auto m = parse_model(spec);
    for (int i = 0; i < 1000; ++i) {
      auto rng = stream_for(2024, i, m.ambient_dim());
      const ModelPoint x = random_point(m, rng);
      const double t = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
      const cplx lam = std::polar(t, std::uniform_real_distribution<double>(-M_PI, M_PI)(rng));
      worst = std::max(worst, std::abs(phi(m, apply(m, g_lambda(m, lam), x)) - phi_flow(phi(m, x), t)));
    }
  }
  v.require(worst < 1e-10, "residual < 1e-10");
  const double b = phi_flow(0.25, 3.0);
  v.require(std::abs(b - 0.75) <= 1e-15, "boundary value 3/4");
  v.note << "max residual " << worst << " over 4000 samples, boundary " << b;
  return v;
}

// ---- 4 ----
Verdict certification() {
  Verdict v;
  double slowest = 0;
  int passed = 0, total = 0;
  for (const char* spec : {"P:1", "P:3", "Qeven:4", "Qodd:3", "IGr:2"})
    for (int r : {2, 3}) {
      ++total;
      const auto t0 = std::chrono::steady_clock::now();
      const auto g = build(spec, r, 1);
      CertifyOptions o;
      o.samples = 2000;
      o.max_word_len = 4;
      Tolerances tol;
      tol.cert_margin = 1e-3;
      const auto c = certify_ping_pong(g, o, tol);
      const double secs = seconds_since(t0);
      slowest = std::max(slowest, secs);
      const std::string tag = std::string(spec) + " r=" + std::to_string(r);
      v.require(c.pass, tag + " certificate" + (c.first_failure() ? " (" + c.first_failure()->name + ")" : ""));
      v.require(secs < 60, tag + " under 60 s");
      passed += c.pass;
    }
  v.note << passed << "/" << total << " groups certified, slowest " << slowest << " s";
  return v;
}

// ---- 5 ----
Verdict parity_obstruction() {
  Verdict v;
  int raised = 0, draws = 0, min_meet = 1 << 20;
  for (int n : {3, 5}) {
    const auto m = make_model(Variant::QuadricEven, n);
    MoveSearchOptions o;
    o.max_attempts = 1;  // any search would exhaust this at once
    try {
      find_moves(m, 2, 1, o);
    } catch (const Error& e) {
      raised += e.code() == ErrorCode::ParityObstruction;
    }
    const int N = m.ambient_dim();
    const auto c0 = schottky_pair_core(m).c0;
    for (int i = 0; i < 200; ++i, ++draws) {
      auto rng = stream_for(55, i, n);
      std::normal_distribution<double> nd;
      ComplexMatrix k = ComplexMatrix::Zero(N, N);
      for (int a = 0; a < N; ++a)
        for (int b = a + 1; b < N; ++b) {
          k(a, b) = cplx(nd(rng), nd(rng));
          k(b, a) = -k(a, b);
        }
      const ComplexMatrix x = form_matrix(m) * k, id = ComplexMatrix::Identity(N, N);
      const ComplexMatrix g = (id - x).inverse() * (id + x);  // Cayley: SO(S, C)
      min_meet = std::min(min_meet, intersect_dim(c0, span_of(g * c0.basis)));
    }
  }
  v.require(raised == 2, "ParityObstruction for n = 3, 5");
  v.require(min_meet >= 1, "every intersect_dim >= 1");
  v.note << "obstruction raised " << raised << "/2, min intersect_dim " << min_meet << " over " << draws << " draws";
  return v;
}

// ---- 6 ----
Verdict invariant_formulas() {
  Verdict v;
  const auto lf = build("P:1", 2, 3, MoveStrategy::LeftFactor);
  const int d_lf = fixed_subalgebra(lf).dim(), o_lf = oracle::fixed_dim(lf);
  const long k_lf = kuranishi_dimension(2, 15, d_lf);
  v.require(d_lf == 3 && o_lf == 3, "left-factor dim g^Gamma = 3");
  v.require(k_lf == 18, "left-factor Kuranishi 18");
  const auto gen = build("P:1", 2, 3);
  const int d_gen = fixed_subalgebra(gen).dim(), o_gen = oracle::fixed_dim(gen);
  const long k_gen = kuranishi_dimension(2, 15, d_gen);
  v.require(d_gen == o_gen, "generic kernel matches the quad oracle");
  v.require(d_gen == 0 && k_gen == 15, "generic r=2 gives 0 and 15");
  v.note << "left-factor " << d_lf << "/" << k_lf << " (oracle " << o_lf << "), generic r=2 " << d_gen << "/" << k_gen
         << " (oracle " << o_gen << ")";
  return v;
}

// ---- 7 ----
Verdict zariski_and_algebraic_dim() {
  Verdict v;
  const auto p5 = build("P:2", 2, 3, MoveStrategy::LeftFactor);
  const auto rep = topology_report(p5);
  const double minors = verify_rational_invariance(p5, InvariantMap::Minors, 500, 1).max_residual;
  v.require(rep.zariski_dim == 3, "P_5 zariski_dim 3");
  v.require(rep.orbit.codim == 2 && rep.orbit.codim >= 2, "P_5 generic orbit codim 2");
  v.require(minors < 1e-8, "minor invariance < 1e-8");
  const auto igr = build("IGr:2", 2, 3, MoveStrategy::MobiusOnSphere, 1);
  const auto ri = topology_report(igr);
  const int oracle_est = oracle::orbit_estimate(igr, 6, oracle::kFormRel);
  v.require(ri.zariski_dim <= 3, "circle subsphere zariski_dim <= 3");
  v.require(ri.algebraic_dim_estimate == oracle_est, "estimate matches the quad oracle");
  v.require(ri.algebraic_dim_estimate >= 1, "circle subsphere algebraic_dim_estimate >= 1");
  const auto igr3 = build("IGr:3", 2, 3, MoveStrategy::MobiusOnSphere, 1);
  v.note << "P_5 zariski " << rep.zariski_dim << " codim " << rep.orbit.codim << " minors " << minors
         << "; IGr_2 circle zariski " << ri.zariski_dim << " estimate " << ri.algebraic_dim_estimate << " (oracle "
         << oracle_est << "); IGr_3 circle estimate " << topology_report(igr3).algebraic_dim_estimate;
  return v;
}

// ---- 8 ----
Verdict topology_report_check() {
  Verdict v;
  const auto j = to_json(topology_report(build("P:3", 3, 3)));
  const nlohmann::json pic = {{"torus_rank", 3}, {"free_rank", 1}};
  v.require(j["picard"] == pic, "picard descriptor");
  v.require(j["h1_O_rank"] == 3, "h1(O) rank 3");
  v.require(j["h2_rank"] == 1, "h2 rank 1");
  v.require(j["pi1"] == "free of rank 3", "pi1 free of rank 3");
  v.require(j["kodaira"] == "-infinity", "kodaira -infinity");
  const auto p1 = to_json(topology_report(build("P:0", 2, 3)));
  v.require(p1["pi1"] == kLowCodim && p1["kaehler"] == kLowCodim, "P_1 low-codim guard");
  const auto p5 = to_json(topology_report(build("P:2", 2, 3)));
  v.require(p5["picard"] == kOutsideHypotheses && p5["h1_O_rank"] == kOutsideHypotheses &&
                p5["h2_rank"] == kOutsideHypotheses,
            "P_5 hypotheses guard");
  v.note << "P_7 r=3 picard " << j["picard"].dump() << ", P_1 pi1 '" << p1["pi1"].get<std::string>()
         << "', P_5 picard '" << p5["picard"].get<std::string>() << "'";
  return v;
}

// ---- 9 ----
Verdict word_counts() {
  Verdict v;
  int cases = 0;
  for (int r = 1; r <= 3; ++r)
    for (int l = 1; l <= 5; ++l, ++cases) {
      std::uint64_t formula = 2 * r;
      for (int k = 1; k < l; ++k) formula *= 2 * r - 1;
      const auto words = reduced_words(r, l);
      std::set<std::string> distinct;
      bool reduced = true;
      for (const auto& w : words) {
        distinct.insert(word_string(w));
        reduced = reduced && reduce_word(w) == w;
      }
      v.require(words.size() == formula && distinct.size() == formula && reduced &&
                    reduced_word_count(r, l) == formula,
                "r=" + std::to_string(r) + " l=" + std::to_string(l));
    }
  v.note << cases << " (r, l) pairs";
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"classification golden table", classification_golden},
      {"codimension spot values", codim_spot_values},
      {"phi equivariance", phi_equivariance},
      {"end-to-end certification", certification},
      {"parity obstruction", parity_obstruction},
      {"invariant formulas", invariant_formulas},
      {"zariski and algebraic dimension", zariski_and_algebraic_dim},
      {"topology report", topology_report_check},
      {"word combinatorics", word_counts},
  };
  int failed = 0, idx = 0;
  for (const auto& [name, fn] : criteria) {
    ++idx;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note << "exception: " << e.what();
    }
    failed += !v.pass;
    std::cout << "criterion " << idx << " " << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.note.str()
              << v.failures << std::endl;
  }
  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
