#pragma once

// Command-line driver. Every command produces one JSON artifact carrying a
// {tool_version, seed, tolerances} header; tables and CSV are projections.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "schottky/invariants.hpp"
#include "schottky/satake.hpp"

namespace schottky {

inline constexpr const char* kToolVersion = "0.3.1";

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  bool seed_given = false;
  Tolerances tol;
  std::string out;             // empty: stdout
  std::string format = "json";  // json | table | csv

  int max_rank = 8;
  bool all_records = false;

  std::string model;
  int rank = 2;
  std::string strategy = "generic-matrix";
  int subsphere = 0;

  std::string group;
  std::size_t samples = 2000;
  int max_word_len = 4;
  int orbit_samples = 24;
  int depth = 6;
  std::string csv;
};

/// 0 success, 1 I/O or malformed input, 2 certificate failure, 3 obstruction.
inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::CertificateFailed: return 2;
    case ErrorCode::ParityObstruction:
    case ErrorCode::MaxAttemptsExceeded:
    case ErrorCode::SeparationFailure: return 3;
    default: return 1;
  }
}

// FNV-1a over the canonical dump.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string group_hash(const SchottkyGroup& g) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(to_json(g).dump());
  return os.str();
}

inline nlohmann::json run_header(const RunConfig& c, std::uint64_t seed) {
  return {{"tool_version", kToolVersion},
          {"seed", seed},
          {"tolerances", {{"rank_rel", c.tol.rank_rel}, {"orth", c.tol.orth}, {"cert_margin", c.tol.cert_margin}}}};
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) fail(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot rename onto " + path);
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, "malformed JSON in " + path + ": " + e.what());
  }
}

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string classify_table(const std::vector<ClassificationRecord>& recs) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "type" << std::setw(14) << "real form" << std::setw(10) << "removed"
     << std::setw(24) << "manifold" << "witness\n";
  for (const auto& r : recs) {
    if (r.status != "computed") {
      os << std::setw(6) << r.type_label << std::setw(14) << r.real_form << "excluded: " << r.citation << "\n";
      continue;
    }
    std::string w;
    for (const auto& x : r.witness) w += (w.empty() ? "" : " ") + x;
    os << std::setw(6) << r.type_label << std::setw(14) << r.real_form << std::setw(10) << join_ints(r.removed)
       << std::setw(24) << r.manifold_name << w << "\n";
  }
  return os.str();
}

inline std::string certificate_table(const PingPongCertificate& c) {
  std::ostringstream os;
  os << "verdict " << (c.pass ? "pass" : "fail") << "  samples " << c.samples << "  max word length "
     << c.max_word_len << "\n";
  for (const auto& k : c.checks)
    os << "  " << std::left << std::setw(24) << k.name << (k.passed ? "ok    " : "FAIL  ") << std::setprecision(6)
       << k.value << " (bound " << k.threshold << ")\n";
  return os.str();
}

inline std::string flat_table(const nlohmann::json& j) {
  std::ostringstream os;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "provenance") continue;
    os << std::left << std::setw(24) << it.key() << it.value().dump() << "\n";
  }
  return os.str();
}

inline SchottkyGroup load_group(const RunConfig& c) {
  if (c.group.empty()) fail(ErrorCode::InvalidArgument, "--group is required");
  return group_from_json(read_json_file(c.group));
}

}  // namespace detail

struct RunOutput {
  nlohmann::json doc;  // the artifact
  std::string text;    // table/csv projection, if requested
  int status = 0;
};

inline RunOutput run_classify(const RunConfig& c) {
  RunOutput o;
  const auto recs = classify_all(c.max_rank);
  nlohmann::json hits = nlohmann::json::array(), excluded = nlohmann::json::array(), all = nlohmann::json::array();
  std::vector<ClassificationRecord> shown;
  for (const auto& r : recs) {
    if (r.status != "computed") {
      excluded.push_back(to_json(r));
      shown.push_back(r);
    } else if (r.is_hypersurface) {
      hits.push_back(to_json(r));
      shown.push_back(r);
    }
    if (c.all_records) all.push_back(to_json(r));
  }
  o.doc = {{"header", run_header(c, c.seed)},
           {"max_rank", c.max_rank},
           {"records_scanned", recs.size()},
           {"hypersurface_orbits", hits},
           {"excluded", excluded}};
  if (c.all_records) o.doc["records"] = all;
  if (c.format == "table") o.text = detail::classify_table(shown);
  return o;
}

inline RunOutput run_construct(const RunConfig& c) {
  RunOutput o;
  if (c.model.empty()) fail(ErrorCode::InvalidArgument, "--model is required");
  ConstructOptions opts;
  opts.moves.strategy = parse_strategy(c.strategy);
  opts.moves.subsphere_m = c.subsphere;
  const auto g = construct_group(parse_model(c.model), c.rank, c.seed, opts, c.tol);
  o.doc = to_json(g);
  o.doc["header"] = run_header(c, c.seed);
  o.doc["group_hash"] = group_hash(g);
  if (c.format == "table") {
    std::ostringstream os;
    os << g.model.label() << "  r=" << g.r << "  seed=" << g.seed << "  strategy=" << strategy_name(g.strategy)
       << "  eps=" << g.eps.front() << "  hash=" << group_hash(g) << "\n";
    o.text = os.str();
  }
  return o;
}

inline RunOutput run_certify(const RunConfig& c) {
  RunOutput o;
  const auto g = detail::load_group(c);
  CertifyOptions opts;
  opts.samples = c.samples;
  opts.max_word_len = c.max_word_len;
  const auto cert = certify_ping_pong(g, opts, c.tol);
  o.doc = {{"header", run_header(c, g.seed)}, {"group_hash", group_hash(g)}, {"certificate", to_json(cert)}};
  o.status = cert.pass ? 0 : 2;
  if (c.format == "table") o.text = detail::certificate_table(cert);
  return o;
}

inline RunOutput run_invariants(const RunConfig& c) {
  RunOutput o;
  const auto g = detail::load_group(c);
  const auto rep = topology_report(g, c.orbit_samples, c.tol);
  o.doc = {{"header", run_header(c, g.seed)}, {"group_hash", group_hash(g)}, {"invariants", to_json(rep)}};
  if (c.format == "table") o.text = detail::flat_table(to_json(rep));
  return o;
}

inline RunOutput run_limitset(const RunConfig& c) {
  RunOutput o;
  const auto g = detail::load_group(c);
  const std::uint64_t seed = c.seed_given ? c.seed : g.seed;
  const auto pts = limit_set_sample(g, c.depth, seed);
  // points are written as their twistor/sphere projection for IGr and as
  // normalized homogeneous coordinates otherwise
  std::ostringstream csv;
  csv << std::setprecision(17) << "word,base";
  const int N = g.model.ambient_dim();
  const bool igr = g.model.variant == Variant::IGr;
  const int dims = igr ? N - 1 : N;
  for (int k = 0; k < dims; ++k) csv << (igr ? ",s" : ",re") << k << (igr ? "" : ",im" + std::to_string(k));
  csv << "\n";
  for (const auto& p : pts) {
    csv << (p.word.empty() ? "e" : word_string(p.word)) << "," << p.base;
    if (igr) {
      const RealVector s = twistor_project(g.model, p.point);
      for (int k = 0; k < s.size(); ++k) csv << "," << s[k];
    } else {
      const ComplexVector v = canonical_vector(p.point.m.col(0));
      for (int k = 0; k < v.size(); ++k) csv << "," << v[k].real() << "," << v[k].imag();
    }
    csv << "\n";
  }
  o.doc = {{"header", run_header(c, seed)},
           {"group_hash", group_hash(g)},
           {"depth", c.depth},
           {"points", pts.size()},
           {"words", reduced_word_count(g.r, c.depth)}};
  if (!c.csv.empty()) {
    write_atomic(c.csv, csv.str());
    o.doc["csv"] = c.csv;
  }
  if (c.format == "csv") o.text = csv.str();
  return o;
}

inline RunOutput run_report(const RunConfig& c) {
  RunOutput o;
  const auto g = detail::load_group(c);
  CertifyOptions opts;
  opts.samples = c.samples;
  opts.max_word_len = c.max_word_len;
  const auto cert = certify_ping_pong(g, opts, c.tol);
  const auto rep = topology_report(g, c.orbit_samples, c.tol);
  o.doc = {{"header", run_header(c, g.seed)},
           {"group_hash", group_hash(g)},
           {"model", g.model.label()},
           {"r", g.r},
           {"eps", g.eps},
           {"certificate", to_json(cert)},
           {"invariants", to_json(rep)}};
  o.status = cert.pass ? 0 : 2;
  if (c.format == "table") o.text = detail::certificate_table(cert) + detail::flat_table(to_json(rep));
  return o;
}

inline RunOutput dispatch(const RunConfig& c) {
  c.tol.validate();
  if (c.format != "json" && c.format != "table" && c.format != "csv")
    fail(ErrorCode::InvalidArgument, "unknown format " + c.format);
  if (c.command == "classify") return run_classify(c);
  if (c.command == "construct") return run_construct(c);
  if (c.command == "certify") return run_certify(c);
  if (c.command == "invariants") return run_invariants(c);
  if (c.command == "limitset") return run_limitset(c);
  if (c.command == "report") return run_report(c);
  fail(ErrorCode::InvalidArgument, "unknown command " + c.command);
}

/// Runs one command. The JSON artifact goes to --out (atomically) or to
/// `out`; a table/csv projection, if requested, goes to `out`. Errors are a
/// single line "error <CODE>: message" on `err`.
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const RunOutput r = dispatch(c);
    const std::string doc = r.doc.dump(1) + "\n";
    if (!c.out.empty()) write_atomic(c.out, doc);
    if (!r.text.empty())
      out << r.text;
    else if (c.out.empty())
      out << doc;
    if (r.status == 2) err << "error " << to_string(ErrorCode::CertificateFailed) << ": certificate did not pass\n";
    return r.status;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    err << "error " << to_string(e.code()) << ": " << msg << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error INTERNAL: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace schottky
