#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "schottky/cli.hpp"

using namespace schottky;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code = 0;
  std::string out, err;
};

Captured invoke(const RunConfig& c) {
  std::ostringstream o, e;
  Captured r;
  r.code = run(c, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "schottky_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

RunConfig construct_cfg(const std::string& model, std::uint64_t seed) {
  RunConfig c;
  c.command = "construct";
  c.model = model;
  c.seed = seed;
  c.seed_given = true;
  return c;
}

std::string saved_group(const std::string& model, std::uint64_t seed) {
  auto c = construct_cfg(model, seed);
  c.out = scratch(model.substr(0, model.find(':')) + "_" + std::to_string(seed) + ".json").string();
  EXPECT_EQ(invoke(c).code, 0);
  return c.out;
}

}  // namespace

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::CertificateFailed), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::ParityObstruction), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::SeparationFailure), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::Io), 1);
  EXPECT_EQ(exit_code_for(ErrorCode::InvalidArgument), 1);
}

TEST(Construct, HeaderAndHashAreStable) {
  const auto a = invoke(construct_cfg("P:1", 7)), b = invoke(construct_cfg("P:1", 7));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(a.err.empty());
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["header"]["seed"], 7);
  EXPECT_EQ(j["header"]["tool_version"], kToolVersion);
  EXPECT_EQ(j["group_hash"].get<std::string>().size(), 16u);
  EXPECT_EQ(j["group_hash"], group_hash(group_from_json(j)));
}

TEST(Construct, ParityObstructionIsOneLineAndNoArtifact) {
  auto c = construct_cfg("Qeven:3", 1);
  c.out = scratch("never.json").string();
  fs::remove(c.out);
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("error PARITY_OBSTRUCTION: ", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_FALSE(fs::exists(c.out));
  EXPECT_FALSE(fs::exists(c.out + ".tmp"));
}

TEST(Construct, BadArguments) {
  auto c = construct_cfg("X:1", 1);
  EXPECT_EQ(invoke(c).code, 1);
  c = construct_cfg("P:1", 1);
  c.format = "yaml";
  EXPECT_EQ(invoke(c).err.rfind("error INVALID_ARGUMENT", 0), 0u);
  c = construct_cfg("P:1", 1);
  c.tol.rank_rel = 0;
  EXPECT_EQ(invoke(c).code, 1);
  c = construct_cfg("P:1", 1);
  c.strategy = "mobius-on-sphere";
  EXPECT_EQ(invoke(c).code, 1);
}

TEST(Certify, PassAndTable) {
  RunConfig c;
  c.command = "certify";
  c.group = saved_group("P:1", 11);
  c.samples = 300;
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["certificate"]["verdict"], "pass");
  EXPECT_EQ(j["header"]["seed"], 11);
  c.format = "table";
  EXPECT_NE(invoke(c).out.find("ping_pong_inclusion"), std::string::npos);
}

TEST(Certify, WeakenedGroupExitsTwo) {
  const auto path = saved_group("P:1", 12);
  auto j = read_json_file(path);
  // |lambda| must match eps, so shrink both consistently past what the
  // calibration allowed
  const double e = 0.4;
  j["eps"][0] = e;
  j["lambda"][0] = {{"re", (1 - e) / e}, {"im", 0.0}};
  const auto bad = scratch("weak.json").string();
  write_atomic(bad, j.dump());
  RunConfig c;
  c.command = "certify";
  c.group = bad;
  c.samples = 300;
  const auto r = invoke(c);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error CERTIFICATE_FAILED", 0), 0u);
}

TEST(Io, MissingAndMalformedGroup) {
  RunConfig c;
  c.command = "invariants";
  c.group = scratch("missing.json").string();
  fs::remove(c.group);
  auto r = invoke(c);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error IO_ERROR", 0), 0u);
  write_atomic(c.group, "{not json");
  r = invoke(c);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error INVALID_ARGUMENT", 0), 0u);
  fs::remove(c.group);
}

TEST(Invariants, ReportKeys) {
  RunConfig c;
  c.command = "invariants";
  c.group = saved_group("P:1", 11);
  const auto j = nlohmann::json::parse(invoke(c).out)["invariants"];
  for (const char* k : {"dim_g_fixed", "kuranishi_dim", "zariski_dim", "algebraic_dim_estimate", "picard", "pi1",
                        "kaehler", "provenance"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["picard"], kOutsideHypotheses);
}

TEST(Limitset, CsvShapeAndHash) {
  RunConfig c;
  c.command = "limitset";
  c.group = saved_group("IGr:2", 4);
  c.depth = 2;
  c.format = "csv";
  c.csv = scratch("lim.csv").string();
  const auto r = invoke(c);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "word,base,s0,s1,s2,s3,s4");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12 * 4);
  std::ifstream f(c.csv);
  std::stringstream disk;
  disk << f.rdbuf();
  EXPECT_EQ(disk.str(), r.out);
}

TEST(Classify, TableAndJson) {
  RunConfig c;
  c.command = "classify";
  c.max_rank = 4;
  const auto j = nlohmann::json::parse(invoke(c).out);
  EXPECT_EQ(j["max_rank"], 4);
  EXPECT_GT(j["hypersurface_orbits"].size(), 0u);
  for (const auto& r : j["hypersurface_orbits"]) EXPECT_LE(r["rank"].get<int>(), 4);
  c.format = "table";
  EXPECT_FALSE(invoke(c).out.empty());
}

TEST(Dispatch, UnknownCommand) {
  RunConfig c;
  c.command = "frobnicate";
  EXPECT_EQ(invoke(c).code, 1);
}
