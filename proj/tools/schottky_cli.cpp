#include <CLI11.hpp>

#include "schottky/cli.hpp"

int main(int argc, char** argv) {
  schottky::RunConfig cfg;
  CLI::App app{"Schottky groups on homogeneous rational manifolds"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "64-bit seed")->each([&](const std::string&) { cfg.seed_given = true; });
    s->add_option("--out", cfg.out, "write the JSON artifact here");
    s->add_option("--format", cfg.format, "json | table | csv")->check(CLI::IsMember({"json", "table", "csv"}));
    s->add_option("--rank-tol", cfg.tol.rank_rel, "relative rank cutoff");
    s->add_option("--orth-tol", cfg.tol.orth, "orthonormality tolerance");
    s->add_option("--margin", cfg.tol.cert_margin, "certificate margin");
  };

  auto* classify = app.add_subcommand("classify", "compact hypersurface orbits in flag manifolds");
  common(classify);
  classify->add_option("--max-rank", cfg.max_rank)->check(CLI::Range(2, 8));
  classify->add_flag("--all", cfg.all_records, "include every scanned record");

  auto* construct = app.add_subcommand("construct", "build a Schottky group");
  common(construct);
  construct->add_option("--model", cfg.model, "P:n | Qeven:n | Qodd:n | IGr:n")->required();
  construct->add_option("--rank", cfg.rank)->check(CLI::Range(1, 16));
  construct->add_option("--strategy", cfg.strategy, "generic-matrix | mobius-on-sphere | left-factor");
  construct->add_option("--subsphere", cfg.subsphere, "sphere dimension for mobius-on-sphere moves");

  auto* certify = app.add_subcommand("certify", "sampled ping-pong certificate");
  common(certify);
  certify->add_option("--group", cfg.group)->required();
  certify->add_option("--samples", cfg.samples)->check(CLI::Range(1, 10000000));
  certify->add_option("--max-word-len", cfg.max_word_len)->check(CLI::Range(1, 8));

  auto* invariants = app.add_subcommand("invariants", "fixed subalgebra, Kuranishi count, orbit codimension");
  common(invariants);
  invariants->add_option("--group", cfg.group)->required();
  invariants->add_option("--samples", cfg.orbit_samples, "orbit-rank sample points")->check(CLI::Range(20, 100000));

  auto* limitset = app.add_subcommand("limitset", "point cloud near the limit set");
  common(limitset);
  limitset->add_option("--group", cfg.group)->required();
  limitset->add_option("--depth", cfg.depth)->check(CLI::Range(0, 12));
  limitset->add_option("--csv", cfg.csv, "write points as CSV");

  auto* report = app.add_subcommand("report", "certificate and invariants together");
  common(report);
  report->add_option("--group", cfg.group)->required();
  report->add_option("--samples", cfg.samples)->check(CLI::Range(1, 10000000));
  report->add_option("--max-word-len", cfg.max_word_len)->check(CLI::Range(1, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error INVALID_ARGUMENT: " << e.what() << "\n";
    return 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return schottky::run(cfg);
}
