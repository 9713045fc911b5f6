// Limit-set point cloud for a Schottky group on IGr_2(C^5), projected to the
// sphere S^4 by the twistor map. Writes CSV to stdout.
#include <iostream>

#include "schottky/cli.hpp"

int main(int argc, char** argv) {
  using namespace schottky;
  RunConfig cfg;
  cfg.command = "construct";
  cfg.model = "IGr:2";
  cfg.seed = 3;
  cfg.strategy = "mobius-on-sphere";
  cfg.subsphere = 2;
  const auto g = group_from_json(run_construct(cfg).doc);
  RunConfig lim;
  lim.depth = argc > 1 ? std::stoi(argv[1]) : 4;
  lim.format = "csv";
  const std::string path = "limit_cloud_group.json";
  write_atomic(path, to_json(g).dump());
  lim.group = path;
  std::cout << run_limitset(lim).text;
}
