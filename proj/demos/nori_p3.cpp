// Builds a rank-2 Schottky group on P_3, certifies it and prints the
// certificate as a table.
#include <iostream>

#include "schottky/cli.hpp"

int main(int argc, char** argv) {
  using namespace schottky;
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 1;
  const auto g = construct_group(make_model(Variant::ProjOdd, 1), 2, seed);
  std::cout << g.model.label() << ", r = 2, eps = " << g.eps[0] << ", |lambda| = " << std::abs(g.lambda[0]) << "\n";
  const auto cert = certify_ping_pong(g);
  std::cout << detail::certificate_table(cert);
  return cert.pass ? 0 : 2;
}
