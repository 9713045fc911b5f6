// P_3 = P(C^{2x2}) with the group acting by left multiplication: the right
// SL(2) action commutes with it and survives in the automorphisms of the
// quotient.
#include <iostream>

#include "schottky/invariants.hpp"

int main() {
  using namespace schottky;
  ConstructOptions opts;
  opts.moves.strategy = MoveStrategy::LeftFactor;
  const auto g = construct_group(make_model(Variant::ProjOdd, 1), 2, 5, opts);
  const auto fixed = fixed_subalgebra(g);
  std::cout << "dim g^Gamma       " << fixed.dim() << "\n";
  std::cout << "Kuranishi count   " << kuranishi_dimension(g.r, ambient_algebra_dim(g.model), fixed.dim()) << "\n";
  const auto rc = verify_rational_invariance(g, InvariantMap::RightCommutation, 200, 1);
  std::cout << "right-commutation " << rc.max_residual << "\n";
  const auto cert = certify_ping_pong(g);
  std::cout << "certificate       " << (cert.pass ? "pass" : "fail") << "\n";
}
