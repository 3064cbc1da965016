// Markov trace, basic construction and a Pimsner-Popa basis for C ⊆ C + M2.

#include <iostream>

#include "ppbasis/ppbasis.hpp"

using namespace ppbasis;

int main() {
  const IntMatrix lambda = {{1, 2}};
  const MarkovData md = markov_trace(lambda, {1});
  std::cout << "beta = " << md.beta << ", t1 = (" << md.t1[0] << ", " << md.t1[1] << ")\n";

  const auto m = std::make_shared<const MultiMatrixAlgebra>(std::vector<int>{1, 2}, md.t1);
  const Subalgebra n = UnitalEmbedding({1}, m, lambda).image();
  const auto bc = std::make_shared<const BasicConstruction>(n);
  std::cout << "dim L2(M) = " << bc->dimension() << ", M1 blocks:";
  for (int d : bc->M1_structure().dims()) std::cout << " " << d;
  std::cout << "\n";

  const PPSystem basis = construct_system_with_support(bc, bc->identity(), ConstructionMode::Orthogonal, 1);
  std::cout << "basis of size " << basis.size() << ", orthogonal: " << basis.is_orthogonal()
            << ", support residual " << basis.report(Side::Right).support_to_identity << "\n";

  const WatataniIndex w = watatani_index(basis);
  std::cout << "sum l l* is scalar: " << w.scalar << " (value " << w.scalar_value << ")\n";
  return w.scalar ? 0 : 1;
}
