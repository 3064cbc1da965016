// Regular inclusion C^3 ⊆ C^3 ⋊ Z3 = M3: normalizers, cosets and a patched basis.

#include <iostream>

#include "ppbasis/ppbasis.hpp"

using namespace ppbasis;

int main() {
  const CrossedProductModel cp = cyclic_shift_model(3);
  const WeylReport report = regular_pipeline(cp.inclusion.N, cp.inclusion.candidates);
  std::cout << report.text();
  return report.ok() ? 0 : 1;
}
