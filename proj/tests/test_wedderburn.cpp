#include <gtest/gtest.h>

#include "test_support.hpp"

namespace wedderburn_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;

int sum_of_squares(const std::vector<int>& dims) {
  int s = 0;
  for (int d : dims) s += d * d;
  return s;
}

void expect_matrix_units(const Wedderburn& w) {
  for (const auto& b : w.blocks()) {
    for (int p = 0; p < b.dim; ++p)
      for (int q = 0; q < b.dim; ++q)
        for (int r = 0; r < b.dim; ++r)
          for (int s = 0; s < b.dim; ++s) {
            const Element lhs = b.unit(p, q) * b.unit(r, s);
            const Element rhs = q == r ? b.unit(p, s) : Element::zero(w.ambient());
            EXPECT_LE(cstar_norm(lhs - rhs), 1e-9);
          }
    EXPECT_LE(cstar_norm(b.unit(0, 1 % b.dim).adjoint() - b.unit(1 % b.dim, 0)), 1e-9);
  }
}

TEST(Wedderburn, FullMatrixIsOneBlock) {
  const Wedderburn w = wedderburn_decompose(Subalgebra::whole(MultiMatrixAlgebra::full_matrix(2)));
  ASSERT_EQ(w.dims(), std::vector<int>({2}));
  EXPECT_NEAR(w.trace_vector()[0], 0.5, 1e-12);
  expect_matrix_units(w);
}

TEST(Wedderburn, DiagonalIsAbelian) {
  const Wedderburn w = wedderburn_decompose(pt::diag_in_matrix(3));
  EXPECT_EQ(w.dims(), std::vector<int>({1, 1, 1}));
  for (double t : w.trace_vector()) EXPECT_NEAR(t, 1.0 / 3.0, 1e-12);
}

TEST(Wedderburn, CommutantOfMatrixInDoubledMatrix) {
  // M2 inside M2 (x) 1_2 in M4: the commutant is 1_2 (x) M2.
  const Subalgebra n = pt::markov_inclusion({2}, {4}, {{2}});
  const Subalgebra c = relative_commutant(n);
  const Wedderburn w = wedderburn_decompose(c);
  EXPECT_EQ(w.dims(), std::vector<int>({2}));
  EXPECT_EQ(c.dimension(), 4u);
  // The joined algebra N v (N'∩M) is all of M4.
  EXPECT_EQ(join(n, c).dimension(), 16u);
}

TEST(Wedderburn, BlocksOfCommutantExample) {
  // C^2 in M2 + M2 with Lambda = [[1,1],[1,1]]: the commutant is the diagonal of each block.
  const Subalgebra n = pt::markov_inclusion({1, 1}, {2, 2}, {{1, 1}, {1, 1}});
  const Wedderburn w = wedderburn_decompose(relative_commutant(n));
  std::vector<int> dims = w.dims();
  std::sort(dims.begin(), dims.end());
  EXPECT_EQ(dims, std::vector<int>({1, 1, 1, 1}));
  const Wedderburn wm = wedderburn_decompose(Subalgebra::whole(n.ambient()));
  EXPECT_EQ(wm.dims(), std::vector<int>({2, 2}));
}

TEST(WedderburnProperty, DimensionCountAndRoundtrip) {
  const std::vector<Subalgebra> cases = {
      pt::diag_in_matrix(2), pt::markov_inclusion({1}, {1, 2}, {{1, 2}}), pt::markov_inclusion({1, 1}, {3}, {{1}, {2}}),
      pt::markov_inclusion({2}, {2, 2}, {{1, 1}}), Subalgebra::whole(pt::algebra({1, 2}, {0.2, 0.4}))};
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (const auto& n : cases) {
      const Wedderburn w = wedderburn_decompose(n, seed);
      EXPECT_EQ(static_cast<std::size_t>(sum_of_squares(w.dims())), n.dimension());
      expect_matrix_units(w);
      Rng rng(seed);
      const Element x = random_element(n, rng);
      EXPECT_LE(cstar_norm(w.from_abstract(w.to_abstract(x)) - x), 1e-9);
      Element units_sum = Element::zero(n.ambient());
      for (const auto& b : w.blocks()) units_sum += b.central;
      EXPECT_LE(cstar_norm(units_sum - Element::identity(n.ambient())), 1e-9);
    }
  }
}

TEST(Wedderburn, SameOutputForAnySeed) {
  const Subalgebra n = pt::markov_inclusion({1, 1}, {3}, {{1}, {2}});
  const Wedderburn a = wedderburn_decompose(n, 1);
  const Wedderburn b = wedderburn_decompose(n, 99);
  EXPECT_EQ(a.dims(), b.dims());
  for (std::size_t i = 0; i < a.trace_vector().size(); ++i)
    EXPECT_NEAR(a.trace_vector()[i], b.trace_vector()[i], 1e-12);
}

TEST(Center, Examples) {
  EXPECT_EQ(center(Subalgebra::whole(MultiMatrixAlgebra::full_matrix(3))).dimension(), 1u);
  EXPECT_EQ(center(pt::diag_in_matrix(3)).dimension(), 3u);
  EXPECT_EQ(center(Subalgebra::whole(pt::algebra({1, 2, 2}, {0.2, 0.1, 0.3}))).dimension(), 3u);
}

TEST(InclusionMatrix, ReadsMultiplicities) {
  const Wedderburn w = wedderburn_decompose(pt::markov_inclusion({1, 1}, {3}, {{1}, {2}}));
  auto lambda = inclusion_matrix(w);
  std::sort(lambda.begin(), lambda.end());
  EXPECT_EQ(lambda, (std::vector<std::vector<int>>{{1}, {2}}));
}

}  // namespace wedderburn_test
