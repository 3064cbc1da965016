#include <gtest/gtest.h>

#include "test_support.hpp"

namespace basic_construction_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;

std::vector<std::shared_ptr<const BasicConstruction>> models() {
  return {pt::make_bc(pt::diag_in_matrix(2)), pt::make_bc(pt::scalars_in_matrix(2)),
          pt::make_bc(pt::markov_inclusion({1}, {1, 2}, {{1, 2}})),
          pt::make_bc(pt::markov_inclusion({1, 1}, {3}, {{1}, {2}})),
          pt::make_bc(pt::markov_inclusion({2}, {2, 2}, {{1, 1}}))};
}

TEST(MarkovTrace, PerronValues) {
  EXPECT_NEAR(markov_trace({{1}, {1}, {1}}, {1, 1, 1}).beta, 3.0, 1e-12);
  EXPECT_NEAR(markov_trace({{3}}, {1}).beta, 9.0, 1e-12);
  EXPECT_NEAR(markov_trace({{1, 2}}, {1}).beta, 5.0, 1e-12);
  EXPECT_NEAR(markov_trace({{1, 1}}, {2}).beta, 2.0, 1e-12);
}

TEST(MarkovTrace, VectorsByHand) {
  // Lambda Lambda^t = [[1,2],[2,4]]: beta = 5, t0 ∝ (1,2) normalised by m = (1,1).
  const MarkovData md = markov_trace({{1}, {2}}, {1, 1});
  EXPECT_NEAR(md.beta, 5.0, 1e-12);
  EXPECT_NEAR(md.t0[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(md.t0[1], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(md.t1[0], 1.0 / 3.0, 1e-12);
  EXPECT_LE(md.eigen_residual, 1e-12);
}

TEST(MarkovTrace, DisconnectedIsRejected) {
  EXPECT_TRUE(pt::throws_code([] { markov_trace({{1, 0}, {0, 1}}, {1, 1}); }, ErrorCode::NonConnected));
}

TEST(BasicConstruction, JonesProjectionRank) {
  for (const auto& bc : models()) {
    EXPECT_EQ(rank(bc->e1()), bc->N().dimension());
    EXPECT_LE(op_norm(bc->e1() * bc->e1() - bc->e1()), 1e-12);
    EXPECT_LE(op_norm(bc->e1() - bc->e1().adjoint()), 1e-12);
  }
}

TEST(BasicConstruction, M1Dimensions) {
  const auto c_in_m2 = pt::make_bc(pt::scalars_in_matrix(2));
  EXPECT_EQ(c_in_m2->M1_structure().dims(), std::vector<int>({4}));
  const auto diag = pt::make_bc(pt::diag_in_matrix(2));
  EXPECT_EQ(diag->M1_structure().dims(), std::vector<int>({2, 2}));
  // dim M1 = sum over N blocks of (Lambda m)_i^2.
  const auto mixed = pt::make_bc(pt::markov_inclusion({1, 1}, {3}, {{1}, {2}}));
  EXPECT_EQ(mixed->M1().dimension(), 9u + 36u);
}

TEST(BasicConstruction, MarkovModeDetection) {
  EXPECT_TRUE(pt::make_bc(pt::diag_in_matrix(3))->markov_mode());
  const AlgebraPtr skew = pt::algebra({1, 2}, {0.5, 0.25});
  EXPECT_FALSE(pt::make_bc(Subalgebra::scalars(skew))->markov_mode());
  EXPECT_TRUE(pt::throws_code([&] { pt::make_bc(Subalgebra::scalars(skew))->m1_trace_vector(); },
                              ErrorCode::InvalidInput));
}

TEST(BasicConstructionProperty, JonesRelations) {
  for (const auto& bc : models()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      const Element x = pt::random_in(bc->M(), rng);
      const CMatrix lx = left_mult(x);
      const CMatrix& e = bc->e1();
      EXPECT_LE(op_norm(e * lx * e - left_mult(bc->N().expectation(x)) * e), 1e-12);
      const CMatrix jxj = bc->gns().conjugate(lx);
      const Element y = pt::random_in(bc->M(), rng);
      EXPECT_LE(op_norm(jxj * left_mult(y) - left_mult(y) * jxj), 1e-12);
      // L_x and e1 lie in M1.
      EXPECT_LE(bc->m1_residual(lx), 1e-10);
      EXPECT_LE(bc->m1_residual(e), 1e-10);
      // N commutes with e1.
      const Element n = random_element(bc->N(), rng);
      EXPECT_LE(op_norm(left_mult(n) * e - e * left_mult(n)), 1e-12);
    }
  }
}

TEST(BasicConstructionProperty, MarkovTraceOnM1) {
  for (const auto& bc : models()) {
    ASSERT_TRUE(bc->markov_mode());
    const double beta = bc->markov()->beta;
    const Element em = bc->expectation_onto_M(bc->e1());
    EXPECT_LE(cstar_norm(em - Element::identity(bc->M()) * cplx(1.0 / beta)), 1e-10);
    Rng rng(31);
    for (int i = 0; i < 5; ++i) {
      const Element x = pt::random_in(bc->M(), rng);
      const cplx t = trace_value(x);
      EXPECT_LE(std::abs(bc->m1_trace_complex(left_mult(x)) - t), 1e-10);
      EXPECT_LE(std::abs(bc->m1_trace_complex(left_mult(x) * bc->e1()) - t / beta), 1e-10);
    }
  }
}

TEST(Pushdown, Roundtrip) {
  for (const auto& bc : models()) {
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
      const Element x = pt::random_in(bc->M(), rng);
      EXPECT_LE(max_abs_entry(bc->pushdown(left_mult(x) * bc->e1()) - x), 1e-12);
    }
  }
}

TEST(Pushdown, RejectsOperatorsNotOnE1) {
  const auto bc = pt::make_bc(pt::diag_in_matrix(2));
  EXPECT_TRUE(pt::throws_code([&] { bc->pushdown(bc->identity()); }, ErrorCode::NotSupportedOnE1));
  EXPECT_TRUE(pt::throws_code([&] { bc->pushdown(CMatrix::Identity(2, 2)); }, ErrorCode::InvalidInput));
}

}  // namespace basic_construction_test
