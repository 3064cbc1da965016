#include <gtest/gtest.h>

#include "test_support.hpp"

namespace path_algebra_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;

PathModel c_in_c_plus_m2() { return PathModel(BratteliDiagram({1}, {1, 2}, {{1, 2}}), {0.2, 0.4}); }

TEST(Bratteli, PathCounts) {
  const BratteliDiagram d({1, 2}, {3, 2}, {{1, 0}, {1, 1}});
  EXPECT_EQ(d.root_edges().size(), 3u);
  EXPECT_EQ(d.level_edges().size(), 3u);
  EXPECT_EQ(d.paths().size(), 5u);
  EXPECT_EQ(d.paths_to(0).size(), 3u);
  EXPECT_EQ(d.paths_to(1).size(), 2u);
}

TEST(Bratteli, RejectsBadDiagrams) {
  EXPECT_TRUE(pt::throws_code([] { BratteliDiagram({1}, {3}, {{2}}); }, ErrorCode::NonUnitalInclusion));
  EXPECT_TRUE(pt::throws_code([] { BratteliDiagram({1, 1}, {1}, {{1}, {0}}); }, ErrorCode::NonUnitalInclusion));
  EXPECT_TRUE(pt::throws_code([] { BratteliDiagram({1}, {1}, {{-1}}); }, ErrorCode::InvalidInput));
}

TEST(PathModel, UnitsAreMatrixUnits) {
  const PathModel pm = c_in_c_plus_m2();
  Element sum = Element::zero(pm.B1());
  for (const auto& p : pm.diagram().paths()) sum += pm.unit(p, p);
  EXPECT_LE(cstar_norm(sum - Element::identity(pm.B1())), 1e-14);
  for (const auto& [a, b] : pm.unit_pairs())
    for (const auto& [c, d] : pm.unit_pairs()) {
      const Element want = b == c ? pm.unit(a, d) : Element::zero(pm.B1());
      EXPECT_LE(cstar_norm(pm.unit(a, b) * pm.unit(c, d) - want), 1e-14);
    }
  EXPECT_EQ(pm.unit_pairs().size(), 1u + 4u);
}

TEST(PathModel, MismatchedEndpointsAreRejected) {
  const PathModel pm = c_in_c_plus_m2();
  const auto& paths = pm.diagram().paths();
  const Path to0 = pm.diagram().paths_to(0)[0];
  const Path to1 = pm.diagram().paths_to(1)[0];
  ASSERT_EQ(paths.size(), 3u);
  EXPECT_TRUE(pt::throws_code([&] { pm.unit(to0, to1); }, ErrorCode::InvalidPathPair));
  EXPECT_TRUE(pt::throws_code([&] { cond_exp_on_unit(pm, to0, to1, pm.t0(), pm.t1()); }, ErrorCode::InvalidPathPair));
}

TEST(PathModel, InheritedTraceIsLambdaT1) {
  const PathModel pm = c_in_c_plus_m2();
  ASSERT_EQ(pm.t0().size(), 1u);
  EXPECT_NEAR(pm.t0()[0], 1.0 * 0.2 + 2.0 * 0.4, 1e-15);
}

TEST(CondExp, ScalarsInM2ByHand) {
  // Diagonal units go to t1/t0 = 1/2, off-diagonal to 0.
  const PathModel pm(BratteliDiagram({1}, {2}, {{2}}), {0.5});
  const auto& paths = pm.diagram().paths();
  ASSERT_EQ(paths.size(), 2u);
  const Element one = Element::identity(pm.B1());
  EXPECT_LE(cstar_norm(cond_exp_on_unit(pm, paths[0], paths[0], pm.t0(), pm.t1()) - one * cplx(0.5)), 1e-15);
  EXPECT_LE(cstar_norm(cond_exp_on_unit(pm, paths[0], paths[1], pm.t0(), pm.t1())), 1e-15);
}

TEST(CondExp, MatchesProjectionOnEveryUnit) {
  const std::vector<PathModel> models = {
      PathModel(BratteliDiagram({1}, {2}, {{2}}), {0.5}), c_in_c_plus_m2(),
      PathModel(BratteliDiagram({1, 2}, {3}, {{1}, {1}}), {1.0 / 3.0}),
      PathModel(BratteliDiagram({1, 2}, {3, 2}, {{1, 0}, {1, 1}}), {0.2, 0.2}),
      PathModel(BratteliDiagram({2}, {2, 4}, {{1, 2}}), {0.1, 0.2})};
  for (const auto& pm : models) {
    const Subalgebra b0 = pm.B0();
    for (const auto& [l, m] : pm.unit_pairs())
      EXPECT_LE(cstar_norm(cond_exp_on_unit(pm, l, m, pm.t0(), pm.t1()) - b0.expectation(pm.unit(l, m))), 1e-12);
  }
}

TEST(CondExp, TraceMismatchIsRejected) {
  const PathModel pm = c_in_c_plus_m2();
  const auto& paths = pm.diagram().paths();
  EXPECT_TRUE(pt::throws_code([&] { cond_exp_on_unit(pm, paths[0], paths[0], {0.5}, pm.t1()); },
                              ErrorCode::TraceMismatch));
}

TEST(PathSystem, JProjectionsAndGram) {
  const PathModel pm(BratteliDiagram({1, 2}, {3, 2}, {{1, 0}, {1, 1}}), {0.2, 0.2});
  const PathSystem ps = orthogonal_system_from_paths(pm, pm.t0(), pm.t1());
  ASSERT_EQ(ps.j.size(), 2u);
  for (const auto& j : ps.j) {
    EXPECT_LE(cstar_norm(j * j - j), 1e-14);
    EXPECT_LE(cstar_norm(j - j.adjoint()), 1e-14);
  }
  // Each j_p has rank one in its A0 block.
  EXPECT_NEAR(ps.j[1].block(1).trace().real(), 1.0, 1e-14);
  // |I| = sum over level edges of the paths ending at their range.
  std::size_t expected = 0;
  for (const auto& kappa : pm.diagram().level_edges()) expected += pm.diagram().paths_to(kappa.range).size();
  EXPECT_EQ(ps.elements.size(), expected);
  const Subalgebra b0 = pm.B0();
  for (std::size_t i = 0; i < ps.elements.size(); ++i)
    for (std::size_t k = 0; k < ps.elements.size(); ++k) {
      const Element lhs = b0.expectation(ps.elements[i] * ps.elements[k].adjoint());
      const Element rhs = i == k ? ps.j[static_cast<std::size_t>(ps.index[i].first.source)] : Element::zero(pm.B1());
      EXPECT_LE(cstar_norm(lhs - rhs), 1e-12);
    }
}

TEST(ScalarBasis, IndexOfCPlusM2) {
  const AlgebraPtr a = pt::algebra({1, 2}, {0.2, 0.4});
  const std::vector<Element> basis = scalar_two_sided_basis(a);
  ASSERT_EQ(basis.size(), 5u);
  Element left = Element::zero(a), right = Element::zero(a);
  for (const auto& l : basis) {
    left += l.adjoint() * l;
    right += l * l.adjoint();
  }
  // sum_i n_i / t_i restricted to each block: 1/0.2 = 5 and 2/0.4 = 5.
  EXPECT_LE(cstar_norm(left - Element::identity(a) * cplx(5.0)), 1e-13);
  EXPECT_LE(cstar_norm(right - Element::identity(a) * cplx(5.0)), 1e-13);
}

}  // namespace path_algebra_test
