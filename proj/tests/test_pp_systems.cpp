#include <gtest/gtest.h>

#include "test_support.hpp"

namespace pp_systems_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;

using BcPtr = std::shared_ptr<const BasicConstruction>;

std::vector<Element> matrix_unit_basis(const AlgebraPtr& m2) {
  std::vector<Element> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.push_back(Element::matrix_unit(m2, 0, i, j) * cplx(std::sqrt(2.0)));
  return out;
}

TEST(Gram, MatrixUnitsOverScalars) {
  const BcPtr bc = pt::make_bc(pt::scalars_in_matrix(2));
  const std::vector<Element> basis = matrix_unit_basis(bc->M());
  const GramMatrix g = gram_matrix(basis, bc->N(), Side::Right);
  // E((sqrt2 e_ij)^* sqrt2 e_kl) = delta_ik delta_jl.
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const cplx want = a == b ? 1.0 : 0.0;
      EXPECT_LE(cstar_norm(g.entries[a][b] - Element::identity(bc->M()) * want), 1e-14);
    }
  EXPECT_EQ(g.block_operator().rows(), 8);
}

TEST(Gram, LeftSideUsesOtherProduct) {
  const BcPtr bc = pt::make_bc(pt::diag_in_matrix(2));
  const AlgebraPtr& m = bc->M();
  const std::vector<Element> fam = {Element::matrix_unit(m, 0, 0, 1)};
  const GramMatrix right = gram_matrix(fam, bc->N(), Side::Right);
  const GramMatrix left = gram_matrix(fam, bc->N(), Side::Left);
  // e12^* e12 = e22 and e12 e12^* = e11.
  EXPECT_LE(cstar_norm(right.entries[0][0] - Element::matrix_unit(m, 0, 1, 1)), 1e-14);
  EXPECT_LE(cstar_norm(left.entries[0][0] - Element::matrix_unit(m, 0, 0, 0)), 1e-14);
}

TEST(Classify, Examples) {
  const BcPtr diag = pt::make_bc(pt::diag_in_matrix(2));
  const AlgebraPtr& m = diag->M();
  const Element one = Element::identity(m);
  const PPSystem basis(diag, {one, pt::flip(m)}, Side::TwoSided);
  EXPECT_TRUE(basis.is_basis());
  EXPECT_TRUE(basis.is_orthonormal());

  const PPSystem half(diag, {one}, Side::Right);
  EXPECT_TRUE(half.is_orthonormal());
  EXPECT_FALSE(half.is_basis());
  EXPECT_NEAR(half.report(Side::Right).support_to_identity, 1.0, 1e-12);

  const PPSystem partial(diag, {Element::matrix_unit(m, 0, 0, 0), Element::matrix_unit(m, 0, 0, 1)}, Side::Right);
  EXPECT_TRUE(partial.is_orthogonal());
  EXPECT_FALSE(partial.is_orthonormal());

  const PPSystem not_system(diag, {one * cplx(2.0)}, Side::Right);
  EXPECT_FALSE(not_system.is_system());
  EXPECT_FALSE(support(not_system).system_hypothesis);

  // Right system that is not orthogonal: two copies of a unit-norm vector.
  const Element v = (one + pt::flip(m)) * cplx(0.5);
  const PPSystem twice(diag, {v, v}, Side::Right);
  EXPECT_FALSE(twice.is_orthogonal());
}

TEST(Classify, ScalarBasisIsTwoSided) {
  const BcPtr bc = pt::make_bc(pt::scalars_in_matrix(2));
  const PPSystem sys(bc, matrix_unit_basis(bc->M()), Side::TwoSided);
  EXPECT_TRUE(sys.is_basis());
  const WatataniIndex w = watatani_index(sys);
  EXPECT_TRUE(w.scalar);
  EXPECT_NEAR(w.scalar_value, 4.0, 1e-12);
}

TEST(Classify, ReportOnWrongSideThrows) {
  const BcPtr bc = pt::make_bc(pt::diag_in_matrix(2));
  const PPSystem sys(bc, {Element::identity(bc->M())}, Side::Right);
  EXPECT_TRUE(pt::throws_code([&] { sys.report(Side::Left); }, ErrorCode::InvalidInput));
}

TEST(ExpansionProperty, BasisReconstructsEveryElement) {
  const BcPtr bc = pt::make_bc(pt::diag_in_matrix(3));
  const AlgebraPtr& m = bc->M();
  const std::vector<Element> basis = {Element::identity(m), pt::cyclic_shift(m, 3, 1), pt::cyclic_shift(m, 3, 2)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Element x = pt::random_in(m, rng);
    EXPECT_LE(right_expansion_residual(basis, bc->N(), x), 1e-12);
    EXPECT_LE(left_expansion_residual(basis, bc->N(), x), 1e-12);
  }
}

TEST(SupportProperty, RandomSystemsHaveProjectionSupport) {
  const std::vector<BcPtr> bcs = {pt::make_bc(pt::diag_in_matrix(2)), pt::make_bc(pt::scalars_in_matrix(2)),
                                  pt::make_bc(pt::markov_inclusion({1}, {1, 2}, {{1, 2}}))};
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const BcPtr& bc = bcs[seed % bcs.size()];
    Rng rng(seed);
    const CMatrix f = random_m1_projection(*bc, rng);
    for (auto mode : {ConstructionMode::General, ConstructionMode::Orthogonal}) {
      const PPSystem sys = construct_system_with_support(bc, f, mode, seed);
      EXPECT_TRUE(sys.is_system());
      const Support s = support(sys);
      EXPECT_TRUE(s.system_hypothesis);
      EXPECT_LE(op_norm(s.projection - f), 1e-9) << "seed " << seed;
      if (mode == ConstructionMode::Orthogonal) EXPECT_TRUE(sys.is_orthogonal());
      const PPSystem full = complete_to_basis(sys, seed);
      EXPECT_TRUE(full.is_basis());
      ASSERT_GE(full.size(), sys.size());
      for (std::size_t i = 0; i < sys.size(); ++i)
        EXPECT_EQ(max_abs_entry(full.elements()[i] - sys.elements()[i]), 0.0);
    }
  }
}

TEST(Construct, TargetsByHand) {
  const BcPtr bc = pt::make_bc(pt::scalars_in_matrix(2));
  const PPSystem one = construct_system_with_support(bc, bc->e1(), ConstructionMode::Orthogonal, 0);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_TRUE(one.is_orthonormal());
  const PPSystem full = construct_system_with_support(bc, bc->identity(), ConstructionMode::OrthonormalPadded, 0);
  EXPECT_EQ(full.size(), 4u);
  EXPECT_TRUE(full.is_orthonormal());
  EXPECT_TRUE(full.is_basis());
  const PPSystem none = construct_system_with_support(bc, CMatrix::Zero(4, 4), ConstructionMode::General, 0);
  EXPECT_EQ(none.size(), 0u);
}

TEST(Construct, InfeasibleOrthonormalPadding) {
  const BcPtr bc = pt::make_bc(pt::diag_in_matrix(2));
  const CMatrix z0 = bc->M1_structure().blocks()[0].central.block(0);
  EXPECT_TRUE(pt::throws_code([&] { construct_system_with_support(bc, z0, ConstructionMode::OrthonormalPadded, 0); },
                              ErrorCode::InfeasibleSupport));
  // The same target works without padding.
  EXPECT_NO_THROW(construct_system_with_support(bc, z0, ConstructionMode::Orthogonal, 0));
}

TEST(Construct, RejectsNonProjectionsAndOperatorsOutsideM1) {
  const BcPtr bc = pt::make_bc(pt::diag_in_matrix(2));
  EXPECT_TRUE(pt::throws_code(
      [&] { construct_system_with_support(bc, bc->identity() * cplx(0.5), ConstructionMode::General, 0); },
      ErrorCode::NotAProjection));
  // Projection onto (e11 + e12)/sqrt 2 mixes the two blocks of M1 = (JNJ)'.
  CVector v = CVector::Zero(4);
  v(0) = v(1) = 1.0 / std::sqrt(2.0);
  const CMatrix rank_one = v * v.adjoint();
  EXPECT_GT(bc->m1_residual(rank_one), 1e-6);
  EXPECT_ANY_THROW(construct_system_with_support(bc, rank_one, ConstructionMode::General, 0));
}

TEST(WatataniProperty, IndexIsBasisIndependent) {
  const std::vector<BcPtr> bcs = {pt::make_bc(pt::diag_in_matrix(3)),
                                  pt::make_bc(pt::markov_inclusion({1, 1}, {3}, {{1}, {2}}))};
  for (const auto& bc : bcs) {
    const PPSystem a = construct_system_with_support(bc, bc->identity(), ConstructionMode::General, 1);
    const PPSystem b = construct_system_with_support(bc, bc->identity(), ConstructionMode::Orthogonal, 2);
    const WatataniIndex wa = watatani_index(a), wb = watatani_index(b);
    EXPECT_LE(cstar_norm(wa.value - wb.value), 1e-9);
    EXPECT_TRUE(wa.central);
  }
}

TEST(BalancedSums, TwoSidedBasesUnderMarkovTrace) {
  const AlgebraPtr a = pt::algebra({1, 2}, {0.2, 0.4});
  const BcPtr bc = pt::make_bc(Subalgebra::scalars(a));
  ASSERT_TRUE(bc->markov_mode());
  const PPSystem sys(bc, scalar_two_sided_basis(a), Side::TwoSided);
  ASSERT_TRUE(sys.is_basis());
  const double beta = bc->markov()->beta;
  EXPECT_NEAR(beta, 5.0, 1e-12);
  Element left = Element::zero(a), right = Element::zero(a);
  for (const auto& l : sys.elements()) {
    left += l.adjoint() * l;
    right += l * l.adjoint();
  }
  EXPECT_LE(cstar_norm(left - Element::identity(a) * cplx(beta)), 1e-12);
  EXPECT_LE(cstar_norm(right - Element::identity(a) * cplx(beta)), 1e-12);
}

TEST(ProjectionDefect, Examples) {
  EXPECT_TRUE(projection_defect(CMatrix::Identity(3, 3)).is_projection());
  EXPECT_FALSE(projection_defect(CMatrix::Identity(3, 3) * cplx(2.0)).is_projection());
  CMatrix nilpotent = CMatrix::Zero(2, 2);
  nilpotent(0, 1) = 1.0;
  EXPECT_FALSE(projection_defect(nilpotent).is_projection());
}

}  // namespace pp_systems_test
