#include <gtest/gtest.h>

#include "test_support.hpp"

namespace intermediate_test {

using namespace ppbasis;
namespace pt = ppbasis::testing;

struct M2Setup {
  AlgebraPtr m2 = MultiMatrixAlgebra::full_matrix(2);
  std::shared_ptr<const BasicConstruction> bc = pt::make_bc(Subalgebra::scalars(m2));
  Subalgebra diag = Subalgebra::from_span(m2, {Element::identity(m2), pt::sigma_z(m2)});
  Subalgebra flip = Subalgebra::from_span(m2, {Element::identity(m2), pt::flip(m2)});
};

TEST(IntermediateProjection, RankAndOrder) {
  const M2Setup s;
  const CMatrix ep = intermediate_jones_projection(s.diag, *s.bc);
  EXPECT_EQ(rank(ep), 2u);
  EXPECT_LE(op_norm(ep * s.bc->e1() - s.bc->e1()), 1e-14);
  EXPECT_LE(s.bc->m1_residual(ep), 1e-10);
  const CMatrix full = intermediate_jones_projection(Subalgebra::whole(s.m2), *s.bc);
  EXPECT_LE(op_norm(full - s.bc->identity()), 1e-14);
}

TEST(IntermediateProjection, RejectsNonIntermediate) {
  const auto bc = pt::make_bc(pt::diag_in_matrix(2));
  const AlgebraPtr& m = bc->M();
  const Subalgebra flip = Subalgebra::from_span(m, {Element::identity(m), pt::flip(m)});
  EXPECT_TRUE(pt::throws_code([&] { intermediate_jones_projection(flip, *bc); }, ErrorCode::NotIntermediate));
  const Subalgebra other = Subalgebra::whole(MultiMatrixAlgebra::full_matrix(3));
  EXPECT_TRUE(pt::throws_code([&] { intermediate_jones_projection(other, *bc); }, ErrorCode::NotIntermediate));
}

TEST(IntermediateBasisProperty, SupportIsEP) {
  const M2Setup s;
  const auto diag3 = pt::make_bc(pt::scalars_in_matrix(3));
  const Subalgebra d3 = pt::diag_in_matrix(3);
  const Subalgebra p3 = Subalgebra::from_coords(diag3->M(), d3.coords());
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (const auto& [bc, p] : {std::pair{s.bc, s.diag}, std::pair{s.bc, s.flip}, std::pair{diag3, p3}}) {
      const IntermediateBasis b = intermediate_basis(bc, p, seed);
      const IntermediateBasisCheck c = check_intermediate_basis(bc, p, b.elements);
      EXPECT_TRUE(c.right_basis()) << "seed " << seed;
      EXPECT_LE(c.containment, 1e-10);
      EXPECT_LE(c.right_support, 1e-9);
    }
  }
}

TEST(Interchange, MasaPairGivesIdentity) {
  // {1, z} and {1, x} multiply to the orthonormal basis {1, x, z, zx} of M2 over C.
  const M2Setup s;
  const CMatrix p = interchange_operator(intermediate_basis(s.bc, s.diag, 1), intermediate_basis(s.bc, s.flip, 2), s.bc);
  EXPECT_LE(op_norm(p - s.bc->identity()), 1e-10);
}

TEST(Interchange, SameMasaGivesTwiceEP) {
  const M2Setup s;
  const CMatrix p = interchange_operator(intermediate_basis(s.bc, s.diag, 1), intermediate_basis(s.bc, s.diag, 2), s.bc);
  const CMatrix ep = intermediate_jones_projection(s.diag, *s.bc);
  EXPECT_LE(op_norm(p - ep * cplx(2.0)), 1e-10);
  EXPECT_GE(op_norm(p * p - p), 0.05);
}

TEST(InterchangeProperty, BasisIndependentAndJSymmetric) {
  const M2Setup s;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CMatrix pq = interchange_operator(intermediate_basis(s.bc, s.diag, seed),
                                            intermediate_basis(s.bc, s.flip, seed + 10), s.bc);
    const CMatrix pq2 = interchange_operator(intermediate_basis(s.bc, s.diag, seed + 20, ConstructionMode::Orthogonal),
                                             intermediate_basis(s.bc, s.flip, seed + 30), s.bc);
    const CMatrix qp = interchange_operator(intermediate_basis(s.bc, s.flip, seed + 40),
                                            intermediate_basis(s.bc, s.diag, seed + 50), s.bc);
    EXPECT_LE(op_norm(pq - pq2), 1e-9);
    EXPECT_LE(op_norm(s.bc->gns().conjugate(pq) - qp), 1e-9);
  }
}

TEST(Interchange, RejectsFamiliesThatAreNotBases) {
  const M2Setup s;
  const IntermediateBasis good = intermediate_basis(s.bc, s.diag, 0);
  const IntermediateBasis bad{s.diag, {Element::identity(s.m2)}};
  EXPECT_ANY_THROW(interchange_operator(good, bad, s.bc));
}

TEST(CommutingSquare, Detection) {
  const M2Setup s;
  EXPECT_TRUE(is_commuting_square(Quadruple(s.bc, s.diag, s.flip)));
  EXPECT_LE(commuting_square_residual(Quadruple(s.bc, s.diag, s.flip)), 1e-12);
  EXPECT_FALSE(is_commuting_square(Quadruple(s.bc, s.diag, s.diag)));
  // N = P gives a commuting square for every Q.
  const auto bc = pt::make_bc(pt::diag_in_matrix(2));
  EXPECT_TRUE(is_commuting_square(Quadruple(bc, bc->N(), Subalgebra::whole(bc->M()))));
}

}  // namespace intermediate_test
