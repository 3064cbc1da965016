#pragma once

// Intermediate subalgebras N ⊆ P ⊆ M and quadruples (N, P, Q, M).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/basic_construction.hpp"
#include "ppbasis/pp_systems.hpp"

namespace ppbasis {

inline constexpr double kContainmentTolerance = 1e-8;

inline void require_intermediate(const BasicConstruction& bc, const Subalgebra& p) {
  if (!p.ambient()->same_as(*bc.M()))
    fail(ErrorCode::NotIntermediate, "subalgebra lives in a different ambient algebra");
  const double r = p.containment_residual(bc.N());
  if (r > kContainmentTolerance)
    fail(ErrorCode::NotIntermediate, "N is not contained in P (residual " + std::to_string(r) + ")");
}

/// e_P: orthogonal projection of L^2(M) onto L^2(P).
inline CMatrix intermediate_jones_projection(const Subalgebra& p, const BasicConstruction& bc) {
  require_intermediate(bc, p);
  return p.projector();
}

/// A family in P whose right support over N is e_P.
struct IntermediateBasis {
  Subalgebra P;
  std::vector<Element> elements;
};

struct IntermediateBasisCheck {
  double containment = 0.0;       // max |l - E_P(l)|_2
  double right_support = 0.0;     // |f_right - e_P|
  double left_support = 0.0;      // |f_left - e_P|
  bool right_system = false;
  bool left_system = false;
  bool right_basis() const {
    return right_system && containment <= kContainmentTolerance && right_support <= kProjectionTolerance;
  }
  bool two_sided_basis() const {
    return right_basis() && left_system && left_support <= kProjectionTolerance;
  }
};

inline IntermediateBasisCheck check_intermediate_basis(const std::shared_ptr<const BasicConstruction>& bc,
                                                       const Subalgebra& p, const std::vector<Element>& elements) {
  require_intermediate(*bc, p);
  IntermediateBasisCheck c;
  for (const auto& l : elements) c.containment = std::max(c.containment, p.residual(l));
  const PPSystem sys(bc, elements, Side::TwoSided);
  const CMatrix ep = p.projector();
  c.right_system = sys.report(Side::Right).system;
  c.left_system = sys.report(Side::Left).system;
  c.right_support = op_norm(sys.report(Side::Right).support - ep);
  c.left_support = op_norm(sys.report(Side::Left).support - ep);
  return c;
}

/// A right basis of P over N: a system in M with support e_P.
inline IntermediateBasis intermediate_basis(const std::shared_ptr<const BasicConstruction>& bc, const Subalgebra& p,
                                            std::uint64_t seed = 0,
                                            ConstructionMode mode = ConstructionMode::General) {
  const CMatrix ep = intermediate_jones_projection(p, *bc);
  PPSystem sys = construct_system_with_support(bc, ep, mode, seed);
  return {p, sys.elements()};
}

/// p(P, Q) = sum_{i,j} l_i m_j e1 m_j^* l_i^* for right bases {l_i} of P/N
/// and {m_j} of Q/N.
inline CMatrix interchange_operator(const IntermediateBasis& p_basis, const IntermediateBasis& q_basis,
                                    const std::shared_ptr<const BasicConstruction>& bc) {
  for (const auto* b : {&p_basis, &q_basis}) {
    const IntermediateBasisCheck c = check_intermediate_basis(bc, b->P, b->elements);
    if (!c.right_basis())
      fail(ErrorCode::NotABasis, "family is not a basis of the intermediate subalgebra over N (support residual " +
                                     std::to_string(c.right_support) + ")");
  }
  const int d = bc->dimension();
  CMatrix out = CMatrix::Zero(d, d);
  for (const auto& l : p_basis.elements)
    for (const auto& m : q_basis.elements) {
      const CMatrix op = left_mult(l * m);
      out += op * bc->e1() * op.adjoint();
    }
  return out;
}

struct Quadruple {
  std::shared_ptr<const BasicConstruction> bc;
  Subalgebra P;
  Subalgebra Q;

  Quadruple(std::shared_ptr<const BasicConstruction> b, Subalgebra p, Subalgebra q)
      : bc(std::move(b)), P(std::move(p)), Q(std::move(q)) {
    require_intermediate(*bc, P);
    require_intermediate(*bc, Q);
  }
};

/// max over the matrix units x of M of |E_P(E_Q(x)) - E_N(x)|_2.
inline double commuting_square_residual(const Quadruple& q) {
  const AlgebraPtr& m = q.bc->M();
  double worst = 0.0;
  for (std::size_t i = 0; i < m->num_blocks(); ++i)
    for (int a = 0; a < m->dim(i); ++a)
      for (int b = 0; b < m->dim(i); ++b) {
        const Element x = Element::matrix_unit(m, i, a, b);
        worst = std::max(worst, gns_norm(q.P.expectation(q.Q.expectation(x)) - q.bc->N().expectation(x)));
      }
  return worst;
}

inline bool is_commuting_square(const Quadruple& q) { return commuting_square_residual(q) <= 1e-9; }

}  // namespace ppbasis
