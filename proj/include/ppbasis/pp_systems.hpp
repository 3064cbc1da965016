#pragma once

// Pimsner-Popa systems for N ⊆ M.
//
// Right side: Gram q_ij = E_N(l_i^* l_j), support sum l_i e1 l_i^*, basis
// identity x = sum l_i E_N(l_i^* x). Left side: Gram q_ij = E_N(l_i l_j^*),
// support sum l_i^* e1 l_i, basis identity x = sum E_N(x l_i^*) l_i.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/basic_construction.hpp"
#include "ppbasis/errors.hpp"
#include "ppbasis/linalg.hpp"

namespace ppbasis {

enum class Side { Left, Right, TwoSided };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::TwoSided: return "two-sided";
  }
  return "?";
}

/// Relative threshold of the projection tests on Gram matrices and supports.
inline constexpr double kProjectionTolerance = 1e-8;

/// Gram matrix over N as an n x n matrix of elements. Norms are taken in
/// M_n(M) realised on C^n ⊗ C^{sum n_i}.
struct GramMatrix {
  std::vector<std::vector<Element>> entries;

  std::size_t size() const { return entries.size(); }
  const Element& operator()(std::size_t i, std::size_t j) const { return entries[i][j]; }

  CMatrix block_operator() const {
    const std::size_t n = entries.size();
    if (n == 0) return CMatrix(0, 0);
    const Eigen::Index s = entries[0][0].parent()->matrix_size();
    CMatrix op(static_cast<Eigen::Index>(n) * s, static_cast<Eigen::Index>(n) * s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        op.block(static_cast<Eigen::Index>(i) * s, static_cast<Eigen::Index>(j) * s, s, s) =
            entries[i][j].direct_sum();
    return op;
  }
};

inline GramMatrix gram_matrix(const std::vector<Element>& elements, const Subalgebra& n, Side side) {
  if (side == Side::TwoSided)
    fail(ErrorCode::InvalidInput, "gram_matrix needs a single side");
  GramMatrix g;
  const std::size_t k = elements.size();
  g.entries.assign(k, std::vector<Element>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      g.entries[i][j] = side == Side::Right ? n.expectation(elements[i].adjoint() * elements[j])
                                            : n.expectation(elements[i] * elements[j].adjoint());
  return g;
}

struct ProjectionDefect {
  double idempotency = 0.0;     // |P^2 - P|
  double self_adjointness = 0.0;  // |P - P^*|
  double norm = 0.0;
  bool is_projection(double rel = kProjectionTolerance) const {
    return idempotency <= rel * (1.0 + norm) && self_adjointness <= rel * (1.0 + norm);
  }
};

inline ProjectionDefect projection_defect(const CMatrix& p) {
  ProjectionDefect d;
  if (p.size() == 0) return d;
  d.norm = op_norm(p);
  d.idempotency = op_norm(p * p - p);
  d.self_adjointness = op_norm(p - p.adjoint());
  return d;
}

/// Classification of one side of a family.
struct SideReport {
  Side side = Side::Right;
  GramMatrix gram;
  CMatrix support;
  ProjectionDefect gram_defect;
  ProjectionDefect support_defect;
  double off_diagonal = 0.0;          // max |q_ij|, i != j
  double diagonal_projection = 0.0;   // max projection defect of q_ii
  double diagonal_unit = 0.0;         // max |q_ii - 1|
  double support_to_identity = 0.0;   // |f - 1|
  bool system = false;
  bool orthogonal = false;
  bool orthonormal = false;
  bool basis = false;
};

namespace detail {

inline SideReport classify_side(const std::vector<Element>& elements, const BasicConstruction& bc, Side side) {
  SideReport r;
  r.side = side;
  r.gram = gram_matrix(elements, bc.N(), side);
  const CMatrix q = r.gram.block_operator();
  r.gram_defect = projection_defect(q);
  r.system = elements.empty() || r.gram_defect.is_projection();

  const double scale = 1.0 + r.gram_defect.norm;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = 0; j < elements.size(); ++j) {
      if (i == j) continue;
      r.off_diagonal = std::max(r.off_diagonal, cstar_norm(r.gram(i, j)));
    }
    const Element& qi = r.gram(i, i);
    r.diagonal_projection = std::max(
        r.diagonal_projection, std::max(cstar_norm(qi * qi - qi), cstar_norm(qi - qi.adjoint())));
    r.diagonal_unit = std::max(r.diagonal_unit, cstar_norm(qi - Element::identity(qi.parent())));
  }
  const double tol = kProjectionTolerance * scale;
  r.orthogonal = r.system && r.off_diagonal <= tol && r.diagonal_projection <= tol;
  r.orthonormal = r.orthogonal && r.diagonal_unit <= tol;

  const int d = bc.dimension();
  r.support = CMatrix::Zero(d, d);
  for (const auto& l : elements) {
    const CMatrix ll = left_mult(l);
    r.support += side == Side::Right ? CMatrix(ll * bc.e1() * ll.adjoint())
                                     : CMatrix(ll.adjoint() * bc.e1() * ll);
  }
  r.support_defect = projection_defect(r.support);
  r.support_to_identity = op_norm(r.support - bc.identity());
  r.basis = r.system && r.support_to_identity <= kProjectionTolerance;
  return r;
}

}  // namespace detail

/// A finite family in M with its side tag and eager classification.
class PPSystem {
 public:
  PPSystem(std::shared_ptr<const BasicConstruction> bc, std::vector<Element> elements, Side side)
      : bc_(std::move(bc)), elements_(std::move(elements)), side_(side) {
    if (!bc_) fail(ErrorCode::InvalidInput, "PP system without basic construction");
    for (const auto& x : elements_) {
      x.check_same(Element::zero(bc_->M()));
      require_finite(x.direct_sum(), "PPSystem");
    }
    if (side_ != Side::Left) right_ = detail::classify_side(elements_, *bc_, Side::Right);
    if (side_ != Side::Right) left_ = detail::classify_side(elements_, *bc_, Side::Left);
  }

  const BasicConstruction& bc() const { return *bc_; }
  const std::shared_ptr<const BasicConstruction>& bc_ptr() const { return bc_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  Side side() const { return side_; }

  const SideReport& report(Side s) const {
    const auto& r = s == Side::Left ? left_ : right_;
    if (!r) fail(ErrorCode::InvalidInput, std::string("system was not classified on the ") + to_string(s) + " side");
    return *r;
  }
  const std::optional<SideReport>& right() const { return right_; }
  const std::optional<SideReport>& left() const { return left_; }

  bool flag(bool SideReport::*member) const {
    bool ok = true;
    if (right_) ok = ok && (*right_).*member;
    if (left_) ok = ok && (*left_).*member;
    return ok;
  }
  bool is_system() const { return flag(&SideReport::system); }
  bool is_orthogonal() const { return flag(&SideReport::orthogonal); }
  bool is_orthonormal() const { return flag(&SideReport::orthonormal); }
  bool is_basis() const { return flag(&SideReport::basis); }

 private:
  std::shared_ptr<const BasicConstruction> bc_;
  std::vector<Element> elements_;
  Side side_;
  std::optional<SideReport> right_;
  std::optional<SideReport> left_;
};

inline PPSystem classify(std::shared_ptr<const BasicConstruction> bc, std::vector<Element> elements, Side side) {
  return PPSystem(std::move(bc), std::move(elements), side);
}

struct Support {
  CMatrix projection;
  bool system_hypothesis = true;  // false: the family is not a system, f need not be a projection
};

inline Support support(const PPSystem& sys, Side side = Side::Right) {
  const SideReport& r = sys.report(side);
  return {r.support, r.system};
}

/// Support, refusing families that fail the system test.
inline CMatrix require_support(const PPSystem& sys, Side side = Side::Right) {
  const SideReport& r = sys.report(side);
  if (!r.system)
    fail(ErrorCode::NotASystem, "Gram matrix is not a projection (defect " +
                                    std::to_string(r.gram_defect.idempotency) + ")");
  return r.support;
}

/// |x - sum l_i E_N(l_i^* x)|_2.
inline double right_expansion_residual(const std::vector<Element>& elements, const Subalgebra& n, const Element& x) {
  Element y = Element::zero(x.parent());
  for (const auto& l : elements) y += l * n.expectation(l.adjoint() * x);
  return gns_norm(x - y);
}

/// |x - sum E_N(x l_i^*) l_i|_2.
inline double left_expansion_residual(const std::vector<Element>& elements, const Subalgebra& n, const Element& x) {
  Element y = Element::zero(x.parent());
  for (const auto& l : elements) y += n.expectation(x * l.adjoint()) * l;
  return gns_norm(x - y);
}

enum class ConstructionMode { General, Orthogonal, OrthonormalPadded };

inline const char* to_string(ConstructionMode m) {
  switch (m) {
    case ConstructionMode::General: return "general";
    case ConstructionMode::Orthogonal: return "orthogonal";
    case ConstructionMode::OrthonormalPadded: return "orthonormal-padded";
  }
  return "?";
}

namespace detail {

/// Orthonormal columns spanning the range of a Hermitian projection matrix,
/// rotated by a random unitary.
inline CMatrix random_range_basis(const CMatrix& projection, Rng& rng) {
  const HermitianEigen eig = hermitian_eigen(projection);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > 0.5) keep.push_back(i);
  CMatrix cols(projection.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = eig.vectors.col(keep[k]);
  if (cols.cols() > 0) cols = cols * random_unitary(cols.cols(), rng);
  return cols;
}

inline void require_m1_projection(const BasicConstruction& bc, const CMatrix& f) {
  const int d = bc.dimension();
  if (f.rows() != d || f.cols() != d) fail(ErrorCode::InvalidInput, "projection has the wrong size");
  require_finite(f, "construct_system_with_support");
  const ProjectionDefect def = projection_defect(f);
  if (!def.is_projection())
    fail(ErrorCode::NotAProjection, "f is not a projection (|f^2 - f| = " + std::to_string(def.idempotency) + ")");
  const double out = bc.m1_residual(f);
  if (out > kProjectionTolerance * (1.0 + def.norm) * std::sqrt(static_cast<double>(d)))
    fail(ErrorCode::NotAProjection, "f does not lie in M1 (residual " + std::to_string(out) + ")");
}

}  // namespace detail

/// A system {l_i} with sum l_i e1 l_i^* = f. Partial isometries v_i in M1
/// with v_i^* v_i <= e1 are assembled blockwise in the Wedderburn picture of
/// M1: piece i carries up to rank(e1) columns of range(f) in every block.
/// Orthogonal mode keeps the pieces as they are; general mode mixes them by
/// a random unitary; orthonormal-padded mode requires every piece but the
/// last to be full (v_i^* v_i = e1) in every block.
inline PPSystem construct_system_with_support(const std::shared_ptr<const BasicConstruction>& bc_ptr,
                                              const CMatrix& f, ConstructionMode mode, std::uint64_t seed = 0) {
  const BasicConstruction& bc = *bc_ptr;
  detail::require_m1_projection(bc, f);
  const Wedderburn& w = bc.M1_structure();
  const Element fa = w.to_abstract(bc.as_operator(f));
  const Element pa = w.to_abstract(bc.as_operator(bc.e1()));
  const std::size_t nb = w.blocks().size();
  Rng rng(seed);

  std::vector<CMatrix> range_f(nb), range_e(nb);
  std::vector<int> rf(nb), re(nb);
  int pieces = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    range_f[k] = detail::random_range_basis(fa.block(k), rng);
    range_e[k] = detail::random_range_basis(pa.block(k), rng);
    rf[k] = static_cast<int>(range_f[k].cols());
    re[k] = static_cast<int>(range_e[k].cols());
    if (rf[k] > 0 && re[k] == 0)
      fail(ErrorCode::InfeasibleSupport, "block " + std::to_string(k) + " of M1 has no room under e1");
    if (rf[k] > 0) pieces = std::max(pieces, (rf[k] + re[k] - 1) / re[k]);
  }
  if (mode == ConstructionMode::OrthonormalPadded) {
    std::string deficits;
    for (std::size_t k = 0; k < nb; ++k) {
      const int need = (pieces - 1) * re[k];
      if (rf[k] < need)
        deficits += " block " + std::to_string(k) + ": rank " + std::to_string(rf[k]) + " < " +
                    std::to_string(need) + " (deficit " + std::to_string(need - rf[k]) + ");";
    }
    if (!deficits.empty())
      fail(ErrorCode::InfeasibleSupport,
           "f cannot be split into " + std::to_string(pieces) + " pieces that are full under e1:" + deficits);
  }

  std::vector<Element> v;
  for (int i = 0; i < pieces; ++i) {
    Element piece = Element::zero(w.abstract());
    for (std::size_t k = 0; k < nb; ++k) {
      const int first = i * re[k];
      const int count = std::clamp(rf[k] - first, 0, re[k]);
      if (count > 0)
        piece.block(k) = range_f[k].middleCols(first, count) * range_e[k].leftCols(count).adjoint();
    }
    v.push_back(std::move(piece));
  }
  if (mode == ConstructionMode::General && pieces > 1) {
    const CMatrix mix = random_unitary(pieces, rng);
    std::vector<Element> mixed;
    for (int i = 0; i < pieces; ++i) {
      Element m = Element::zero(w.abstract());
      for (int j = 0; j < pieces; ++j) m += v[static_cast<std::size_t>(j)] * mix(i, j);
      mixed.push_back(std::move(m));
    }
    v = std::move(mixed);
  }

  std::vector<Element> lambdas;
  for (const auto& piece : v) lambdas.push_back(bc.pushdown(w.from_abstract(piece).block(0)));
  return PPSystem(bc_ptr, std::move(lambdas), Side::Right);
}

/// Appends a system with support 1 - f to a right system with support f.
inline PPSystem complete_to_basis(const PPSystem& sys, std::uint64_t seed = 0) {
  const CMatrix f = require_support(sys, Side::Right);
  const BasicConstruction& bc = sys.bc();
  std::vector<Element> all = sys.elements();
  if (op_norm(bc.identity() - f) > kProjectionTolerance) {
    const PPSystem rest =
        construct_system_with_support(sys.bc_ptr(), bc.identity() - f, ConstructionMode::Orthogonal, seed);
    all.insert(all.end(), rest.elements().begin(), rest.elements().end());
  }
  return PPSystem(sys.bc_ptr(), std::move(all), sys.side() == Side::Left ? Side::Right : sys.side());
}

struct WatataniIndex {
  Element value;            // sum l_i l_i^*
  double central_residual = 0.0;
  bool central = false;
  bool scalar = false;
  double scalar_value = 0.0;  // tr(value); meaningful when scalar
};

/// Index of E_N computed from a right basis. Independent of the basis and
/// central in M.
inline WatataniIndex watatani_index(const PPSystem& basis) {
  const SideReport& r = basis.report(Side::Right);
  if (!r.basis)
    fail(ErrorCode::NotABasis, "support differs from 1 by " + std::to_string(r.support_to_identity));
  const AlgebraPtr& m = basis.bc().M();
  WatataniIndex out;
  out.value = Element::zero(m);
  for (const auto& l : basis.elements()) out.value += l * l.adjoint();
  const double scale = 1.0 + cstar_norm(out.value);
  for (std::size_t i = 0; i < m->num_blocks(); ++i)
    for (int p = 0; p < m->dim(i); ++p)
      for (int q = 0; q < m->dim(i); ++q) {
        const Element e = Element::matrix_unit(m, i, p, q);
        out.central_residual = std::max(out.central_residual, cstar_norm(out.value * e - e * out.value));
      }
  out.central = out.central_residual <= kProjectionTolerance * scale;
  out.scalar_value = trace_value(out.value).real();
  out.scalar = cstar_norm(out.value - Element::identity(m) * cplx(out.scalar_value)) <= kProjectionTolerance * scale;
  return out;
}

/// Random projection of M1: in each Wedderburn block a Haar-random subspace
/// of random rank.
inline CMatrix random_m1_projection(const BasicConstruction& bc, Rng& rng) {
  const Wedderburn& w = bc.M1_structure();
  Element p = Element::zero(w.abstract());
  for (std::size_t k = 0; k < w.blocks().size(); ++k) {
    const int n = w.blocks()[k].dim;
    const int r = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n + 1));
    const CMatrix u = random_unitary(n, rng);
    p.block(k) = u.leftCols(r) * u.leftCols(r).adjoint();
  }
  return w.from_abstract(p).block(0);
}

}  // namespace ppbasis
