#pragma once

// Finite-dimensional C*-algebras  A = M_{n_1} (+) ... (+) M_{n_k}  with a
// faithful tracial state, their elements, and concrete *-subalgebras.
//
// GNS coordinates: the element x has coordinate sqrt(t_i) * x_i(a, b) at
// position offset_i + a * n_i + b, so that the Euclidean inner product of
// coordinate vectors equals <x, y> = tr(y* x).

#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ppbasis/errors.hpp"
#include "ppbasis/linalg.hpp"

namespace ppbasis {

class MultiMatrixAlgebra {
 public:
  MultiMatrixAlgebra(std::vector<int> dims, std::vector<double> trace_vector)
      : dims_(std::move(dims)), trace_(std::move(trace_vector)) {
    if (dims_.empty()) fail(ErrorCode::InvalidInput, "algebra needs at least one block");
    if (dims_.size() != trace_.size())
      fail(ErrorCode::InvalidInput, "dimension vector and trace vector differ in length");
    double total = 0.0;
    int offset = 0;
    int size = 0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (dims_[i] <= 0) fail(ErrorCode::InvalidInput, "block dimensions must be positive");
      if (!(trace_[i] > 0.0) || !std::isfinite(trace_[i]))
        fail(ErrorCode::InvalidInput, "trace vector entries must be positive (faithful trace)");
      total += dims_[i] * trace_[i];
      gns_offsets_.push_back(offset);
      matrix_offsets_.push_back(size);
      offset += dims_[i] * dims_[i];
      size += dims_[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
      fail(ErrorCode::InvalidInput,
           "trace vector is not normalised: sum n_i t_i = " + std::to_string(total));
    gns_dim_ = offset;
    matrix_size_ = size;
  }

  /// M_n with its normalised trace.
  static std::shared_ptr<const MultiMatrixAlgebra> full_matrix(int n) {
    return std::make_shared<const MultiMatrixAlgebra>(std::vector<int>{n},
                                                      std::vector<double>{1.0 / n});
  }

  /// Trace vector with every minimal projection of equal trace.
  static std::shared_ptr<const MultiMatrixAlgebra> uniform(std::vector<int> dims) {
    const int total = std::accumulate(dims.begin(), dims.end(), 0);
    std::vector<double> t(dims.size(), 1.0 / total);
    return std::make_shared<const MultiMatrixAlgebra>(std::move(dims), std::move(t));
  }

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<double>& trace_vector() const { return trace_; }
  std::size_t num_blocks() const { return dims_.size(); }
  int dim(std::size_t block) const { return dims_[block]; }
  double trace_weight(std::size_t block) const { return trace_[block]; }
  int gns_dimension() const { return gns_dim_; }
  int gns_offset(std::size_t block) const { return gns_offsets_[block]; }
  /// Size of the direct-sum matrix realisation.
  int matrix_size() const { return matrix_size_; }
  int matrix_offset(std::size_t block) const { return matrix_offsets_[block]; }

  bool same_as(const MultiMatrixAlgebra& other) const {
    return dims_ == other.dims_ && trace_ == other.trace_;
  }

 private:
  std::vector<int> dims_;
  std::vector<double> trace_;
  std::vector<int> gns_offsets_;
  std::vector<int> matrix_offsets_;
  int gns_dim_ = 0;
  int matrix_size_ = 0;
};

using AlgebraPtr = std::shared_ptr<const MultiMatrixAlgebra>;

class Element {
 public:
  Element() = default;

  Element(AlgebraPtr parent, std::vector<CMatrix> blocks)
      : parent_(std::move(parent)), blocks_(std::move(blocks)) {
    if (!parent_) fail(ErrorCode::InvalidInput, "element without parent algebra");
    if (blocks_.size() != parent_->num_blocks())
      fail(ErrorCode::InvalidInput, "element block count does not match its algebra");
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const int n = parent_->dim(i);
      if (blocks_[i].rows() != n || blocks_[i].cols() != n)
        fail(ErrorCode::InvalidInput, "element block size does not match its algebra");
    }
  }

  static Element zero(const AlgebraPtr& parent) {
    std::vector<CMatrix> b;
    for (int n : parent->dims()) b.push_back(CMatrix::Zero(n, n));
    return Element(parent, std::move(b));
  }

  static Element identity(const AlgebraPtr& parent) {
    std::vector<CMatrix> b;
    for (int n : parent->dims()) b.push_back(CMatrix::Identity(n, n));
    return Element(parent, std::move(b));
  }

  /// e_{row,col} inside block `block`.
  static Element matrix_unit(const AlgebraPtr& parent, std::size_t block, int row, int col) {
    Element e = zero(parent);
    e.blocks_[block](row, col) = 1.0;
    return e;
  }

  /// Minimal central projection of block `block`.
  static Element central_projection(const AlgebraPtr& parent, std::size_t block) {
    Element e = zero(parent);
    e.blocks_[block].setIdentity();
    return e;
  }

  const AlgebraPtr& parent() const { return parent_; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t i) const { return blocks_[i]; }
  CMatrix& block(std::size_t i) { return blocks_[i]; }

  Element adjoint() const {
    std::vector<CMatrix> b;
    b.reserve(blocks_.size());
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return Element(parent_, std::move(b));
  }

  Element& operator+=(const Element& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
  }
  Element& operator-=(const Element& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
  }
  Element& operator*=(cplx s) {
    for (auto& m : blocks_) m *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, cplx s) { return a *= s; }
  friend Element operator*(cplx s, Element a) { return a *= s; }
  friend Element operator*(const Element& a, const Element& b) {
    a.check_same(b);
    std::vector<CMatrix> out;
    out.reserve(a.blocks_.size());
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) out.push_back(a.blocks_[i] * b.blocks_[i]);
    return Element(a.parent_, std::move(out));
  }

  /// Block-diagonal matrix of size sum n_i.
  CMatrix direct_sum() const {
    const int k = parent_->matrix_size();
    CMatrix m = CMatrix::Zero(k, k);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const int o = parent_->matrix_offset(i);
      const int n = parent_->dim(i);
      m.block(o, o, n, n) = blocks_[i];
    }
    return m;
  }

  /// Keeps only the diagonal blocks of a direct-sum matrix.
  static Element from_direct_sum(const AlgebraPtr& parent, const CMatrix& m) {
    std::vector<CMatrix> b;
    for (std::size_t i = 0; i < parent->num_blocks(); ++i) {
      const int o = parent->matrix_offset(i);
      const int n = parent->dim(i);
      b.push_back(m.block(o, o, n, n));
    }
    return Element(parent, std::move(b));
  }

  void check_same(const Element& o) const {
    if (parent_ != o.parent_ && !(parent_ && o.parent_ && parent_->same_as(*o.parent_)))
      fail(ErrorCode::InvalidInput, "elements belong to different algebras");
  }

 private:
  AlgebraPtr parent_;
  std::vector<CMatrix> blocks_;
};

/// tr(x) = sum_i t_i Tr(x_i).
inline cplx trace_value(const Element& x) {
  cplx s = 0.0;
  const auto& alg = *x.parent();
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) s += alg.trace_weight(i) * x.block(i).trace();
  return s;
}

inline CVector to_gns(const Element& x) {
  const auto& alg = *x.parent();
  CVector v(alg.gns_dimension());
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const int n = alg.dim(i);
    const int o = alg.gns_offset(i);
    const double w = std::sqrt(alg.trace_weight(i));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) v(o + a * n + b) = w * x.block(i)(a, b);
  }
  return v;
}

inline Element from_gns(const AlgebraPtr& alg, const CVector& v) {
  if (v.size() != alg->gns_dimension())
    fail(ErrorCode::InvalidInput, "GNS vector has the wrong length");
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < alg->num_blocks(); ++i) {
    const int n = alg->dim(i);
    const int o = alg->gns_offset(i);
    const double w = 1.0 / std::sqrt(alg->trace_weight(i));
    CMatrix m(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) m(a, b) = w * v(o + a * n + b);
    blocks.push_back(std::move(m));
  }
  return Element(alg, std::move(blocks));
}

/// |x|_2 = tr(x* x)^{1/2}.
inline double gns_norm(const Element& x) { return to_gns(x).norm(); }

/// Operator (C*) norm: largest spectral norm over blocks.
inline double cstar_norm(const Element& x) {
  double m = 0.0;
  for (const auto& b : x.blocks()) m = std::max(m, op_norm(b));
  return m;
}

/// Largest absolute entry over all blocks.
inline double max_abs_entry(const Element& x) {
  double m = 0.0;
  for (const auto& b : x.blocks())
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

/// Left regular representation on GNS coordinates: L_x y^ = (x y)^.
inline CMatrix left_mult(const Element& x) {
  const auto& alg = *x.parent();
  const int d = alg.gns_dimension();
  CMatrix op = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const int n = alg.dim(i);
    const int o = alg.gns_offset(i);
    const CMatrix& xi = x.block(i);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b) op(o + a * n + b, o + c * n + b) = xi(a, c);
  }
  return op;
}

/// Right multiplication on GNS coordinates: R_x y^ = (y x)^.
inline CMatrix right_mult(const Element& x) {
  const auto& alg = *x.parent();
  const int d = alg.gns_dimension();
  CMatrix op = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const int n = alg.dim(i);
    const int o = alg.gns_offset(i);
    const CMatrix& xi = x.block(i);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b) op(o + a * n + b, o + a * n + c) = xi(c, b);
  }
  return op;
}

/// Index permutation x^ -> (x^T)^ on GNS coordinates.
inline std::vector<int> gns_transpose_permutation(const MultiMatrixAlgebra& alg) {
  std::vector<int> perm(static_cast<std::size_t>(alg.gns_dimension()));
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const int n = alg.dim(i);
    const int o = alg.gns_offset(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) perm[static_cast<std::size_t>(o + a * n + b)] = o + b * n + a;
  }
  return perm;
}

/// Modular conjugation J x^ = (x*)^ applied to a GNS vector.
inline CVector apply_modular_conjugation(const MultiMatrixAlgebra& alg, const CVector& v) {
  const auto perm = gns_transpose_permutation(alg);
  CVector out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k)
    out(k) = std::conj(v(perm[static_cast<std::size_t>(k)]));
  return out;
}

/// J A J for a linear operator A on the GNS space.
inline CMatrix conjugate_by_modular(const MultiMatrixAlgebra& alg, const CMatrix& op) {
  const auto perm = gns_transpose_permutation(alg);
  const Eigen::Index d = op.rows();
  CMatrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      out(r, c) = std::conj(op(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]));
  return out;
}

/// A unital *-subalgebra of an ambient multi-matrix algebra, held as a
/// GNS-orthonormal spanning family.
class Subalgebra {
 public:
  /// Trusts that the orthonormal columns span a unital *-subalgebra.
  static Subalgebra from_coords(AlgebraPtr ambient, CMatrix orthonormal_coords) {
    Subalgebra s;
    s.ambient_ = std::move(ambient);
    s.coords_ = std::move(orthonormal_coords);
    s.basis_.reserve(static_cast<std::size_t>(s.coords_.cols()));
    for (Eigen::Index k = 0; k < s.coords_.cols(); ++k)
      s.basis_.push_back(from_gns(s.ambient_, s.coords_.col(k)));
    return s;
  }

  /// Builds from a spanning family and verifies closure under products and
  /// adjoints and that the unit lies in the span.
  static Subalgebra from_span(const AlgebraPtr& ambient, const std::vector<Element>& span,
                              const Tolerance& tol = {}) {
    CMatrix raw(ambient->gns_dimension(), static_cast<Eigen::Index>(span.size()));
    for (std::size_t k = 0; k < span.size(); ++k) {
      span[k].check_same(Element::zero(ambient));
      raw.col(static_cast<Eigen::Index>(k)) = to_gns(span[k]);
    }
    require_finite(raw, "Subalgebra::from_span");
    Subalgebra s = from_coords(ambient, orthonormalize_columns(raw));
    const double limit = 1e3 * tol.eps_rel;
    const Element one = Element::identity(ambient);
    if (s.residual(one) > limit)
      fail(ErrorCode::NotSubalgebra, "span does not contain the unit");
    for (const auto& a : s.basis_) {
      if (s.residual(a.adjoint()) > limit)
        fail(ErrorCode::NotSubalgebra, "span is not closed under the adjoint");
      for (const auto& b : s.basis_)
        if (s.residual(a * b) > limit * (1.0 + cstar_norm(a) * gns_norm(b)))
          fail(ErrorCode::NotSubalgebra, "span is not closed under products");
    }
    return s;
  }

  static Subalgebra scalars(const AlgebraPtr& ambient) {
    return from_coords(ambient, to_gns(Element::identity(ambient)));
  }

  static Subalgebra whole(const AlgebraPtr& ambient) {
    const int d = ambient->gns_dimension();
    return from_coords(ambient, CMatrix::Identity(d, d));
  }

  const AlgebraPtr& ambient() const { return ambient_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<Element>& span_basis() const { return basis_; }
  /// Orthonormal GNS coordinates of the span basis (columns).
  const CMatrix& coords() const { return coords_; }
  /// Orthogonal projection of L^2(A) onto the subalgebra.
  CMatrix projector() const { return projector_onto(coords_); }

  /// Trace-preserving conditional expectation (GNS orthogonal projection).
  Element expectation(const Element& x) const {
    x.check_same(Element::zero(ambient_));
    const CVector v = to_gns(x);
    return from_gns(ambient_, coords_ * (coords_.adjoint() * v));
  }

  /// |x - E(x)|_2.
  double residual(const Element& x) const {
    const CVector v = to_gns(x);
    return (v - coords_ * (coords_.adjoint() * v)).norm();
  }

  /// Largest residual of `other`'s basis against this span.
  double containment_residual(const Subalgebra& other) const {
    double worst = 0.0;
    for (const auto& b : other.span_basis()) worst = std::max(worst, residual(b));
    return worst;
  }

  bool contains(const Subalgebra& other, double tol = 1e-8) const {
    return containment_residual(other) <= tol;
  }

 private:
  AlgebraPtr ambient_;
  CMatrix coords_;
  std::vector<Element> basis_;
};

inline Element conditional_expectation(const Element& x, const Subalgebra& b) {
  return b.expectation(x);
}

/// {x in A : xs = sx for every s in S}, via the kernel of the stacked
/// commutator maps R_s - L_s on GNS coordinates.
inline Subalgebra relative_commutant(const Subalgebra& s, const Tolerance& tol = {}) {
  const auto& amb = s.ambient();
  const int d = amb->gns_dimension();
  std::vector<CMatrix> pieces;
  for (const auto& b : s.span_basis()) {
    // The unit commutes with everything; skip scalar multiples cheaply.
    CMatrix c = right_mult(b) - left_mult(b);
    if (c.norm() > 0) pieces.push_back(std::move(c));
  }
  if (pieces.empty()) return Subalgebra::whole(amb);
  CMatrix stacked(static_cast<Eigen::Index>(pieces.size()) * d, d);
  for (std::size_t k = 0; k < pieces.size(); ++k)
    stacked.middleRows(static_cast<Eigen::Index>(k) * d, d) = pieces[k];
  return Subalgebra::from_coords(amb, nullspace(stacked, tol));
}

/// Smallest unital *-subalgebra containing `family`: the span of all words
/// in the family and its adjoints, grown until the dimension stabilises.
inline Subalgebra generated_subalgebra(const std::vector<Element>& family, const AlgebraPtr& ambient) {
  std::vector<Element> gens;
  for (const auto& x : family) {
    x.check_same(Element::zero(ambient));
    gens.push_back(x);
    gens.push_back(x.adjoint());
  }
  const int d = ambient->gns_dimension();
  CMatrix current = orthonormalize_columns(to_gns(Element::identity(ambient)));
  {
    CMatrix seed(d, 1 + static_cast<Eigen::Index>(gens.size()));
    seed.col(0) = current.col(0);
    for (std::size_t k = 0; k < gens.size(); ++k) seed.col(static_cast<Eigen::Index>(k) + 1) = to_gns(gens[k]);
    current = orthonormalize_columns(seed);
  }
  std::vector<CMatrix> lefts;
  for (const auto& g : gens) lefts.push_back(left_mult(g));
  while (true) {
    const Eigen::Index before = current.cols();
    if (before == d) break;
    CMatrix grown(d, before * (1 + static_cast<Eigen::Index>(lefts.size())));
    grown.leftCols(before) = current;
    for (std::size_t k = 0; k < lefts.size(); ++k)
      grown.middleCols(before * (1 + static_cast<Eigen::Index>(k)), before) = lefts[k] * current;
    current = orthonormalize_columns(grown);
    if (current.cols() == before) break;
  }
  return Subalgebra::from_coords(ambient, current);
}

/// Span of the union of two subalgebras' bases, closed under products.
inline Subalgebra join(const Subalgebra& a, const Subalgebra& b) {
  std::vector<Element> all = a.span_basis();
  all.insert(all.end(), b.span_basis().begin(), b.span_basis().end());
  return generated_subalgebra(all, a.ambient());
}

using IntMatrix = std::vector<std::vector<int>>;

/// Unital embedding of `source` into `target` with inclusion matrix Lambda
/// (rows: source blocks, columns: target blocks). Target block j receives
/// source block k with multiplicity Lambda(k, j), blocks in ascending k,
/// then conjugated by the optional unitary of block j.
class UnitalEmbedding {
 public:
  UnitalEmbedding(std::vector<int> source_dims, AlgebraPtr target,
                  std::vector<std::vector<int>> inclusion,
                  std::vector<CMatrix> block_unitaries = {})
      : target_(std::move(target)), lambda_(std::move(inclusion)),
        unitaries_(std::move(block_unitaries)) {
    const std::size_t k = source_dims.size();
    const std::size_t l = target_->num_blocks();
    if (lambda_.size() != k)
      fail(ErrorCode::InvalidInput, "inclusion matrix must have one row per source block");
    for (std::size_t i = 0; i < k; ++i) {
      if (lambda_[i].size() != l)
        fail(ErrorCode::InvalidInput, "inclusion matrix must have one column per target block");
      bool any = false;
      for (int v : lambda_[i]) {
        if (v < 0) fail(ErrorCode::InvalidInput, "inclusion matrix entries must be nonnegative");
        any = any || v > 0;
      }
      if (!any)
        fail(ErrorCode::NonUnitalInclusion, "source block " + std::to_string(i) + " is not embedded");
    }
    for (std::size_t j = 0; j < l; ++j) {
      int n = 0;
      for (std::size_t i = 0; i < k; ++i) n += lambda_[i][j] * source_dims[i];
      if (n != target_->dim(j))
        fail(ErrorCode::NonUnitalInclusion,
             "unitality n = Lambda^t m fails at target block " + std::to_string(j) + ": " +
                 std::to_string(n) + " != " + std::to_string(target_->dim(j)));
    }
    if (!unitaries_.empty()) {
      if (unitaries_.size() != l)
        fail(ErrorCode::InvalidInput, "need one block unitary per target block");
      for (std::size_t j = 0; j < l; ++j) {
        const auto& u = unitaries_[j];
        const int n = target_->dim(j);
        if (u.rows() != n || u.cols() != n)
          fail(ErrorCode::InvalidInput, "block unitary has the wrong size");
        if ((u.adjoint() * u - CMatrix::Identity(n, n)).norm() > 1e-10)
          fail(ErrorCode::InvalidInput, "block unitary is not unitary");
      }
    }
    std::vector<double> t(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l; ++j) t[i] += lambda_[i][j] * target_->trace_weight(j);
    source_ = std::make_shared<const MultiMatrixAlgebra>(std::move(source_dims), std::move(t));
  }

  const AlgebraPtr& source() const { return source_; }
  const AlgebraPtr& target() const { return target_; }
  const std::vector<std::vector<int>>& inclusion_matrix() const { return lambda_; }

  Element apply(const Element& x) const {
    x.check_same(Element::zero(source_));
    std::vector<CMatrix> blocks;
    for (std::size_t j = 0; j < target_->num_blocks(); ++j) {
      const int n = target_->dim(j);
      CMatrix m = CMatrix::Zero(n, n);
      int o = 0;
      for (std::size_t i = 0; i < source_->num_blocks(); ++i) {
        const int mi = source_->dim(i);
        for (int c = 0; c < lambda_[i][j]; ++c) {
          m.block(o, o, mi, mi) = x.block(i);
          o += mi;
        }
      }
      if (!unitaries_.empty()) m = unitaries_[j] * m * unitaries_[j].adjoint();
      blocks.push_back(std::move(m));
    }
    return Element(target_, std::move(blocks));
  }

  /// The image as a subalgebra of the target.
  Subalgebra image() const {
    std::vector<Element> span;
    for (std::size_t i = 0; i < source_->num_blocks(); ++i)
      for (int a = 0; a < source_->dim(i); ++a)
        for (int b = 0; b < source_->dim(i); ++b)
          span.push_back(apply(Element::matrix_unit(source_, i, a, b)));
    CMatrix raw(target_->gns_dimension(), static_cast<Eigen::Index>(span.size()));
    for (std::size_t k = 0; k < span.size(); ++k) raw.col(static_cast<Eigen::Index>(k)) = to_gns(span[k]);
    return Subalgebra::from_coords(target_, orthonormalize_columns(raw));
  }

 private:
  AlgebraPtr source_;
  AlgebraPtr target_;
  std::vector<std::vector<int>> lambda_;
  std::vector<CMatrix> unitaries_;
};

/// Random element of a subalgebra (complex Gaussian coefficients on its
/// orthonormal span basis).
inline Element random_element(const Subalgebra& b, Rng& rng) {
  CVector c(static_cast<Eigen::Index>(b.dimension()));
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = rng.complex_normal();
  return from_gns(b.ambient(), b.coords() * c);
}

inline Element random_self_adjoint(const Subalgebra& b, Rng& rng) {
  const Element x = random_element(b, rng);
  return (x + x.adjoint()) * cplx(0.5);
}

/// Random unitary of the ambient algebra (Haar in every block).
inline Element random_unitary_element(const AlgebraPtr& alg, Rng& rng) {
  std::vector<CMatrix> b;
  for (int n : alg->dims()) b.push_back(random_unitary(n, rng));
  return Element(alg, std::move(b));
}

/// max(|u*u - 1|, |uu* - 1|) in C*-norm.
inline double unitarity_defect(const Element& u) {
  const Element one = Element::identity(u.parent());
  return std::max(cstar_norm(u.adjoint() * u - one), cstar_norm(u * u.adjoint() - one));
}

}  // namespace ppbasis
