#pragma once

// Jones basic construction N ⊆ M ⊆ M1 realised on the GNS space L^2(M, tr).
// M1 elements are raw D x D operators (D = dim M); their block structure is
// recovered through a Wedderburn decomposition of the commutant of the
// right N-action.

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/errors.hpp"
#include "ppbasis/linalg.hpp"
#include "ppbasis/wedderburn.hpp"

namespace ppbasis {

struct MarkovData {
  double beta = 0.0;
  std::vector<double> t0;  // trace vector of the smaller algebra
  std::vector<double> t1;  // trace vector of the larger algebra
  double eigen_residual = 0.0;  // |Lambda Lambda^t t0 - beta t0|
};

/// Markov trace of a connected unital inclusion with inclusion matrix
/// `lambda` (rows: blocks of the smaller algebra, of sizes `source_dims`).
/// beta is the Perron eigenvalue of Lambda Lambda^t, t0 its positive
/// eigenvector normalised by sum m_i t0_i = 1, and t1 = Lambda^t t0 / beta.
inline MarkovData markov_trace(const IntMatrix& lambda, const std::vector<int>& source_dims) {
  const std::size_t k = lambda.size();
  if (k == 0 || source_dims.size() != k)
    fail(ErrorCode::InvalidInput, "inclusion matrix and source dimensions disagree");
  const std::size_t l = lambda[0].size();
  for (const auto& row : lambda) {
    if (row.size() != l) fail(ErrorCode::InvalidInput, "ragged inclusion matrix");
    bool any = false;
    for (int v : row) {
      if (v < 0) fail(ErrorCode::InvalidInput, "negative inclusion multiplicity");
      any = any || v > 0;
    }
    if (!any) fail(ErrorCode::NonUnitalInclusion, "inclusion matrix has a zero row");
  }
  for (std::size_t j = 0; j < l; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < k; ++i) any = any || lambda[i][j] > 0;
    if (!any) fail(ErrorCode::NonUnitalInclusion, "inclusion matrix has a zero column");
  }
  // Connectivity of the bipartite Bratteli graph.
  std::vector<bool> seen_row(k, false), seen_col(l, false);
  std::queue<std::pair<bool, std::size_t>> todo;
  todo.push({true, 0});
  seen_row[0] = true;
  while (!todo.empty()) {
    auto [is_row, idx] = todo.front();
    todo.pop();
    if (is_row) {
      for (std::size_t j = 0; j < l; ++j)
        if (lambda[idx][j] > 0 && !seen_col[j]) seen_col[j] = true, todo.push({false, j});
    } else {
      for (std::size_t i = 0; i < k; ++i)
        if (lambda[i][idx] > 0 && !seen_row[i]) seen_row[i] = true, todo.push({true, i});
    }
  }
  for (bool s : seen_row)
    if (!s) fail(ErrorCode::NonConnected, "Bratteli diagram is disconnected; Perron vector is ambiguous");

  Eigen::MatrixXd lam(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < l; ++j) lam(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lambda[i][j];
  const Eigen::MatrixXd llt = lam * lam.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(llt);
  const Eigen::Index top = static_cast<Eigen::Index>(k) - 1;
  MarkovData out;
  out.beta = es.eigenvalues()(top);
  Eigen::VectorXd v = es.eigenvectors().col(top);
  if (v.sum() < 0) v = -v;
  double norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) norm += source_dims[i] * v(static_cast<Eigen::Index>(i));
  v /= norm;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v(i) > 0))
      fail(ErrorCode::NonConnected, "Perron vector is not strictly positive");
  out.eigen_residual = (llt * v - out.beta * v).norm();
  const Eigen::VectorXd t1 = lam.transpose() * v / out.beta;
  out.t0.assign(v.data(), v.data() + v.size());
  out.t1.assign(t1.data(), t1.data() + t1.size());
  return out;
}

/// L^2(A, tr) with its cyclic vector and modular conjugation.
struct GnsSpace {
  AlgebraPtr algebra;

  int dimension() const { return algebra->gns_dimension(); }
  CVector cyclic_vector() const { return to_gns(Element::identity(algebra)); }
  CVector vector_of(const Element& x) const { return to_gns(x); }
  CMatrix left(const Element& x) const { return left_mult(x); }
  CVector modular_conjugation(const CVector& v) const { return apply_modular_conjugation(*algebra, v); }
  CMatrix conjugate(const CMatrix& op) const { return conjugate_by_modular(*algebra, op); }
};

class BasicConstruction {
 public:
  explicit BasicConstruction(Subalgebra n, std::uint64_t seed = 0, const Tolerance& tol = {})
      : n_(std::move(n)), tol_(tol) {
    const auto& m = n_.ambient();
    gns_ = GnsSpace{m};
    const int d = m->gns_dimension();
    e1_ = n_.projector();
    operators_ = MultiMatrixAlgebra::full_matrix(d);

    // M1 = (J N J)' inside B(L^2(M)).
    CMatrix raw(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(n_.dimension()));
    for (std::size_t k = 0; k < n_.dimension(); ++k)
      raw.col(static_cast<Eigen::Index>(k)) =
          to_gns(as_operator(gns_.conjugate(left_mult(n_.span_basis()[k]))));
    const Subalgebra right_n = Subalgebra::from_coords(operators_, orthonormalize_columns(raw));
    m1_ = relative_commutant(right_n, tol_);
    m1_structure_ = wedderburn_decompose(m1_, seed, tol_);
    n_structure_ = wedderburn_decompose(n_, seed, tol_);
    lambda_ = inclusion_matrix(*n_structure_);

    // Markov mode when the trace of M is the Markov trace of N ⊆ M.
    try {
      MarkovData md = markov_trace(lambda_, n_structure_->dims());
      bool match = true;
      for (std::size_t j = 0; j < md.t1.size(); ++j)
        match = match && std::abs(md.t1[j] - m->trace_weight(j)) <= 1e-9;
      if (match) {
        markov_ = md;
        compute_m1_trace();
      }
    } catch (const Error&) {
      markov_.reset();
    }
  }

  const Subalgebra& N() const { return n_; }
  const AlgebraPtr& M() const { return n_.ambient(); }
  const GnsSpace& gns() const { return gns_; }
  const Tolerance& tolerance() const { return tol_; }
  int dimension() const { return gns_.dimension(); }
  CMatrix identity() const { return CMatrix::Identity(dimension(), dimension()); }

  /// Jones projection: orthogonal projection of L^2(M) onto L^2(N).
  const CMatrix& e1() const { return e1_; }
  /// M1 as a subalgebra of B(L^2(M)) = M_D.
  const Subalgebra& M1() const { return m1_; }
  const Wedderburn& M1_structure() const { return *m1_structure_; }
  const Wedderburn& N_structure() const { return *n_structure_; }
  const AlgebraPtr& operator_algebra() const { return operators_; }
  /// Inclusion matrix of N in M (rows: blocks of N in Wedderburn order).
  const IntMatrix& inclusion() const { return lambda_; }
  const std::optional<MarkovData>& markov() const { return markov_; }
  bool markov_mode() const { return markov_.has_value(); }

  Element as_operator(const CMatrix& op) const { return Element(operators_, {op}); }

  /// |X - E_{M1}(X)| measured in the operator algebra's GNS norm.
  double m1_residual(const CMatrix& op) const { return m1_.residual(as_operator(op)); }

  /// lambda with v = L_lambda e1, read off as v applied to the cyclic vector.
  Element pushdown(const CMatrix& v) const {
    const int d = dimension();
    if (v.rows() != d || v.cols() != d) fail(ErrorCode::InvalidInput, "operator has the wrong size");
    const double scale = 1.0 + op_norm(v);
    if (op_norm(v - v * e1_) > 1e-8 * scale)
      fail(ErrorCode::NotSupportedOnE1, "operator does not satisfy v = v e1");
    Element lambda = from_gns(M(), v * gns_.cyclic_vector());
    if (op_norm(left_mult(lambda) * e1_ - v) > 1e-8 * scale)
      fail(ErrorCode::NotSupportedOnE1, "operator is not of the form L_x e1 (not in M1)");
    return lambda;
  }

  /// Canonical trace on M1 extending tr (Markov mode only): a minimal
  /// projection of the block containing z_k e1 = c_k e1 has trace
  /// tr(c_k) / (beta * rank_k(e1)).
  const std::vector<double>& m1_trace_vector() const {
    require_markov();
    return m1_trace_;
  }

  double m1_trace(const CMatrix& x) const {
    require_markov();
    const Element op = as_operator(x);
    double total = 0.0;
    const auto& blocks = m1_structure_->blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k)
      total += m1_trace_[k] * trace_value(blocks[k].central * op).real() /
               trace_value(blocks[k].unit(0, 0)).real();
    return total;
  }

  cplx m1_trace_complex(const CMatrix& x) const {
    require_markov();
    const Element op = as_operator(x);
    cplx total = 0.0;
    const auto& blocks = m1_structure_->blocks();
    for (std::size_t k = 0; k < blocks.size(); ++k)
      total += m1_trace_[k] * trace_value(blocks[k].central * op) /
               trace_value(blocks[k].unit(0, 0)).real();
    return total;
  }

  /// Trace-preserving expectation of M1 onto M (Markov mode only):
  /// E_M(X) = sum_k tr_{M1}(X L_{b_k}^*) b_k over a GNS-orthonormal basis of M.
  Element expectation_onto_M(const CMatrix& x) const {
    require_markov();
    const Subalgebra whole = Subalgebra::whole(M());
    Element out = Element::zero(M());
    for (const auto& b : whole.span_basis())
      out += b * m1_trace_complex(x * left_mult(b).adjoint());
    return out;
  }

 private:
  void require_markov() const {
    if (!markov_)
      fail(ErrorCode::InvalidInput, "the trace on M1 is only defined when tr is the Markov trace");
  }

  void compute_m1_trace() {
    const auto& blocks = m1_structure_->blocks();
    m1_trace_.clear();
    for (const auto& blk : blocks) {
      const CMatrix z = blk.central.block(0);
      const CMatrix ze = z * e1_;
      const double rank_e1 =
          trace_value(as_operator(ze)).real() / trace_value(blk.unit(0, 0)).real();
      const Element c = from_gns(M(), ze * gns_.cyclic_vector());
      m1_trace_.push_back(trace_value(c).real() / (markov_->beta * rank_e1));
    }
  }

  Subalgebra n_;
  Tolerance tol_;
  GnsSpace gns_;
  CMatrix e1_;
  AlgebraPtr operators_;
  Subalgebra m1_;
  std::optional<Wedderburn> m1_structure_;
  std::optional<Wedderburn> n_structure_;
  IntMatrix lambda_;
  std::optional<MarkovData> markov_;
  std::vector<double> m1_trace_;
};

/// e1 for N ⊆ M; alias kept for symmetry with intermediate projections.
inline CMatrix jones_projection(const BasicConstruction& bc) { return bc.e1(); }

}  // namespace ppbasis
