#pragma once

// Wedderburn decomposition of a concrete *-subalgebra B of a multi-matrix
// algebra: minimal central projections, matrix units per simple block, the
// induced trace vector, and the isomorphism to the abstract algebra.
//
// Center: B ∩ {r1, r2}' for two seeded-random elements of B (a generic pair
// generates B), verified against the whole span basis. Blocks: spectral
// projections of a random self-adjoint central element. Matrix units:
// spectral projections of a random self-adjoint element compressed to the
// block, chained through p_k b p_1.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/errors.hpp"
#include "ppbasis/linalg.hpp"

namespace ppbasis {

struct WedderburnBlock {
  int dim = 0;
  double trace = 0.0;  // trace of a minimal projection
  Element central;     // minimal central projection
  std::vector<Element> units;  // units[p * dim + q] = e_{pq}

  const Element& unit(int p, int q) const { return units[static_cast<std::size_t>(p * dim + q)]; }
};

class Wedderburn {
 public:
  Wedderburn(AlgebraPtr ambient, std::vector<WedderburnBlock> blocks)
      : ambient_(std::move(ambient)), blocks_(std::move(blocks)) {
    std::vector<int> dims;
    std::vector<double> traces;
    double total = 0.0;
    for (const auto& b : blocks_) {
      dims.push_back(b.dim);
      traces.push_back(b.trace);
      total += b.dim * b.trace;
    }
    for (auto& t : traces) t /= total;
    abstract_ = std::make_shared<const MultiMatrixAlgebra>(std::move(dims), std::move(traces));
  }

  const AlgebraPtr& ambient() const { return ambient_; }
  const AlgebraPtr& abstract() const { return abstract_; }
  const std::vector<WedderburnBlock>& blocks() const { return blocks_; }
  const std::vector<int>& dims() const { return abstract_->dims(); }
  const std::vector<double>& trace_vector() const { return abstract_->trace_vector(); }

  /// Coordinates in the abstract algebra: y_j(p, q) = tr(e_qp x) / tr(e_11).
  Element to_abstract(const Element& x) const {
    std::vector<CMatrix> out;
    for (const auto& b : blocks_) {
      CMatrix m(b.dim, b.dim);
      const double norm = trace_value(b.unit(0, 0)).real();
      for (int p = 0; p < b.dim; ++p)
        for (int q = 0; q < b.dim; ++q) m(p, q) = trace_value(b.unit(q, p) * x) / norm;
      out.push_back(std::move(m));
    }
    return Element(abstract_, std::move(out));
  }

  Element from_abstract(const Element& y) const {
    y.check_same(Element::zero(abstract_));
    Element x = Element::zero(ambient_);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const auto& b = blocks_[j];
      for (int p = 0; p < b.dim; ++p)
        for (int q = 0; q < b.dim; ++q) {
          const cplx c = y.block(j)(p, q);
          if (c != cplx(0.0)) x += b.unit(p, q) * c;
        }
    }
    return x;
  }

 private:
  AlgebraPtr ambient_;
  AlgebraPtr abstract_;
  std::vector<WedderburnBlock> blocks_;
};

namespace detail {

inline Element commutator(const Element& a, const Element& b) { return a * b - b * a; }

/// Orthonormal basis (columns) of the range of a projection given as a
/// direct-sum matrix.
inline CMatrix range_basis(const CMatrix& projection) {
  const HermitianEigen eig = hermitian_eigen(projection);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > 0.5) keep.push_back(i);
  CMatrix out(projection.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = eig.vectors.col(keep[k]);
  return out;
}

/// Spectral projections of a self-adjoint direct-sum matrix restricted to the
/// range of `support`; empty when the clustering does not give `expected`
/// groups of equal size separated by more than `min_gap`.
inline std::vector<CMatrix> spectral_split(const CMatrix& h, const CMatrix& support_range,
                                           std::size_t expected, double min_gap,
                                           bool equal_sizes) {
  const CMatrix compressed = support_range.adjoint() * h * support_range;
  const HermitianEigen eig = hermitian_eigen(compressed);
  const double spread =
      eig.values.size() > 0 ? std::max(1.0, eig.values.cwiseAbs().maxCoeff()) : 1.0;
  const auto clusters = cluster_sorted(eig.values, 1e-7 * spread);
  if (clusters.size() != expected) return {};
  if (clusters.size() > 1 && min_cluster_separation(eig.values, clusters) < min_gap * spread)
    return {};
  const Eigen::Index size = clusters.front().second - clusters.front().first;
  std::vector<CMatrix> out;
  for (const auto& [begin, end] : clusters) {
    if (equal_sizes && end - begin != size) return {};
    const CMatrix cols = support_range * eig.vectors.middleCols(begin, end - begin);
    out.push_back(cols * cols.adjoint());
  }
  return out;
}

inline bool lexicographically_greater(const RVector& a, const RVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) > b(i) + 1e-6) return true;
    if (a(i) < b(i) - 1e-6) return false;
  }
  return false;
}

}  // namespace detail

/// Z(B) = B ∩ B': kernel of the commutator maps of the spanning family,
/// restricted to B.
inline Subalgebra center(const Subalgebra& b, std::uint64_t seed = 0, const Tolerance& tol = {}) {
  (void)seed;
  const auto& amb = b.ambient();
  const Eigen::Index d = static_cast<Eigen::Index>(b.dimension());
  const int gd = amb->gns_dimension();
  CMatrix stacked(d * gd, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Element& r = b.span_basis()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < d; ++k)
      stacked.col(k).segment(i * gd, gd) = to_gns(detail::commutator(b.span_basis()[static_cast<std::size_t>(k)], r));
  }
  const CMatrix coeffs = nullspace(stacked, tol);
  return Subalgebra::from_coords(amb, orthonormalize_columns(b.coords() * coeffs));
}

inline Wedderburn wedderburn_decompose(const Subalgebra& b, std::uint64_t seed = 0,
                                       const Tolerance& tol = {}) {
  const auto& amb = b.ambient();
  const Element one = Element::identity(amb);
  const CMatrix one_ds = one.direct_sum();
  const CMatrix full_range = CMatrix::Identity(one_ds.rows(), one_ds.cols());
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  const Subalgebra z = center(b, seed, tol);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const std::size_t nblocks = z.dimension();

    std::vector<Element> centrals;
    if (nblocks == 1) {
      centrals.push_back(one);
    } else {
      const Element h = random_self_adjoint(z, rng);
      const auto projs = detail::spectral_split(h.direct_sum(), full_range, nblocks, 1e-4, false);
      if (projs.empty()) continue;
      for (const auto& p : projs) centrals.push_back(z.expectation(Element::from_direct_sum(amb, p)));
    }

    std::vector<WedderburnBlock> blocks;
    bool ok = true;
    std::size_t total_dim = 0;
    for (const auto& zc : centrals) {
      // dim(z B) via the rank of the compressed span.
      CMatrix cut(amb->gns_dimension(), static_cast<Eigen::Index>(b.dimension()));
      for (std::size_t k = 0; k < b.dimension(); ++k)
        cut.col(static_cast<Eigen::Index>(k)) = to_gns(zc * b.span_basis()[k]);
      const std::size_t block_dim = orthonormalize_columns(cut, 1e-8).cols();
      const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(block_dim))));
      if (n <= 0 || static_cast<std::size_t>(n * n) != block_dim) {
        ok = false;
        break;
      }
      total_dim += block_dim;

      WedderburnBlock blk;
      blk.dim = n;
      blk.central = zc;
      std::vector<Element> diag;
      if (n == 1) {
        diag.push_back(zc);
      } else {
        const Element h = random_self_adjoint(b, rng);
        const Element hz = zc * h * zc;
        const CMatrix range = detail::range_basis(zc.direct_sum());
        const auto projs = detail::spectral_split(hz.direct_sum(), range, static_cast<std::size_t>(n), 1e-4, true);
        if (projs.empty()) {
          ok = false;
          break;
        }
        for (const auto& p : projs) diag.push_back(b.expectation(Element::from_direct_sum(amb, p)));
      }

      // e_{k1} from p_k b p_1, normalised so that e_{k1}* e_{k1} = p_1.
      std::vector<Element> col1(static_cast<std::size_t>(n));
      col1[0] = diag[0];
      const double t1 = trace_value(diag[0]).real();
      for (int k = 1; k < n; ++k) {
        double best = -1.0;
        Element w;
        for (const auto& x : b.span_basis()) {
          Element cand = diag[static_cast<std::size_t>(k)] * x * diag[0];
          const double nn = gns_norm(cand);
          if (nn > best + 1e-12) {
            best = nn;
            w = std::move(cand);
          }
        }
        const double c = trace_value(w.adjoint() * w).real() / t1;
        if (!(c > 1e-12)) {
          ok = false;
          break;
        }
        col1[static_cast<std::size_t>(k)] = w * cplx(1.0 / std::sqrt(c));
      }
      if (!ok) break;
      blk.units.resize(static_cast<std::size_t>(n * n));
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          blk.units[static_cast<std::size_t>(p * n + q)] =
              col1[static_cast<std::size_t>(p)] * col1[static_cast<std::size_t>(q)].adjoint();
      blk.trace = trace_value(blk.unit(0, 0)).real();
      blocks.push_back(std::move(blk));
    }
    if (!ok || total_dim != b.dimension()) continue;

    // Canonical block order: central projections sorted by their diagonal in
    // the direct-sum realisation, largest first.
    std::vector<RVector> keys;
    for (const auto& blk : blocks) keys.push_back(blk.central.direct_sum().diagonal().real());
    std::vector<std::size_t> order(blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return detail::lexicographically_greater(keys[x], keys[y]);
    });
    std::vector<WedderburnBlock> sorted;
    for (std::size_t i : order) sorted.push_back(std::move(blocks[i]));
    return Wedderburn(amb, std::move(sorted));
  }
  fail(ErrorCode::DegenerateSpectrum,
       "could not separate the central spectrum of the subalgebra; retry with another seed");
}

/// Inclusion matrix of B (blocks from its Wedderburn decomposition) inside
/// the ambient algebra: entry (k, j) is the rank of a minimal projection of
/// block k of B in block j of the ambient algebra.
inline std::vector<std::vector<int>> inclusion_matrix(const Wedderburn& w) {
  const auto& amb = *w.ambient();
  std::vector<std::vector<int>> lambda;
  for (const auto& blk : w.blocks()) {
    std::vector<int> row;
    for (std::size_t j = 0; j < amb.num_blocks(); ++j)
      row.push_back(static_cast<int>(std::lround(blk.unit(0, 0).block(j).trace().real())));
    lambda.push_back(std::move(row));
  }
  return lambda;
}

}  // namespace ppbasis
