#pragma once

// Dense complex linear algebra kernel. Everything here is a pure function
// of its inputs; randomness only enters through an explicitly seeded Rng.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ppbasis/errors.hpp"

namespace ppbasis {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct Tolerance {
  double eps_rel = 1e-9;
  double eps_rank = 1e-10;
};

/// Seeded PRNG. Uniforms are built from raw 64-bit draws so that results do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  if (n == 0) return CMatrix(0, 0);
  CMatrix g = random_complex_matrix(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

inline CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  CMatrix g = random_complex_matrix(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

inline bool all_finite(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

inline void require_finite(const CMatrix& a, const char* where) {
  if (!all_finite(a)) fail(ErrorCode::InvalidInput, std::string(where) + ": non-finite entries");
}

inline RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector(0);
  Eigen::BDCSVD<CMatrix> svd(a);
  if (svd.singularValues().allFinite()) return svd.singularValues();
  return Eigen::JacobiSVD<CMatrix>(a).singularValues();
}

/// Spectral norm.
inline double op_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

/// Count of singular values above eps_rank * sigma_max * max(rows, cols).
inline std::size_t rank(const CMatrix& a, const Tolerance& tol = {}) {
  require_finite(a, "rank");
  if (a.size() == 0) return 0;
  const RVector s = singular_values(a);
  const double cutoff =
      tol.eps_rank * s(0) * static_cast<double>(std::max(a.rows(), a.cols()));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) ++r;
  return r;
}

/// Orthonormal columns spanning ker(A). A right singular vector belongs to
/// the kernel when its singular value is at most eps_rel * (1 + |A|).
/// Tall inputs are first reduced by Householder QR.
inline CMatrix nullspace(const CMatrix& a, const Tolerance& tol = {}) {
  require_finite(a, "nullspace");
  const Eigen::Index n = a.cols();
  if (n == 0) return CMatrix(0, 0);
  if (a.rows() == 0) return CMatrix::Identity(n, n);

  CMatrix reduced;
  if (a.rows() > n) {
    Eigen::HouseholderQR<CMatrix> qr(a);
    reduced = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    reduced = a;
  }
  Eigen::BDCSVD<CMatrix> bdc(reduced, Eigen::ComputeFullV);
  RVector s = bdc.singularValues();
  CMatrix v = bdc.matrixV();
  if (!s.allFinite() || !all_finite(v)) {
    // BDCSVD occasionally breaks down on clustered spectra.
    Eigen::JacobiSVD<CMatrix> jac(reduced, Eigen::ComputeFullV);
    s = jac.singularValues();
    v = jac.matrixV();
  }
  const double norm = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = tol.eps_rel * (1.0 + norm);
  Eigen::Index first_null = s.size();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cutoff) {
      first_null = i;
      break;
    }
  }
  return v.rightCols(n - first_null);
}

/// Orthonormal basis of the column span: left singular vectors whose
/// singular value exceeds tol * max(1, sigma_max).
inline CMatrix orthonormalize_columns(const CMatrix& vectors, double tol = 1e-10) {
  require_finite(vectors, "orthonormalize_columns");
  if (vectors.cols() == 0 || vectors.rows() == 0) return CMatrix(vectors.rows(), 0);
  Eigen::BDCSVD<CMatrix> bdc(vectors, Eigen::ComputeThinU);
  RVector s = bdc.singularValues();
  CMatrix u = bdc.matrixU();
  if (!s.allFinite() || !all_finite(u)) {
    Eigen::JacobiSVD<CMatrix> jac(vectors, Eigen::ComputeThinU);
    s = jac.singularValues();
    u = jac.matrixU();
  }
  const double cutoff = tol * std::max(1.0, s(0));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  return u.leftCols(r);
}

template <class Vec>
struct OrthonormalFamily {
  std::vector<Vec> vectors;
  std::size_t dimension = 0;
};

/// Gram-Schmidt against an arbitrary inner product `inner(x, y)`, linear in
/// its first argument. `Vec` needs +, -, and scaling by a complex scalar.
template <class Vec, class Inner>
OrthonormalFamily<Vec> gram_schmidt(const std::vector<Vec>& vectors, Inner inner,
                                    double tol = 1e-10) {
  OrthonormalFamily<Vec> out;
  for (const Vec& input : vectors) {
    const cplx self = inner(input, input);
    if (self.real() < -tol * (1.0 + std::abs(self)) ||
        std::abs(self.imag()) > tol * (1.0 + std::abs(self)))
      fail(ErrorCode::InvalidInnerProduct, "self inner product is not nonnegative");
    const double original = std::sqrt(std::max(0.0, self.real()));
    Vec v = input;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : out.vectors) v = v - q * inner(v, q);
    const cplx r2 = inner(v, v);
    if (r2.real() < -tol * (1.0 + original * original))
      fail(ErrorCode::InvalidInnerProduct, "self inner product is negative");
    const double residual = std::sqrt(std::max(0.0, r2.real()));
    if (residual > tol * std::max(1.0, original)) out.vectors.push_back(v * cplx(1.0 / residual));
  }
  out.dimension = out.vectors.size();
  return out;
}

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

inline HermitianEigen hermitian_eigen(const CMatrix& h) {
  require_finite(h, "hermitian_eigen");
  if (h.rows() == 0) return {RVector(0), CMatrix(0, 0)};
  const CMatrix sym = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Groups ascending eigenvalues into clusters whose consecutive gaps are at
/// most `gap`. Returns [begin, end) index ranges.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_sorted(const RVector& values,
                                                                         double gap) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values(i) - values(i - 1) > gap) {
      if (i > begin) out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

/// Smallest gap between distinct clusters, relative to the spectral spread.
inline double min_cluster_separation(const RVector& values,
                                     const std::vector<std::pair<Eigen::Index, Eigen::Index>>& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < c.size(); ++k)
    best = std::min(best, values(c[k].first) - values(c[k - 1].second - 1));
  return best;
}

/// Orthogonal projection onto the column span of an orthonormal matrix.
inline CMatrix projector_onto(const CMatrix& orthonormal_columns) {
  return orthonormal_columns * orthonormal_columns.adjoint();
}

inline double frobenius(const CMatrix& a) { return a.norm(); }

}  // namespace ppbasis
