#pragma once

#include <gtest/gtest.h>

#include <memory>
#include <string>
#include <vector>

#include "ppbasis/ppbasis.hpp"

namespace ppbasis::testing {

inline AlgebraPtr algebra(std::vector<int> dims, std::vector<double> trace) {
  return std::make_shared<const MultiMatrixAlgebra>(std::move(dims), std::move(trace));
}

inline std::shared_ptr<const BasicConstruction> make_bc(const Subalgebra& n, std::uint64_t seed = 0) {
  return std::make_shared<const BasicConstruction>(n, seed);
}

/// N ⊆ M with M carrying the Markov trace of the inclusion.
inline Subalgebra markov_inclusion(const std::vector<int>& n_dims, const std::vector<int>& m_dims,
                                   const IntMatrix& lambda) {
  const MarkovData md = markov_trace(lambda, n_dims);
  return UnitalEmbedding(n_dims, algebra(m_dims, md.t1), lambda).image();
}

/// Diagonal C^k inside M_k.
inline Subalgebra diag_in_matrix(int k) {
  return markov_inclusion(std::vector<int>(static_cast<std::size_t>(k), 1), {k},
                          IntMatrix(static_cast<std::size_t>(k), std::vector<int>{1}));
}

/// Scalars inside M_n.
inline Subalgebra scalars_in_matrix(int n) { return markov_inclusion({1}, {n}, {{n}}); }

inline Element cyclic_shift(const AlgebraPtr& m, int k, int power = 1) {
  CMatrix u = CMatrix::Zero(k, k);
  for (int i = 0; i < k; ++i) u((i + power) % k, i) = 1.0;
  return Element(m, {u});
}

inline Element flip(const AlgebraPtr& m2) {
  return Element::matrix_unit(m2, 0, 0, 1) + Element::matrix_unit(m2, 0, 1, 0);
}

inline Element sigma_z(const AlgebraPtr& m2) {
  return Element::matrix_unit(m2, 0, 0, 0) - Element::matrix_unit(m2, 0, 1, 1);
}

inline Element random_in(const AlgebraPtr& a, Rng& rng) { return random_element(Subalgebra::whole(a), rng); }

/// Runs `f` and reports whether it threw ppbasis::Error with `code`.
template <class F>
::testing::AssertionResult throws_code(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw";
}

}  // namespace ppbasis::testing
