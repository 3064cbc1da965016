#pragma once

// Path-algebra model B0 ⊆ B1 of a two-level Bratteli diagram C ⊂ A0 ⊂ A1.
//
// Edges from the root to block i of A0 are theta = (i, a), a < m_i. Edges
// of A0 ⊂ A1 are kappa = (i, j, c), c < Lambda(i, j). A path to block j of
// A1 is theta∘kappa; inside block j, paths are ordered by (i, c, a), which
// is the same order the canonical multiplicity embedding uses.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/errors.hpp"

namespace ppbasis {

struct RootEdge {
  int block = 0;  // block of A0
  int index = 0;  // a < m_block
  bool operator==(const RootEdge&) const = default;
};

struct LevelEdge {
  int source = 0;  // block of A0
  int range = 0;   // block of A1
  int copy = 0;    // c < Lambda(source, range)
  bool operator==(const LevelEdge&) const = default;
};

struct Path {
  RootEdge head;
  LevelEdge tail;
  int range() const { return tail.range; }
  bool operator==(const Path&) const = default;
};

class BratteliDiagram {
 public:
  BratteliDiagram(std::vector<int> a0_dims, std::vector<int> a1_dims, IntMatrix lambda)
      : m_(std::move(a0_dims)), n_(std::move(a1_dims)), lambda_(std::move(lambda)) {
    const std::size_t k = m_.size();
    const std::size_t l = n_.size();
    if (k == 0 || l == 0) fail(ErrorCode::InvalidInput, "empty level in Bratteli diagram");
    if (lambda_.size() != k) fail(ErrorCode::InvalidInput, "inclusion matrix needs one row per A0 block");
    for (const auto& row : lambda_) {
      if (row.size() != l) fail(ErrorCode::InvalidInput, "inclusion matrix needs one column per A1 block");
      for (int v : row)
        if (v < 0) fail(ErrorCode::InvalidInput, "negative edge multiplicity");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (m_[i] <= 0) fail(ErrorCode::InvalidInput, "A0 block dimensions must be positive");
      int out = 0;
      for (std::size_t j = 0; j < l; ++j) out += lambda_[i][j];
      if (out == 0)
        fail(ErrorCode::NonUnitalInclusion, "A0 block " + std::to_string(i) + " has no outgoing edge");
    }
    for (std::size_t j = 0; j < l; ++j) {
      int paths = 0;
      for (std::size_t i = 0; i < k; ++i) paths += lambda_[i][j] * m_[i];
      if (paths == 0)
        fail(ErrorCode::NonUnitalInclusion, "A1 block " + std::to_string(j) + " receives no edge");
      if (paths != n_[j])
        fail(ErrorCode::NonUnitalInclusion, "unitality n = Lambda^t m fails at A1 block " +
                                                std::to_string(j) + ": " + std::to_string(paths) +
                                                " paths, dimension " + std::to_string(n_[j]));
    }
    for (std::size_t i = 0; i < k; ++i)
      for (int a = 0; a < m_[i]; ++a) root_edges_.push_back({static_cast<int>(i), a});
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l; ++j)
        for (int c = 0; c < lambda_[i][j]; ++c)
          level_edges_.push_back({static_cast<int>(i), static_cast<int>(j), c});
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t i = 0; i < k; ++i)
        for (int c = 0; c < lambda_[i][j]; ++c)
          for (int a = 0; a < m_[i]; ++a)
            paths_.push_back({{static_cast<int>(i), a}, {static_cast<int>(i), static_cast<int>(j), c}});
  }

  const std::vector<int>& a0_dims() const { return m_; }
  const std::vector<int>& a1_dims() const { return n_; }
  const IntMatrix& inclusion() const { return lambda_; }

  /// Omega_{0]}, Omega_{[0,1]} and Omega_{1]} in enumeration order.
  const std::vector<RootEdge>& root_edges() const { return root_edges_; }
  const std::vector<LevelEdge>& level_edges() const { return level_edges_; }
  const std::vector<Path>& paths() const { return paths_; }

  std::vector<Path> paths_to(int block) const {
    std::vector<Path> out;
    for (const auto& p : paths_)
      if (p.range() == block) out.push_back(p);
    return out;
  }

  /// Row of the path inside its A1 block.
  int position(const Path& p) const {
    int offset = 0;
    for (int i = 0; i < p.tail.source; ++i) offset += lambda_[static_cast<std::size_t>(i)][static_cast<std::size_t>(p.tail.range)] * m_[static_cast<std::size_t>(i)];
    return offset + p.tail.copy * m_[static_cast<std::size_t>(p.tail.source)] + p.head.index;
  }

 private:
  std::vector<int> m_;
  std::vector<int> n_;
  IntMatrix lambda_;
  std::vector<RootEdge> root_edges_;
  std::vector<LevelEdge> level_edges_;
  std::vector<Path> paths_;
};

/// B1 = ⊕ M_{n_j} with trace vector t1, and B0 its image of A0.
class PathModel {
 public:
  PathModel(BratteliDiagram diagram, std::vector<double> t1)
      : diagram_(std::move(diagram)),
        b1_(std::make_shared<const MultiMatrixAlgebra>(diagram_.a1_dims(), std::move(t1))),
        embedding_(diagram_.a0_dims(), b1_, diagram_.inclusion()) {}

  const BratteliDiagram& diagram() const { return diagram_; }
  const AlgebraPtr& B1() const { return b1_; }
  const AlgebraPtr& A0() const { return embedding_.source(); }
  const UnitalEmbedding& embedding() const { return embedding_; }
  const std::vector<double>& t1() const { return b1_->trace_vector(); }
  const std::vector<double>& t0() const { return embedding_.source()->trace_vector(); }
  Subalgebra B0() const { return embedding_.image(); }

  /// e_{lambda, mu} in B1.
  Element unit(const Path& lambda, const Path& mu) const {
    if (lambda.range() != mu.range())
      fail(ErrorCode::InvalidPathPair, "matrix unit needs paths with the same end point");
    return Element::matrix_unit(b1_, static_cast<std::size_t>(lambda.range()), diagram_.position(lambda),
                                diagram_.position(mu));
  }

  /// e_{theta, theta'} of A0, embedded in B1.
  Element root_unit(const RootEdge& a, const RootEdge& b) const {
    if (a.block != b.block)
      fail(ErrorCode::InvalidPathPair, "matrix unit needs edges with the same end point");
    return embedding_.apply(Element::matrix_unit(A0(), static_cast<std::size_t>(a.block), a.index, b.index));
  }

  std::vector<std::pair<Path, Path>> unit_pairs() const {
    std::vector<std::pair<Path, Path>> out;
    for (const auto& p : diagram_.paths())
      for (const auto& q : diagram_.paths())
        if (p.range() == q.range()) out.emplace_back(p, q);
    return out;
  }

  /// j_p = (1/m_p) sum over edges alpha, alpha' ending at p of e_{alpha, alpha'}.
  Element j_projection(int p) const {
    const int m = diagram_.a0_dims()[static_cast<std::size_t>(p)];
    CMatrix block = CMatrix::Constant(m, m, cplx(1.0 / m));
    Element x = Element::zero(A0());
    x.block(static_cast<std::size_t>(p)) = block;
    return embedding_.apply(x);
  }

 private:
  BratteliDiagram diagram_;
  AlgebraPtr b1_;
  UnitalEmbedding embedding_;
};

namespace detail {

inline void check_path_traces(const PathModel& model, const std::vector<double>& t0,
                              const std::vector<double>& t1) {
  const auto& lam = model.diagram().inclusion();
  if (t1.size() != model.t1().size() || t0.size() != lam.size())
    fail(ErrorCode::TraceMismatch, "trace vectors do not fit the diagram");
  for (std::size_t j = 0; j < t1.size(); ++j)
    if (std::abs(t1[j] - model.t1()[j]) > 1e-12)
      fail(ErrorCode::TraceMismatch, "t1 differs from the model's trace vector");
  for (std::size_t i = 0; i < t0.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < t1.size(); ++j) s += lam[i][j] * t1[j];
    if (std::abs(s - t0[i]) > 1e-12)
      fail(ErrorCode::TraceMismatch, "t0 is not Lambda t1 at A0 block " + std::to_string(i));
  }
}

}  // namespace detail

/// Closed-form E_{B0}(e_{lambda, mu}): zero unless the [0,1] edges agree,
/// otherwise t1_{r(lambda)} / t0_{r(lambda_0])} e_{lambda_0], mu_0]}.
inline Element cond_exp_on_unit(const PathModel& model, const Path& lambda, const Path& mu,
                                const std::vector<double>& t0, const std::vector<double>& t1) {
  detail::check_path_traces(model, t0, t1);
  if (lambda.range() != mu.range())
    fail(ErrorCode::InvalidPathPair, "matrix unit needs paths with the same end point");
  if (!(lambda.tail == mu.tail)) return Element::zero(model.B1());
  const double ratio = t1[static_cast<std::size_t>(lambda.range())] /
                       t0[static_cast<std::size_t>(lambda.head.block)];
  return model.root_unit(lambda.head, mu.head) * cplx(ratio);
}

struct PathSystem {
  std::vector<std::pair<LevelEdge, Path>> index;  // I = {(kappa, beta) : r(kappa) = r(beta)}
  std::vector<Element> elements;                  // lambda_{kappa, beta}
  std::vector<Element> a;                         // a_{kappa, beta}
  std::vector<Element> j;                         // j_p per A0 block
};

/// a_{kappa,beta} = sum_{theta -> s(kappa)} e_{theta∘kappa, beta}, rescaled by
/// (m_{s(kappa)} t1_{r(kappa)} / t0_{s(kappa)})^{-1/2}. This is a left
/// orthogonal system with E(lambda lambda'^*) = delta j_{s(kappa)}.
inline PathSystem orthogonal_system_from_paths(const PathModel& model, const std::vector<double>& t0,
                                               const std::vector<double>& t1) {
  detail::check_path_traces(model, t0, t1);
  const auto& d = model.diagram();
  PathSystem out;
  for (std::size_t p = 0; p < d.a0_dims().size(); ++p) out.j.push_back(model.j_projection(static_cast<int>(p)));
  for (const auto& kappa : d.level_edges()) {
    for (const auto& beta : d.paths_to(kappa.range)) {
      Element a = Element::zero(model.B1());
      const int m = d.a0_dims()[static_cast<std::size_t>(kappa.source)];
      for (int th = 0; th < m; ++th) a += model.unit(Path{{kappa.source, th}, kappa}, beta);
      const double scale = m * t1[static_cast<std::size_t>(kappa.range)] /
                           t0[static_cast<std::size_t>(kappa.source)];
      out.index.emplace_back(kappa, beta);
      out.elements.push_back(a * cplx(1.0 / std::sqrt(scale)));
      out.a.push_back(std::move(a));
    }
  }
  return out;
}

/// {t_{r(kappa)}^{-1/2} e_{kappa, beta}}: a two-sided basis of A over C.
inline std::vector<Element> scalar_two_sided_basis(const AlgebraPtr& algebra) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < algebra->num_blocks(); ++i) {
    const int n = algebra->dim(i);
    const double s = 1.0 / std::sqrt(algebra->trace_weight(i));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) out.push_back(Element::matrix_unit(algebra, i, p, q) * cplx(s));
  }
  return out;
}

}  // namespace ppbasis
