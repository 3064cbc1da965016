#pragma once

// Regular inclusions: group-algebra and crossed-product models, normalizer
// and coset tests, and the pipeline that patches a two-sided basis of
// R = N ∨ (N'∩M) over N with a coset system of M over R.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ppbasis/algebra.hpp"
#include "ppbasis/basic_construction.hpp"
#include "ppbasis/intermediate.hpp"
#include "ppbasis/pp_systems.hpp"
#include "ppbasis/wedderburn.hpp"

namespace ppbasis {

using Permutation = std::vector<int>;

class FiniteGroup {
 public:
  /// table[g][h] = index of gh. Element 0 need not be the identity.
  explicit FiniteGroup(std::vector<std::vector<int>> table) : table_(std::move(table)) {
    const int n = order();
    if (n == 0) fail(ErrorCode::InvalidInput, "group table is empty");
    for (const auto& row : table_) {
      if (static_cast<int>(row.size()) != n) fail(ErrorCode::InvalidInput, "group table is not square");
      for (int v : row)
        if (v < 0 || v >= n) fail(ErrorCode::InvalidInput, "group table entry out of range");
    }
    identity_ = -1;
    for (int e = 0; e < n && identity_ < 0; ++e) {
      bool ok = true;
      for (int g = 0; g < n && ok; ++g) ok = table_[e][g] == g && table_[g][e] == g;
      if (ok) identity_ = e;
    }
    if (identity_ < 0) fail(ErrorCode::InvalidInput, "group table has no identity");
    inverse_.assign(n, -1);
    for (int g = 0; g < n; ++g)
      for (int h = 0; h < n; ++h)
        if (table_[g][h] == identity_ && table_[h][g] == identity_) inverse_[g] = h;
    for (int g = 0; g < n; ++g)
      if (inverse_[g] < 0) fail(ErrorCode::InvalidInput, "group element without inverse");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
            fail(ErrorCode::InvalidInput, "group table is not associative");
  }

  static FiniteGroup cyclic(int k) {
    if (k <= 0) fail(ErrorCode::InvalidInput, "cyclic group order must be positive");
    std::vector<std::vector<int>> t(k, std::vector<int>(k));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) t[a][b] = (a + b) % k;
    return FiniteGroup(std::move(t));
  }

  /// Closure of permutation generators; elements sorted with the identity first.
  static FiniteGroup from_permutations(const std::vector<Permutation>& generators, int degree,
                                       std::vector<Permutation>* elements_out = nullptr) {
    Permutation id(degree);
    for (int i = 0; i < degree; ++i) id[i] = i;
    for (const auto& g : generators) check_permutation(g, degree);
    std::set<Permutation> seen{id};
    std::vector<Permutation> frontier{id};
    while (!frontier.empty()) {
      std::vector<Permutation> next;
      for (const auto& x : frontier)
        for (const auto& g : generators) {
          Permutation y = compose(g, x);
          if (seen.insert(y).second) next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
    std::vector<Permutation> elems(seen.begin(), seen.end());  // identity sorts first
    std::map<Permutation, int> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> t(elems.size(), std::vector<int>(elems.size()));
    for (std::size_t a = 0; a < elems.size(); ++a)
      for (std::size_t b = 0; b < elems.size(); ++b) t[a][b] = index.at(compose(elems[a], elems[b]));
    if (elements_out) *elements_out = elems;
    return FiniteGroup(std::move(t));
  }

  /// (p q)(i) = p(q(i)).
  static Permutation compose(const Permutation& p, const Permutation& q) {
    Permutation r(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[static_cast<std::size_t>(q[i])];
    return r;
  }

  static void check_permutation(const Permutation& p, int degree) {
    if (static_cast<int>(p.size()) != degree) fail(ErrorCode::InvalidInput, "permutations differ in degree");
    std::vector<bool> hit(p.size(), false);
    for (int v : p) {
      if (v < 0 || v >= degree || hit[static_cast<std::size_t>(v)])
        fail(ErrorCode::InvalidInput, "list is not a permutation of 0..n-1");
      hit[static_cast<std::size_t>(v)] = true;
    }
  }

  int order() const { return static_cast<int>(table_.size()); }
  int identity() const { return identity_; }
  int mul(int g, int h) const { return table_[g][h]; }
  int inverse(int g) const { return inverse_[g]; }
  const std::vector<std::vector<int>>& table() const { return table_; }

 private:
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

/// An inclusion N ⊆ M with candidate normalizers supplied by the model.
struct InclusionModel {
  std::string description;
  AlgebraPtr M;
  Subalgebra N;
  std::vector<Element> candidates;
};

/// Realises a concrete unital *-subalgebra of some ambient algebra as an
/// abstract multi-matrix algebra. `trace` overrides the trace used for the
/// abstract trace vector (evaluated on minimal projections).
template <class TraceFn>
Wedderburn retrace(const Wedderburn& w, TraceFn trace) {
  std::vector<WedderburnBlock> blocks = w.blocks();
  for (auto& b : blocks) b.trace = trace(b.unit(0, 0));
  return Wedderburn(w.ambient(), std::move(blocks));
}

/// N = C[H] ⊆ M = C[G] with the canonical trace tau(g) = delta_{g,e}.
/// Both are realised through the left regular representation; candidates
/// are the unitaries g of G.
inline InclusionModel group_algebra_pair(const std::vector<Permutation>& g_generators,
                                         const std::vector<Permutation>& h_generators, int degree,
                                         std::uint64_t seed = 0) {
  std::vector<Permutation> g_elems;
  const FiniteGroup g = FiniteGroup::from_permutations(g_generators, degree, &g_elems);
  std::vector<Permutation> h_elems;
  for (const auto& h : h_generators) {
    FiniteGroup::check_permutation(h, degree);
    if (std::find(g_elems.begin(), g_elems.end(), h) == g_elems.end())
      fail(ErrorCode::InvalidSubgroup, "generator of H is not an element of G");
  }
  FiniteGroup::from_permutations(h_generators, degree, &h_elems);

  const int n = g.order();
  const AlgebraPtr amb = MultiMatrixAlgebra::full_matrix(n);
  std::vector<Element> reg;
  for (int a = 0; a < n; ++a) {
    CMatrix m = CMatrix::Zero(n, n);
    for (int b = 0; b < n; ++b) m(g.mul(a, b), b) = 1.0;
    reg.push_back(Element(amb, {m}));
  }
  const Subalgebra cg = Subalgebra::from_span(amb, reg);
  const Wedderburn w = wedderburn_decompose(cg, seed);
  const AlgebraPtr m = w.abstract();

  InclusionModel out;
  out.description = "C[H] in C[G], |G| = " + std::to_string(n) + ", |H| = " + std::to_string(h_elems.size());
  out.M = m;
  std::vector<Element> n_span;
  for (const auto& h : h_elems) {
    const auto it = std::find(g_elems.begin(), g_elems.end(), h);
    n_span.push_back(w.to_abstract(reg[static_cast<std::size_t>(it - g_elems.begin())]));
  }
  out.N = Subalgebra::from_span(m, n_span);
  for (const auto& x : reg) out.candidates.push_back(w.to_abstract(x));
  return out;
}

/// alpha_g(b) in block sigma_g(i) is U_{g,i} b_i U_{g,i}^*.
struct GroupAction {
  std::vector<std::vector<int>> block_permutation;  // [g][i] = sigma_g(i)
  std::vector<std::vector<CMatrix>> unitaries;      // [g][i] = U_{g,i}; empty = identity

  Element apply(int g, const Element& b) const {
    const AlgebraPtr& alg = b.parent();
    Element out = Element::zero(alg);
    for (std::size_t i = 0; i < alg->num_blocks(); ++i) {
      const std::size_t j = static_cast<std::size_t>(block_permutation[g][i]);
      if (unitaries.empty() || unitaries[g].empty()) {
        out.block(j) = b.block(i);
      } else {
        const CMatrix& u = unitaries[g][i];
        out.block(j) = u * b.block(i) * u.adjoint();
      }
    }
    return out;
  }
};

struct CrossedProductModel {
  AlgebraPtr B;
  FiniteGroup G;
  GroupAction action;
  InclusionModel inclusion;       // N = image of B, candidates = {u_g}
  std::vector<Element> u;         // u_g in M
  std::optional<Wedderburn> structure;  // concrete span -> abstract M
  int hilbert_dimension = 0;      // |G| * sum n_i
  std::vector<CMatrix> concrete_u;

  /// pi(b) in M.
  Element embed(const Element& b) const { return structure->to_abstract(concrete_pi(b)); }

  Element concrete_pi(const Element& b) const {
    const int k = B->matrix_size();
    const int n = G.order();
    CMatrix m = CMatrix::Zero(n * k, n * k);
    for (int h = 0; h < n; ++h) m.block(h * k, h * k, k, k) = action.apply(G.inverse(h), b).direct_sum();
    return Element(structure->ambient(), {m});
  }
};

inline void validate_action(const AlgebraPtr& b, const FiniteGroup& g, const GroupAction& action) {
  const int n = g.order();
  const std::size_t k = b->num_blocks();
  if (static_cast<int>(action.block_permutation.size()) != n)
    fail(ErrorCode::NotAnAction, "need one block permutation per group element");
  if (!action.unitaries.empty() && static_cast<int>(action.unitaries.size()) != n)
    fail(ErrorCode::NotAnAction, "need one unitary list per group element");
  for (int x = 0; x < n; ++x) {
    const auto& sigma = action.block_permutation[x];
    if (sigma.size() != k) fail(ErrorCode::NotAnAction, "block permutation has the wrong length");
    std::vector<bool> hit(k, false);
    for (std::size_t i = 0; i < k; ++i) {
      const int j = sigma[i];
      if (j < 0 || static_cast<std::size_t>(j) >= k || hit[static_cast<std::size_t>(j)])
        fail(ErrorCode::NotAnAction, "block map is not a permutation");
      hit[static_cast<std::size_t>(j)] = true;
      if (b->dim(i) != b->dim(static_cast<std::size_t>(j)))
        fail(ErrorCode::NotAnAction, "block permutation does not preserve block sizes");
      if (std::abs(b->trace_weight(i) - b->trace_weight(static_cast<std::size_t>(j))) > 1e-12)
        fail(ErrorCode::NotAnAction, "action does not preserve the trace of B");
    }
    if (!action.unitaries.empty() && !action.unitaries[x].empty()) {
      if (action.unitaries[x].size() != k) fail(ErrorCode::NotAnAction, "unitary list has the wrong length");
      for (std::size_t i = 0; i < k; ++i) {
        const CMatrix& u = action.unitaries[x][i];
        const int d = b->dim(i);
        if (u.rows() != d || u.cols() != d) fail(ErrorCode::NotAnAction, "block unitary has the wrong size");
        if ((u.adjoint() * u - CMatrix::Identity(d, d)).norm() > 1e-10)
          fail(ErrorCode::NotAnAction, "block unitary is not unitary");
      }
    }
  }
  std::vector<Element> units;
  for (std::size_t i = 0; i < k; ++i)
    for (int p = 0; p < b->dim(i); ++p)
      for (int q = 0; q < b->dim(i); ++q) units.push_back(Element::matrix_unit(b, i, p, q));
  for (const auto& e : units) {
    if (cstar_norm(action.apply(g.identity(), e) - e) > 1e-10)
      fail(ErrorCode::NotAnAction, "identity does not act trivially");
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (cstar_norm(action.apply(x, action.apply(y, e)) - action.apply(g.mul(x, y), e)) > 1e-10)
          fail(ErrorCode::NotAnAction, "alpha_g alpha_h != alpha_gh");
  }
}

/// M = B ⋊ G on l^2(G) ⊗ C^K: pi(b) = ⊕_h alpha_{h^-1}(b), (u_g xi)(h) = xi(g^-1 h),
/// with trace tau(X) = tr_B(X_{e,e}).
inline CrossedProductModel crossed_product(const AlgebraPtr& b, const FiniteGroup& g, const GroupAction& action,
                                           std::uint64_t seed = 0) {
  validate_action(b, g, action);
  CrossedProductModel out{b, g, action, {}, {}, std::nullopt, 0, {}};
  const int k = b->matrix_size();
  const int n = g.order();
  out.hilbert_dimension = n * k;
  const AlgebraPtr amb = MultiMatrixAlgebra::full_matrix(n * k);

  for (int x = 0; x < n; ++x) {
    CMatrix u = CMatrix::Zero(n * k, n * k);
    for (int h = 0; h < n; ++h) u.block(g.mul(x, h) * k, h * k, k, k).setIdentity();
    out.concrete_u.push_back(std::move(u));
  }
  std::vector<Element> b_units;
  for (std::size_t i = 0; i < b->num_blocks(); ++i)
    for (int p = 0; p < b->dim(i); ++p)
      for (int q = 0; q < b->dim(i); ++q) b_units.push_back(Element::matrix_unit(b, i, p, q));

  auto pi = [&](const Element& e) {
    CMatrix m = CMatrix::Zero(n * k, n * k);
    for (int h = 0; h < n; ++h) m.block(h * k, h * k, k, k) = action.apply(g.inverse(h), e).direct_sum();
    return m;
  };
  std::vector<Element> span;
  for (const auto& e : b_units)
    for (int x = 0; x < n; ++x) span.push_back(Element(amb, {CMatrix(pi(e) * out.concrete_u[x])}));
  const Subalgebra conc = Subalgebra::from_span(amb, span);
  if (conc.dimension() != static_cast<std::size_t>(n) * b_units.size())
    fail(ErrorCode::NotAnAction, "span of pi(B) u_g has dimension " + std::to_string(conc.dimension()) +
                                     ", expected |G| dim B");
  const int e = g.identity();
  auto tau = [&](const Element& x) {
    const CMatrix block = x.block(0).block(e * k, e * k, k, k);
    return trace_value(Element::from_direct_sum(b, block)).real();
  };
  out.structure = retrace(wedderburn_decompose(conc, seed), tau);
  const Wedderburn& w = *out.structure;

  out.inclusion.description = "crossed product, |G| = " + std::to_string(n) + ", dim B = " + std::to_string(b_units.size());
  out.inclusion.M = w.abstract();
  std::vector<Element> n_span;
  for (const auto& x : b_units) n_span.push_back(w.to_abstract(Element(amb, {pi(x)})));
  out.inclusion.N = Subalgebra::from_span(w.abstract(), n_span);
  for (const auto& u : out.concrete_u) out.u.push_back(w.to_abstract(Element(amb, {u})));
  out.inclusion.candidates = out.u;
  return out;
}

/// B = C^k with the cyclic shift of Z_k.
inline CrossedProductModel cyclic_shift_model(int k, std::uint64_t seed = 0) {
  const AlgebraPtr b = MultiMatrixAlgebra::uniform(std::vector<int>(static_cast<std::size_t>(k), 1));
  const FiniteGroup g = FiniteGroup::cyclic(k);
  GroupAction a;
  for (int x = 0; x < k; ++x) {
    std::vector<int> sigma(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) sigma[static_cast<std::size_t>(i)] = (i + x) % k;
    a.block_permutation.push_back(std::move(sigma));
  }
  return crossed_product(b, g, a, seed);
}

inline constexpr double kNormalizerTolerance = 1e-8;

/// u N u^* = N, tested on the span basis of N.
inline bool check_normalizer(const Element& u, const Subalgebra& n) {
  if (unitarity_defect(u) > kNormalizerTolerance)
    fail(ErrorCode::NotUnitary, "candidate is not unitary (defect " + std::to_string(unitarity_defect(u)) + ")");
  for (const auto& b : n.span_basis())
    if (n.residual(u * b * u.adjoint()) > kNormalizerTolerance) return false;
  return true;
}

/// |E_R(u v^*)|_2 <= eps: u and v lie in different cosets.
inline double coset_overlap(const Element& u, const Element& v, const Subalgebra& r) {
  return gns_norm(r.expectation(u * v.adjoint()));
}

inline bool coset_distinct(const Element& u, const Element& v, const Subalgebra& r, double eps = 1e-9) {
  return coset_overlap(u, v, r) <= eps;
}

/// Reps as a two-sided system over R; rejects repeated cosets.
inline PPSystem coset_system(const std::vector<Element>& reps, const std::shared_ptr<const BasicConstruction>& bc_r,
                             double eps = 1e-9) {
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      if (!coset_distinct(reps[i], reps[j], bc_r->N(), eps))
        fail(ErrorCode::DuplicateCoset, "representatives " + std::to_string(i) + " and " + std::to_string(j) +
                                            " share a coset (|E_R(uv*)| = " +
                                            std::to_string(coset_overlap(reps[i], reps[j], bc_r->N())) + ")");
  return PPSystem(bc_r, reps, Side::TwoSided);
}

struct PatchResult {
  std::vector<Element> elements;           // mu_j lambda_i, outer index major
  double conjugated_worst_support = 0.0;   // max over mu of the support residual of {mu l mu^*} against e_P
  bool conjugated_bases = true;
};

/// Products {mu_j l_i} of an inner two-sided basis of P/N and an outer
/// two-sided basis of M/P made of normalizers of N and P.
inline PatchResult patch_bases(const std::vector<Element>& inner, const std::vector<Element>& outer,
                               const std::shared_ptr<const BasicConstruction>& bc_n,
                               const std::shared_ptr<const BasicConstruction>& bc_p) {
  const Subalgebra& p = bc_p->N();
  const IntermediateBasisCheck ic = check_intermediate_basis(bc_n, p, inner);
  if (!ic.two_sided_basis())
    fail(ErrorCode::NotABasis, "inner family is not a two-sided basis of P over N (support residuals " +
                                   std::to_string(ic.right_support) + ", " + std::to_string(ic.left_support) + ")");
  const PPSystem outer_sys(bc_p, outer, Side::TwoSided);
  if (!outer_sys.is_basis()) fail(ErrorCode::NotABasis, "outer family is not a two-sided basis of M over P");
  for (const auto& mu : outer) {
    if (!check_normalizer(mu, bc_n->N())) fail(ErrorCode::InvalidInput, "outer element does not normalize N");
    if (!check_normalizer(mu, p)) fail(ErrorCode::InvalidInput, "outer element does not normalize P");
  }
  PatchResult out;
  for (const auto& mu : outer) {
    std::vector<Element> conj;
    for (const auto& l : inner) {
      out.elements.push_back(mu * l);
      conj.push_back(mu * l * mu.adjoint());
    }
    const IntermediateBasisCheck c = check_intermediate_basis(bc_n, p, conj);
    out.conjugated_worst_support =
        std::max(out.conjugated_worst_support, std::max(c.right_support, c.left_support));
    out.conjugated_bases = out.conjugated_bases && c.two_sided_basis();
  }
  return out;
}

/// 1 together with the symmetries 1 - 2z over minimal central projections z
/// of N'∩M.
inline std::vector<Element> default_candidates(const Subalgebra& n, std::uint64_t seed = 0) {
  const Subalgebra c = relative_commutant(n);
  const Wedderburn w = wedderburn_decompose(c, seed);
  const Element one = Element::identity(n.ambient());
  std::vector<Element> out{one};
  if (w.blocks().size() > 1)
    for (const auto& b : w.blocks()) out.push_back(one - b.central * cplx(2.0));
  return out;
}

/// Two-sided basis of R over N inside N'∩M: for each minimal projection z
/// of Z(N), the scalar basis t^{-1/2} e_{ab} of zC with the trace
/// normalised on z, merged across z by index. With Z(N) = C this is the
/// scalar basis of N'∩M.
inline std::vector<Element> commutant_basis(const Subalgebra& n, const Subalgebra& c, std::uint64_t seed = 0) {
  const Wedderburn wc = wedderburn_decompose(c, seed);
  const Wedderburn wz = wedderburn_decompose(center(n, seed), seed);
  std::vector<std::vector<Element>> parts;
  for (const auto& zb : wz.blocks()) {
    const Element& z = zb.central;
    const double tz = trace_value(z).real();
    std::vector<Element> part;
    for (const auto& cb : wc.blocks()) {
      const double overlap = trace_value(z * cb.central).real();
      if (overlap < 0.5 * trace_value(cb.central).real()) continue;
      const double t = trace_value(cb.unit(0, 0)).real() / tz;
      for (int p = 0; p < cb.dim; ++p)
        for (int q = 0; q < cb.dim; ++q) part.push_back(cb.unit(p, q) * cplx(1.0 / std::sqrt(t)));
    }
    parts.push_back(std::move(part));
  }
  std::size_t size = 0;
  for (const auto& p : parts) size = std::max(size, p.size());
  std::vector<Element> out(size, Element::zero(n.ambient()));
  for (const auto& p : parts)
    for (std::size_t i = 0; i < p.size(); ++i) out[i] += p[i];
  return out;
}

struct PipelineFailure {
  ErrorCode code;
  std::string message;
};

struct WeylReport {
  std::size_t dim_N = 0, dim_M = 0, dim_center_N = 0, dim_commutant = 0, dim_R = 0;
  std::vector<Element> inner_basis;
  double inner_right_support = 0.0, inner_left_support = 0.0;
  bool inner_two_sided = false;

  std::size_t candidate_count = 0, normalizer_count = 0;
  std::vector<std::size_t> rep_indices;
  std::vector<Element> reps;
  double weyl_residual = 0.0;  // max |E_N(u v^*)|, |E_N(u^* v)| over distinct reps
  bool regular = false;
  std::size_t generated_dim = 0;

  bool coset_system_orthonormal = false;
  bool coset_basis_over_R = false;
  double coset_support_vs_eP = 0.0;
  bool support_equals_eP = false;

  std::vector<Element> patched;
  bool patched_basis_two_sided = false;
  bool conjugated_bases = false;
  double patched_right_support = 0.0, patched_left_support = 0.0;

  double beta = 0.0;
  bool markov = false;
  std::optional<double> watatani;  // scalar value of sum l l^* when scalar
  double balanced_left = 0.0, balanced_right = 0.0;  // |sum l^* l - beta|, |sum l l^* - beta| (Markov)

  std::optional<PipelineFailure> failure;

  std::size_t product() const { return reps.size() * dim_commutant; }
  bool ok() const { return !failure && regular && patched_basis_two_sided; }

  std::string text() const;
};

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::abs(v) < 5e-13 ? 0.0 : v);
  return buf;
}

inline std::string WeylReport::text() const {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  os << "dim N = " << dim_N << ", dim M = " << dim_M << ", dim Z(N) = " << dim_center_N << "\n";
  os << "dim(N′∩M) = " << dim_commutant << ", dim R = " << dim_R << "\n";
  os << "inner basis: size " << inner_basis.size() << ", two-sided over N: " << yn(inner_two_sided)
     << " (support residuals " << format_number(inner_right_support) << ", " << format_number(inner_left_support)
     << ")\n";
  os << "candidates: " << candidate_count << ", normalizers: " << normalizer_count << ", reps: " << reps.size()
     << "\n";
  os << "regular: " << yn(regular) << " (generated dimension " << generated_dim << ")\n";
  os << "coset system over R: orthonormal " << yn(coset_system_orthonormal) << ", basis " << yn(coset_basis_over_R)
     << ", support = e_P " << yn(support_equals_eP) << " (residual " << format_number(coset_support_vs_eP) << ")\n";
  os << "patched basis: size " << patched.size() << ", two-sided " << yn(patched_basis_two_sided)
     << " (support residuals " << format_number(patched_right_support) << ", "
     << format_number(patched_left_support) << ")\n";
  if (watatani) os << "Watatani index = " << format_number(*watatani) << " · 1\n";
  os << "β = " << format_number(beta) << "\n";
  os << "|reps|·dim(N′∩M) = " << reps.size() << "·" << dim_commutant << " = " << product() << "\n";
  os << "note: β stands in for the Jones index [M:N]; the identity [M:N] = |G|·dim(N′∩M) is a statement "
        "about II₁ factors and is reported here, not asserted\n";
  if (failure) os << "failure: " << to_string(failure->code) << ": " << failure->message << "\n";
  return os.str();
}

/// Full pipeline: N'∩M, R = N ∨ (N'∩M), inner basis of R/N, coset reps
/// from the candidates, regularity, coset system over R, patched basis.
inline WeylReport regular_pipeline(const Subalgebra& n, const std::vector<Element>& candidates,
                                   std::uint64_t seed = 0, const Tolerance& tol = {}) {
  WeylReport rep;
  const AlgebraPtr& m = n.ambient();
  auto bc_n = std::make_shared<const BasicConstruction>(n, seed, tol);
  rep.dim_N = n.dimension();
  rep.dim_M = static_cast<std::size_t>(m->gns_dimension());
  rep.markov = bc_n->markov_mode();
  rep.beta = markov_trace(bc_n->inclusion(), bc_n->N_structure().dims()).beta;

  const Subalgebra c = relative_commutant(n, tol);
  const Subalgebra r = join(n, c);
  rep.dim_center_N = center(n, seed, tol).dimension();
  rep.dim_commutant = c.dimension();
  rep.dim_R = r.dimension();

  rep.inner_basis = commutant_basis(n, c, seed);
  const IntermediateBasisCheck ic = check_intermediate_basis(bc_n, r, rep.inner_basis);
  rep.inner_right_support = ic.right_support;
  rep.inner_left_support = ic.left_support;
  rep.inner_two_sided = ic.two_sided_basis();
  if (!rep.inner_two_sided) {
    rep.failure = PipelineFailure{ErrorCode::DegenerateCommutantModel,
                                  "scalar basis of N'∩M is not a two-sided basis of R over N (residuals " +
                                      format_number(ic.right_support) + ", " + format_number(ic.left_support) + ")"};
    return rep;
  }

  rep.candidate_count = candidates.size();
  std::vector<Element> normalizers;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Element& u = candidates[i];
    if (!check_normalizer(u, n)) continue;
    normalizers.push_back(u);
    bool fresh = true;
    for (const auto& v : rep.reps) fresh = fresh && coset_distinct(u, v, r, tol.eps_rel);
    if (fresh) {
      rep.rep_indices.push_back(i);
      rep.reps.push_back(u);
    }
  }
  rep.normalizer_count = normalizers.size();
  for (std::size_t i = 0; i < rep.reps.size(); ++i)
    for (std::size_t j = 0; j < rep.reps.size(); ++j)
      if (i != j) {
        rep.weyl_residual = std::max(rep.weyl_residual, gns_norm(n.expectation(rep.reps[i] * rep.reps[j].adjoint())));
        rep.weyl_residual = std::max(rep.weyl_residual, gns_norm(n.expectation(rep.reps[i].adjoint() * rep.reps[j])));
      }

  // Unitaries of N'∩M normalize N and span it, so R joins the generators.
  std::vector<Element> gens = normalizers;
  gens.insert(gens.end(), r.span_basis().begin(), r.span_basis().end());
  rep.generated_dim = generated_subalgebra(gens, m).dimension();
  rep.regular = rep.generated_dim == rep.dim_M;

  auto bc_r = std::make_shared<const BasicConstruction>(r, seed, tol);
  if (rep.reps.empty()) {
    rep.failure = PipelineFailure{ErrorCode::IncompleteCosets, "no candidate normalizes N"};
    return rep;
  }
  const PPSystem cosets = coset_system(rep.reps, bc_r, tol.eps_rel);
  const PPSystem cosets_over_n(bc_n, rep.reps, Side::TwoSided);
  rep.coset_system_orthonormal = cosets.is_orthonormal() && cosets_over_n.is_orthonormal();
  rep.coset_basis_over_R = cosets.is_basis();
  std::vector<Element> p_gens = rep.reps;
  p_gens.insert(p_gens.end(), r.span_basis().begin(), r.span_basis().end());
  const Subalgebra p = generated_subalgebra(p_gens, m);
  rep.coset_support_vs_eP = op_norm(cosets.report(Side::Right).support - p.projector());
  rep.support_equals_eP = rep.coset_support_vs_eP <= kProjectionTolerance;

  if (!rep.regular) {
    rep.failure = PipelineFailure{ErrorCode::NotRegular, "normalizers and R generate a subalgebra of dimension " +
                                                             std::to_string(rep.generated_dim) + " < dim M = " +
                                                             std::to_string(rep.dim_M)};
    return rep;
  }
  if (!rep.coset_basis_over_R) {
    rep.failure = PipelineFailure{ErrorCode::IncompleteCosets,
                                  "coset system is not a basis over R (support residual " +
                                      format_number(cosets.report(Side::Right).support_to_identity) + ")"};
    return rep;
  }

  const PatchResult patch = patch_bases(rep.inner_basis, rep.reps, bc_n, bc_r);
  rep.patched = patch.elements;
  rep.conjugated_bases = patch.conjugated_bases;
  const PPSystem patched(bc_n, rep.patched, Side::TwoSided);
  rep.patched_right_support = patched.report(Side::Right).support_to_identity;
  rep.patched_left_support = patched.report(Side::Left).support_to_identity;
  rep.patched_basis_two_sided = patched.is_basis() && patch.conjugated_bases;
  if (rep.patched_basis_two_sided) {
    const WatataniIndex wi = watatani_index(patched);
    if (wi.scalar) rep.watatani = wi.scalar_value;
    if (rep.markov) {
      Element left = Element::zero(m), right = Element::zero(m);
      for (const auto& l : rep.patched) {
        left += l.adjoint() * l;
        right += l * l.adjoint();
      }
      const Element b = Element::identity(m) * cplx(rep.beta);
      rep.balanced_left = cstar_norm(left - b);
      rep.balanced_right = cstar_norm(right - b);
    }
  } else {
    rep.failure = PipelineFailure{ErrorCode::NotABasis, "patched family failed the two-sided basis test"};
  }
  return rep;
}

}  // namespace ppbasis
