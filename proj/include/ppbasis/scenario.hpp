#pragma once

// JSON scenario files: model construction, task execution and reports.
//
//   {"name": ..., "seed": 0, "tolerance": {"eps_rel": 1e-9},
//    "model": {"kind": "explicit" | "diagonal_in_matrix" | "group_algebra_pair"
//                      | "crossed_product" | "quadruple", ...},
//    "tasks": [{"task": "markov", "params": {...}, "expect": {...}}, ...]}
//
// Complex numbers are [re, im] pairs (plain numbers are real); matrices are
// row-major nested arrays; an element of M is a list of blocks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ppbasis/algebra.hpp"
#include "ppbasis/basic_construction.hpp"
#include "ppbasis/intermediate.hpp"
#include "ppbasis/path_algebra.hpp"
#include "ppbasis/pp_systems.hpp"
#include "ppbasis/regular.hpp"

namespace ppbasis::scenario {

using json = nlohmann::ordered_json;

enum ExitCode { kPass = 0, kNumericFailure = 1, kInputError = 2 };

/// Error codes that indicate bad input rather than a failed computation.
inline bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput:
    case ErrorCode::ParseError:
    case ErrorCode::NonUnitalInclusion:
    case ErrorCode::NotAnAction:
    case ErrorCode::InvalidSubgroup:
    case ErrorCode::InvalidPathPair:
    case ErrorCode::TraceMismatch:
      return true;
    default:
      return false;
  }
}

/// Rounds to 12 significant digits so that printed and stored values agree.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  if (std::abs(v) < 5e-13) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------- parsing

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::ParseError, where + ": " + what);
}

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing key \"") + key + "\"");
  return *it;
}

inline int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<int>();
}

inline double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

inline std::vector<int> as_int_list(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], where + "/" + std::to_string(i)));
  return out;
}

inline std::vector<double> as_double_list(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], where + "/" + std::to_string(i)));
  return out;
}

inline IntMatrix as_int_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected a matrix of integers");
  IntMatrix out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int_list(j[i], where + "/" + std::to_string(i)));
  return out;
}

inline cplx as_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  schema_error(where, "expected a complex number [re, im]");
}

inline CMatrix as_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    schema_error(where, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      schema_error(where + "/" + std::to_string(r), "row has the wrong length");
    for (int c = 0; c < n; ++c)
      m(r, c) = as_complex(row[static_cast<std::size_t>(c)], where + "/" + std::to_string(r) + "/" + std::to_string(c));
  }
  return m;
}

inline json complex_json(cplx z) { return json::array({round12(z.real()), round12(z.imag())}); }

inline json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline json element_json(const Element& x) {
  json out = json::array();
  for (const auto& b : x.blocks()) out.push_back(matrix_json(b));
  return out;
}

inline json doubles_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(round12(x));
  return out;
}

/// Line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_column(text, byte);
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                    std::string(e.what()));
  }
}

inline json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

// ----------------------------------------------------------------- models

struct Model {
  std::string kind;
  std::string description;
  AlgebraPtr M;
  Subalgebra N;
  std::vector<Element> candidates;
  std::map<std::string, Element> elements;
  std::optional<Subalgebra> P;
  std::optional<Subalgebra> Q;
};

inline Element parse_element(const json& j, const Model& model, const std::string& where) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "1") return Element::identity(model.M);
    if (name == "0") return Element::zero(model.M);
    const auto it = model.elements.find(name);
    if (it == model.elements.end()) detail::schema_error(where, "unknown element \"" + name + "\"");
    return it->second;
  }
  if (!j.is_array() || j.size() != model.M->num_blocks())
    detail::schema_error(where, "element needs one matrix per block of M");
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < j.size(); ++i)
    blocks.push_back(detail::as_matrix(j[i], model.M->dim(i), where + "/" + std::to_string(i)));
  return Element(model.M, std::move(blocks));
}

inline std::vector<Element> parse_elements(const json& j, const Model& model, const std::string& where) {
  if (!j.is_array()) detail::schema_error(where, "expected a list of elements");
  std::vector<Element> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_element(j[i], model, where + "/" + std::to_string(i)));
  return out;
}

/// Scenario fragment for generator `kind` with string parameters.
json generate_model(const std::string& kind, const std::map<std::string, std::string>& params);

namespace detail {

inline std::string param(const std::map<std::string, std::string>& p, const std::string& key, const std::string& dflt) {
  const auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

inline int int_param(const std::map<std::string, std::string>& p, const std::string& key, int dflt) {
  const auto it = p.find(key);
  if (it == p.end()) return dflt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidInput, "parameter " + key + " must be an integer");
  }
}

/// "1,2,0/0,2,1" (or ';' between permutations) -> list of permutations.
inline std::vector<Permutation> parse_permutations(std::string s) {
  std::replace(s.begin(), s.end(), ';', '/');
  std::vector<Permutation> out;
  std::stringstream outer(s);
  std::string item;
  while (std::getline(outer, item, '/')) {
    if (item.empty()) continue;
    Permutation p;
    std::stringstream inner(item);
    std::string num;
    while (std::getline(inner, num, ',')) {
      try {
        p.push_back(std::stoi(num));
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidInput, "bad permutation entry \"" + num + "\"");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline Model build_explicit(const json& m, std::uint64_t seed) {
  (void)seed;
  Model model;
  model.kind = "explicit";
  const std::vector<int> n_dims = as_int_list(member(member(m, "N", "model"), "dims", "model/N"), "model/N/dims");
  const json& mj = member(m, "M", "model");
  const std::vector<int> m_dims = as_int_list(member(mj, "dims", "model/M"), "model/M/dims");
  const IntMatrix lambda = as_int_matrix(member(m, "inclusion", "model"), "model/inclusion");
  (void)UnitalEmbedding(n_dims, MultiMatrixAlgebra::uniform(m_dims), lambda);  // shape and unitality
  std::vector<double> trace;
  const auto tr = mj.find("trace");
  if (tr == mj.end() || (tr->is_string() && tr->get<std::string>() == "markov")) {
    trace = markov_trace(lambda, n_dims).t1;
  } else if (tr->is_string() && tr->get<std::string>() == "uniform") {
    int total = 0;
    for (int d : m_dims) total += d;
    trace.assign(m_dims.size(), 1.0 / total);
  } else {
    trace = as_double_list(*tr, "model/M/trace");
  }
  model.M = std::make_shared<const MultiMatrixAlgebra>(m_dims, trace);
  std::vector<CMatrix> unitaries;
  if (const auto bu = m.find("block_unitaries"); bu != m.end()) {
    if (!bu->is_array() || bu->size() != m_dims.size())
      schema_error("model/block_unitaries", "need one unitary per block of M");
    for (std::size_t j = 0; j < m_dims.size(); ++j)
      unitaries.push_back(as_matrix((*bu)[j], m_dims[j], "model/block_unitaries/" + std::to_string(j)));
  }
  const UnitalEmbedding emb(n_dims, model.M, lambda, unitaries);
  model.N = emb.image();
  model.description = "explicit inclusion";
  if (const auto el = m.find("elements"); el != m.end()) {
    if (!el->is_object()) schema_error("model/elements", "expected an object of named elements");
    for (const auto& [name, value] : el->items())
      model.elements.emplace(name, parse_element(value, model, "model/elements/" + name));
  }
  if (const auto c = m.find("candidates"); c != m.end())
    model.candidates = parse_elements(*c, model, "model/candidates");
  else
    model.candidates = default_candidates(model.N, seed);
  auto intermediate = [&](const char* key) -> std::optional<Subalgebra> {
    const auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    std::vector<Element> gens = parse_elements(*it, model, std::string("model/") + key);
    gens.insert(gens.end(), model.N.span_basis().begin(), model.N.span_basis().end());
    return generated_subalgebra(gens, model.M);
  };
  model.P = intermediate("P");
  model.Q = intermediate("Q");
  return model;
}

inline Model build_group_algebra_pair(const json& m, std::uint64_t seed) {
  const int degree = as_int(member(m, "degree", "model"), "model/degree");
  std::vector<Permutation> g, h;
  const json& gj = member(m, "G", "model");
  const json& hj = member(m, "H", "model");
  if (!gj.is_array() || !hj.is_array()) schema_error("model", "G and H must be lists of permutations");
  for (std::size_t i = 0; i < gj.size(); ++i) g.push_back(as_int_list(gj[i], "model/G/" + std::to_string(i)));
  for (std::size_t i = 0; i < hj.size(); ++i) h.push_back(as_int_list(hj[i], "model/H/" + std::to_string(i)));
  const InclusionModel inc = group_algebra_pair(g, h, degree, seed);
  Model model;
  model.kind = "group_algebra_pair";
  model.description = inc.description;
  model.M = inc.M;
  model.N = inc.N;
  model.candidates = inc.candidates;
  return model;
}

inline Model build_crossed_product(const json& m, std::uint64_t seed) {
  const json& bj = member(m, "B", "model");
  const std::vector<int> dims = as_int_list(member(bj, "dims", "model/B"), "model/B/dims");
  AlgebraPtr b;
  if (const auto t = bj.find("trace"); t != bj.end())
    b = std::make_shared<const MultiMatrixAlgebra>(dims, as_double_list(*t, "model/B/trace"));
  else
    b = MultiMatrixAlgebra::uniform(dims);
  const json& gj = member(m, "group", "model");
  std::optional<FiniteGroup> g;
  if (const auto c = gj.find("cyclic"); c != gj.end())
    g = FiniteGroup::cyclic(as_int(*c, "model/group/cyclic"));
  else
    g = FiniteGroup(as_int_matrix(member(gj, "table", "model/group"), "model/group/table"));
  const json& aj = member(m, "action", "model");
  GroupAction action;
  action.block_permutation = as_int_matrix(member(aj, "block_permutation", "model/action"), "model/action/block_permutation");
  if (const auto u = aj.find("unitaries"); u != aj.end()) {
    if (!u->is_array()) schema_error("model/action/unitaries", "expected a list per group element");
    for (std::size_t x = 0; x < u->size(); ++x) {
      const json& per = (*u)[x];
      std::vector<CMatrix> list;
      if (!per.is_array()) schema_error("model/action/unitaries", "expected a list of block unitaries");
      for (std::size_t i = 0; i < per.size() && i < dims.size(); ++i)
        list.push_back(as_matrix(per[i], dims[i], "model/action/unitaries/" + std::to_string(x) + "/" + std::to_string(i)));
      if (!per.empty() && per.size() != dims.size())
        schema_error("model/action/unitaries", "need one unitary per block of B");
      action.unitaries.push_back(std::move(list));
    }
  }
  const CrossedProductModel cp = crossed_product(b, *g, action, seed);
  Model model;
  model.kind = "crossed_product";
  model.description = cp.inclusion.description;
  model.M = cp.inclusion.M;
  model.N = cp.inclusion.N;
  model.candidates = cp.inclusion.candidates;
  for (std::size_t x = 0; x < cp.u.size(); ++x) model.elements.emplace("u" + std::to_string(x), cp.u[x]);
  return model;
}

/// N = C, M = M_2; "masa": P = diagonal, Q = span{1, flip}; "same": P = Q = diagonal.
inline Model build_quadruple(const json& m) {
  std::string variant = "masa";
  if (const auto v = m.find("variant"); v != m.end()) {
    if (!v->is_string()) schema_error("model/variant", "expected a string");
    variant = v->get<std::string>();
  }
  if (variant != "masa" && variant != "same") schema_error("model/variant", "expected \"masa\" or \"same\"");
  Model model;
  model.kind = "quadruple";
  model.description = "C in M2 with two MASAs (" + variant + ")";
  model.M = MultiMatrixAlgebra::full_matrix(2);
  model.N = Subalgebra::scalars(model.M);
  const Element one = Element::identity(model.M);
  const Element diag = Element::matrix_unit(model.M, 0, 0, 0) - Element::matrix_unit(model.M, 0, 1, 1);
  const Element flip = Element::matrix_unit(model.M, 0, 0, 1) + Element::matrix_unit(model.M, 0, 1, 0);
  model.P = Subalgebra::from_span(model.M, {one, diag});
  model.Q = Subalgebra::from_span(model.M, {one, variant == "masa" ? flip : diag});
  model.elements.emplace("sigma_z", diag);
  model.elements.emplace("sigma_x", flip);
  model.candidates = {one};
  return model;
}

}  // namespace detail

inline Model build_model(const json& m, std::uint64_t seed) {
  const std::string kind = [&] {
    const json& k = detail::member(m, "kind", "model");
    if (!k.is_string()) detail::schema_error("model/kind", "expected a string");
    return k.get<std::string>();
  }();
  if (kind == "explicit") return detail::build_explicit(m, seed);
  if (kind == "diagonal_in_matrix") {
    const int n = detail::as_int(detail::member(m, "n", "model"), "model/n");
    Model model = detail::build_explicit(generate_model("diagonal_in_matrix", {{"n", std::to_string(n)}})["model"], seed);
    model.kind = kind;
    return model;
  }
  if (kind == "group_algebra_pair") return detail::build_group_algebra_pair(m, seed);
  if (kind == "crossed_product") return detail::build_crossed_product(m, seed);
  if (kind == "quadruple") return detail::build_quadruple(m);
  detail::schema_error("model/kind", "unknown model kind \"" + kind + "\"");
}

// ------------------------------------------------------------- generators

inline json generate_model(const std::string& kind, const std::map<std::string, std::string>& params) {
  json s;
  s["name"] = kind;
  s["seed"] = 0;
  if (kind == "diagonal_in_matrix") {
    const int n = detail::int_param(params, "n", 2);
    if (n < 1) fail(ErrorCode::InvalidInput, "n must be positive");
    s["name"] = "diagonal-in-m" + std::to_string(n);
    json m;
    m["kind"] = "explicit";
    m["N"] = {{"dims", std::vector<int>(static_cast<std::size_t>(n), 1)}};
    m["M"] = {{"dims", {n}}, {"trace", "markov"}};
    IntMatrix lambda(static_cast<std::size_t>(n), std::vector<int>{1});
    m["inclusion"] = lambda;
    json elements = json::object();
    json cands = json::array({"1"});
    for (int p = 1; p < n; ++p) {
      CMatrix u = CMatrix::Zero(n, n);
      for (int i = 0; i < n; ++i) u((i + p) % n, i) = 1.0;
      elements["u" + std::to_string(p)] = json::array({detail::matrix_json(u)});
      cands.push_back("u" + std::to_string(p));
    }
    m["elements"] = elements;
    m["candidates"] = cands;
    s["model"] = m;
    s["tasks"] = json::array({{{"task", "markov"}, {"expect", {{"beta", n}}}},
                              {{"task", "watatani"}},
                              {{"task", "regular_pipeline"}, {"expect", {{"basis_size", n}}}}});
    return s;
  }
  if (kind == "group_algebra_pair") {
    const int degree = detail::int_param(params, "degree", 2);
    const auto g = detail::parse_permutations(detail::param(params, "G", ""));
    const auto h = detail::parse_permutations(detail::param(params, "H", ""));
    group_algebra_pair(g, h, degree);  // validates H <= G
    json m;
    m["kind"] = "group_algebra_pair";
    m["degree"] = degree;
    m["G"] = g;
    m["H"] = h;
    s["name"] = "group-algebra-pair";
    s["model"] = m;
    s["tasks"] = json::array({{{"task", "markov"}}, {{"task", "watatani"}}, {{"task", "regular_pipeline"}}});
    return s;
  }
  if (kind == "crossed_product") {
    const std::string base = detail::param(params, "base", "cyclic");
    json m;
    m["kind"] = "crossed_product";
    if (base == "cyclic") {
      const int k = detail::int_param(params, "k", 2);
      if (k < 1) fail(ErrorCode::InvalidInput, "k must be positive");
      m["B"] = {{"dims", std::vector<int>(static_cast<std::size_t>(k), 1)}};
      m["group"] = {{"cyclic", k}};
      IntMatrix perm;
      for (int x = 0; x < k; ++x) {
        std::vector<int> sigma;
        for (int i = 0; i < k; ++i) sigma.push_back((i + x) % k);
        perm.push_back(sigma);
      }
      m["action"] = {{"block_permutation", perm}};
      s["name"] = "cyclic-shift-" + std::to_string(k);
    } else if (base == "m2-sign") {
      m["B"] = {{"dims", {2}}};
      m["group"] = {{"cyclic", 2}};
      CMatrix z = CMatrix::Identity(2, 2);
      z(1, 1) = -1.0;
      m["action"] = {{"block_permutation", IntMatrix{{0}, {0}}},
                     {"unitaries", json::array({json::array({detail::matrix_json(CMatrix::Identity(2, 2))}),
                                                json::array({detail::matrix_json(z)})})}};
      s["name"] = "m2-sign-action";
    } else {
      fail(ErrorCode::InvalidInput, "crossed_product base must be \"cyclic\" or \"m2-sign\"");
    }
    const GroupAction probe;
    (void)probe;
    build_model(m, 0);  // validates the action
    s["model"] = m;
    s["tasks"] = json::array({{{"task", "markov"}}, {{"task", "regular_pipeline"}}});
    return s;
  }
  if (kind == "quadruple") {
    const std::string variant = detail::param(params, "variant", "masa");
    if (variant != "masa" && variant != "same") fail(ErrorCode::InvalidInput, "variant must be masa or same");
    s["name"] = "quadruple-" + variant;
    s["model"] = {{"kind", "quadruple"}, {"variant", variant}};
    s["tasks"] = json::array({{{"task", "commuting_square"}}, {{"task", "interchange"}}});
    return s;
  }
  fail(ErrorCode::InvalidInput, "unknown generator \"" + kind + "\"");
}

// ------------------------------------------------------------------ tasks

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
};

struct TaskResult {
  std::string task;
  json values = json::object();
  json flags = json::object();
  bool pass = true;
  std::optional<std::string> error;
  std::string detail;  // multi-line text (pipeline report)
};

class Runner {
 public:
  Runner(Model model, std::uint64_t seed, Tolerance tol) : model_(std::move(model)), seed_(seed), tol_(tol) {}

  const Model& model() const { return model_; }

  const std::shared_ptr<const BasicConstruction>& bc() {
    if (!bc_) bc_ = std::make_shared<const BasicConstruction>(model_.N, seed_, tol_);
    return bc_;
  }

  TaskResult run(const std::string& task, const json& params) {
    TaskResult r;
    r.task = task;
    if (task == "markov") markov(r);
    else if (task == "classify_system") classify_task(r, params);
    else if (task == "support") support_task(r, params);
    else if (task == "construct_with_support") construct_task(r, params);
    else if (task == "complete_to_basis") complete_task(r, params);
    else if (task == "path_basis") path_task(r);
    else if (task == "watatani") watatani_task(r);
    else if (task == "interchange") interchange_task(r);
    else if (task == "commuting_square") commuting_task(r);
    else if (task == "regular_pipeline") pipeline_task(r);
    else detail::schema_error("tasks", "unknown task \"" + task + "\"");
    return r;
  }

 private:
  static void put(json& obj, const char* key, double v) { obj[key] = round12(v); }

  Side side_param(const json& params) const {
    const auto it = params.find("side");
    if (it == params.end()) return Side::Right;
    const std::string s = it->is_string() ? it->get<std::string>() : "";
    if (s == "right") return Side::Right;
    if (s == "left") return Side::Left;
    if (s == "two-sided") return Side::TwoSided;
    detail::schema_error("params/side", "expected right, left or two-sided");
  }

  std::vector<Element> elements_param(const json& params) const {
    const auto it = params.find("elements");
    if (it == params.end()) return {Element::identity(model_.M)};
    return parse_elements(*it, model_, "params/elements");
  }

  void side_values(TaskResult& r, const PPSystem& sys) const {
    for (Side s : {Side::Right, Side::Left}) {
      if ((s == Side::Right && !sys.right()) || (s == Side::Left && !sys.left())) continue;
      const SideReport& rep = sys.report(s);
      const std::string p = s == Side::Right ? "right_" : "left_";
      r.values[p + "gram_idempotency"] = round12(rep.gram_defect.idempotency);
      r.values[p + "support_idempotency"] = round12(rep.support_defect.idempotency);
      r.values[p + "support_to_identity"] = round12(rep.support_to_identity);
    }
    r.values["size"] = sys.size();
    r.flags["system"] = sys.is_system();
    r.flags["orthogonal"] = sys.is_orthogonal();
    r.flags["orthonormal"] = sys.is_orthonormal();
    r.flags["basis"] = sys.is_basis();
  }

  void markov(TaskResult& r) {
    const auto& b = *bc();
    const MarkovData md = markov_trace(b.inclusion(), b.N_structure().dims());
    put(r.values, "beta", md.beta);
    put(r.values, "eigen_residual", md.eigen_residual);
    r.values["t0"] = detail::doubles_json(md.t0);
    r.values["t1"] = detail::doubles_json(md.t1);
    r.flags["trace_is_markov"] = b.markov_mode();
    r.pass = md.eigen_residual <= 1e-10;
  }

  void classify_task(TaskResult& r, const json& params) {
    const PPSystem sys(bc(), elements_param(params), side_param(params));
    side_values(r, sys);
  }

  void support_task(TaskResult& r, const json& params) {
    const Side side = side_param(params) == Side::Left ? Side::Left : Side::Right;
    const PPSystem sys(bc(), elements_param(params), side);
    const Support s = support(sys, side);
    const ProjectionDefect d = projection_defect(s.projection);
    put(r.values, "support_idempotency", d.idempotency);
    put(r.values, "support_selfadjointness", d.self_adjointness);
    put(r.values, "support_to_identity", op_norm(s.projection - bc()->identity()));
    put(r.values, "support_rank", s.projection.trace().real());
    r.flags["system"] = s.system_hypothesis;
    r.flags["projection"] = d.is_projection();
    r.flags["basis"] = sys.report(side).basis;
    if (!s.system_hypothesis) {
      r.pass = false;
      r.error = std::string(to_string(ErrorCode::NotASystem));
    } else {
      r.pass = d.is_projection();
    }
  }

  CMatrix target_param(const json& params) {
    const auto& b = *bc();
    const auto it = params.find("target");
    if (it == params.end()) return b.identity();
    if (it->is_string()) {
      const std::string t = it->get<std::string>();
      if (t == "identity") return b.identity();
      if (t == "e1") return b.e1();
      if (t == "zero") return CMatrix::Zero(b.dimension(), b.dimension());
      if (t == "one_minus_e1") return b.identity() - b.e1();
      if (t == "random") {
        Rng rng(seed_ + 17);
        return random_m1_projection(b, rng);
      }
    }
    if (it->is_object() && it->contains("central")) {
      const int k = detail::as_int((*it)["central"], "params/target/central");
      const auto& blocks = b.M1_structure().blocks();
      if (k < 0 || static_cast<std::size_t>(k) >= blocks.size())
        detail::schema_error("params/target/central", "no such block of M1");
      return blocks[static_cast<std::size_t>(k)].central.block(0);
    }
    detail::schema_error("params/target", "expected identity, e1, zero, one_minus_e1, random or {\"central\": k}");
  }

  static ConstructionMode mode_param(const json& params) {
    const auto it = params.find("mode");
    if (it == params.end()) return ConstructionMode::General;
    const std::string m = it->is_string() ? it->get<std::string>() : "";
    if (m == "general") return ConstructionMode::General;
    if (m == "orthogonal") return ConstructionMode::Orthogonal;
    if (m == "orthonormal-padded") return ConstructionMode::OrthonormalPadded;
    detail::schema_error("params/mode", "expected general, orthogonal or orthonormal-padded");
  }

  void construct_task(TaskResult& r, const json& params) {
    const CMatrix f = target_param(params);
    const PPSystem sys = construct_system_with_support(bc(), f, mode_param(params), seed_);
    side_values(r, sys);
    const double res = op_norm(sys.report(Side::Right).support - f);
    put(r.values, "support_residual", res);
    r.pass = sys.is_system() && res <= kProjectionTolerance;
  }

  void complete_task(TaskResult& r, const json& params) {
    const PPSystem input(bc(), elements_param(params), Side::Right);
    const PPSystem out = complete_to_basis(input, seed_);
    side_values(r, out);
    bool prefix = out.size() >= input.size();
    for (std::size_t i = 0; prefix && i < input.size(); ++i)
      prefix = cstar_norm(out.elements()[i] - input.elements()[i]) == 0.0;
    r.values["prefix_size"] = input.size();
    r.flags["prefix_preserved"] = prefix;
    r.pass = out.is_basis() && prefix;
  }

  void path_task(TaskResult& r) {
    const auto& b = *bc();
    const BratteliDiagram d(b.N_structure().dims(), model_.M->dims(), b.inclusion());
    const PathModel pm(d, model_.M->trace_vector());
    const Subalgebra b0 = pm.B0();
    double eq1 = 0.0;
    for (const auto& [l, m] : pm.unit_pairs())
      eq1 = std::max(eq1, cstar_norm(cond_exp_on_unit(pm, l, m, pm.t0(), pm.t1()) - b0.expectation(pm.unit(l, m))));
    const PathSystem ps = orthogonal_system_from_paths(pm, pm.t0(), pm.t1());
    double eq2 = 0.0, jdef = 0.0;
    for (std::size_t i = 0; i < ps.elements.size(); ++i)
      for (std::size_t k = 0; k < ps.elements.size(); ++k) {
        const Element lhs = b0.expectation(ps.elements[i] * ps.elements[k].adjoint());
        const Element rhs = i == k ? ps.j[static_cast<std::size_t>(ps.index[i].first.source)] : Element::zero(pm.B1());
        eq2 = std::max(eq2, cstar_norm(lhs - rhs));
      }
    for (const auto& j : ps.j) jdef = std::max({jdef, cstar_norm(j * j - j), cstar_norm(j - j.adjoint())});
    auto scalar_bc = std::make_shared<const BasicConstruction>(Subalgebra::scalars(model_.M), seed_, tol_);
    const PPSystem sb(scalar_bc, scalar_two_sided_basis(model_.M), Side::TwoSided);
    put(r.values, "eq1_residual", eq1);
    put(r.values, "eq2_residual", eq2);
    put(r.values, "j_defect", jdef);
    r.values["path_system_size"] = ps.elements.size();
    r.values["scalar_basis_size"] = sb.size();
    put(r.values, "scalar_support_residual",
        std::max(sb.report(Side::Right).support_to_identity, sb.report(Side::Left).support_to_identity));
    r.flags["scalar_basis_two_sided"] = sb.is_basis();
    r.pass = eq1 <= 1e-9 && eq2 <= 1e-9 && jdef <= 1e-10 && sb.is_basis();
  }

  void watatani_task(TaskResult& r) {
    const PPSystem b1 = construct_system_with_support(bc(), bc()->identity(), ConstructionMode::General, seed_);
    const PPSystem b2 = construct_system_with_support(bc(), bc()->identity(), ConstructionMode::General, seed_ + 1);
    const WatataniIndex w1 = watatani_index(b1);
    const WatataniIndex w2 = watatani_index(b2);
    const double indep = cstar_norm(w1.value - w2.value);
    r.values["basis_size"] = b1.size();
    put(r.values, "index_trace", w1.scalar_value);
    put(r.values, "central_residual", w1.central_residual);
    put(r.values, "independence_residual", indep);
    json blocks = json::array();
    for (const auto& blk : w1.value.blocks()) blocks.push_back(round12(blk.trace().real() / static_cast<double>(blk.rows())));
    r.values["index_per_block"] = blocks;
    if (w1.scalar) put(r.values, "index", w1.scalar_value);
    r.flags["central"] = w1.central;
    r.flags["scalar"] = w1.scalar;
    r.pass = w1.central && indep <= kProjectionTolerance;
  }

  std::pair<const Subalgebra&, const Subalgebra&> quadruple() const {
    if (!model_.P || !model_.Q) detail::schema_error("model", "task needs intermediate subalgebras P and Q");
    return {*model_.P, *model_.Q};
  }

  void interchange_task(TaskResult& r) {
    const auto [p, q] = quadruple();
    const IntermediateBasis bp1 = intermediate_basis(bc(), p, seed_);
    const IntermediateBasis bq1 = intermediate_basis(bc(), q, seed_ + 1);
    const IntermediateBasis bp2 = intermediate_basis(bc(), p, seed_ + 2);
    const IntermediateBasis bq2 = intermediate_basis(bc(), q, seed_ + 3);
    const CMatrix pq = interchange_operator(bp1, bq1, bc());
    const CMatrix qp = interchange_operator(bq1, bp1, bc());
    const CMatrix pq2 = interchange_operator(bp2, bq2, bc());
    const double sym = op_norm(bc()->gns().conjugate(pq) - qp);
    const double indep = op_norm(pq - pq2);
    const ProjectionDefect d = projection_defect(pq);
    put(r.values, "norm", d.norm);
    put(r.values, "idempotency", d.idempotency);
    put(r.values, "j_symmetry_residual", sym);
    put(r.values, "independence_residual", indep);
    r.flags["projection"] = d.is_projection();
    r.pass = sym <= kProjectionTolerance && indep <= kProjectionTolerance;
  }

  void commuting_task(TaskResult& r) {
    const auto [p, q] = quadruple();
    const Quadruple quad(bc(), p, q);
    const double res = commuting_square_residual(quad);
    put(r.values, "residual", res);
    r.flags["commuting_square"] = res <= 1e-9;
  }

  void pipeline_task(TaskResult& r) {
    const WeylReport rep = regular_pipeline(model_.N, model_.candidates, seed_, tol_);
    put(r.values, "beta", rep.beta);
    r.values["dim_commutant"] = rep.dim_commutant;
    r.values["dim_R"] = rep.dim_R;
    r.values["reps"] = rep.reps.size();
    r.values["reps_times_dim_commutant"] = rep.product();
    r.values["inner_basis_size"] = rep.inner_basis.size();
    r.values["basis_size"] = rep.patched.size();
    put(r.values, "weyl_residual", rep.weyl_residual);
    put(r.values, "coset_support_vs_eP", rep.coset_support_vs_eP);
    put(r.values, "patched_right_support", rep.patched_right_support);
    put(r.values, "patched_left_support", rep.patched_left_support);
    if (rep.watatani) put(r.values, "watatani_index", *rep.watatani);
    if (rep.markov && rep.patched_basis_two_sided) {
      put(r.values, "balanced_left", rep.balanced_left);
      put(r.values, "balanced_right", rep.balanced_right);
    }
    r.flags["regular"] = rep.regular;
    r.flags["coset_system_orthonormal"] = rep.coset_system_orthonormal;
    r.flags["support_equals_eP"] = rep.support_equals_eP;
    r.flags["patched_basis_two_sided"] = rep.patched_basis_two_sided;
    r.detail = rep.text();
    if (rep.failure) r.error = std::string(to_string(rep.failure->code));
    r.pass = rep.ok();
  }

  Model model_;
  std::uint64_t seed_;
  Tolerance tol_;
  std::shared_ptr<const BasicConstruction> bc_;
};

// ---------------------------------------------------------------- reports

struct Report {
  json data;
  std::string text;
  int exit_code = kPass;
};

namespace detail {

inline std::string value_text(const json& v) {
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  if (v.is_array()) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + value_text(v[i]);
    return s + ")";
  }
  return v.dump();
}

/// Checks `expect` entries against the task's values and flags.
inline std::vector<std::string> expectation_mismatches(const TaskResult& r, const json& expect) {
  std::vector<std::string> bad;
  for (const auto& [key, want] : expect.items()) {
    if (key == "error") continue;
    if (r.values.contains(key) && want.is_number()) {
      const double got = r.values[key].get<double>();
      const double w = want.get<double>();
      if (std::abs(got - w) > 1e-8 * (1.0 + std::abs(w)))
        bad.push_back(key + " = " + value_text(r.values[key]) + ", expected " + value_text(want));
    } else if (r.flags.contains(key) && want.is_boolean()) {
      if (r.flags[key].get<bool>() != want.get<bool>())
        bad.push_back(key + " = " + r.flags[key].dump() + ", expected " + want.dump());
    } else {
      bad.push_back("no result named \"" + key + "\" to compare");
    }
  }
  return bad;
}

}  // namespace detail

inline Report run_scenario(const json& s, const RunOptions& opts = {}) {
  Report rep;
  std::ostringstream text;
  const std::string name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : "unnamed";
  rep.data["name"] = name;
  try {
    if (!s.is_object()) detail::schema_error("scenario", "expected an object");
    std::uint64_t seed = 0;
    if (s.contains("seed")) seed = static_cast<std::uint64_t>(detail::as_int(s["seed"], "seed"));
    if (opts.seed) seed = *opts.seed;
    Tolerance tol;
    if (const auto t = s.find("tolerance"); t != s.end()) {
      if (t->is_number()) tol.eps_rel = t->get<double>();
      else if (t->is_object()) {
        if (t->contains("eps_rel")) tol.eps_rel = detail::as_double((*t)["eps_rel"], "tolerance/eps_rel");
        if (t->contains("eps_rank")) tol.eps_rank = detail::as_double((*t)["eps_rank"], "tolerance/eps_rank");
      } else detail::schema_error("tolerance", "expected a number or an object");
    }
    if (opts.eps) tol.eps_rel = *opts.eps;
    if (!(tol.eps_rel > 0) || !(tol.eps_rank > 0)) detail::schema_error("tolerance", "tolerances must be positive");
    rep.data["seed"] = seed;
    const json& tasks = detail::member(s, "tasks", "scenario");
    if (!tasks.is_array()) detail::schema_error("tasks", "expected a list");

    Runner runner(build_model(detail::member(s, "model", "scenario"), seed), seed, tol);
    const Model& model = runner.model();
    rep.data["model"] = {{"kind", model.kind},
                         {"description", model.description},
                         {"M_dims", model.M->dims()},
                         {"M_trace", detail::doubles_json(model.M->trace_vector())},
                         {"dim_N", model.N.dimension()}};
    text << "scenario " << name << " (" << model.description << ", seed " << seed << ")\n";

    json results = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const json& tj = tasks[i];
      const std::string where = "tasks/" + std::to_string(i);
      const json& tn = detail::member(tj, "task", where);
      if (!tn.is_string()) detail::schema_error(where + "/task", "expected a string");
      const json params = tj.contains("params") ? tj["params"] : json::object();
      const json expect = tj.contains("expect") ? tj["expect"] : json::object();
      if (!params.is_object()) detail::schema_error(where + "/params", "expected an object");
      if (!expect.is_object()) detail::schema_error(where + "/expect", "expected an object");
      const std::optional<std::string> want_error =
          expect.contains("error") && expect["error"].is_string() ? std::optional(expect["error"].get<std::string>())
                                                                  : std::nullopt;
      TaskResult r;
      r.task = tn.get<std::string>();
      try {
        r = runner.run(r.task, params);
      } catch (const Error& e) {
        if (is_input_error(e.code()) && !(want_error && *want_error == to_string(e.code()))) throw;
        r.pass = false;
        r.error = std::string(to_string(e.code()));
        r.detail = e.what();
      }
      std::vector<std::string> mismatches;
      if (want_error) {
        r.pass = r.error && *r.error == *want_error;
        if (!r.pass) mismatches.push_back("expected error " + *want_error + ", got " + r.error.value_or("none"));
      } else {
        mismatches = detail::expectation_mismatches(r, expect);
        if (!mismatches.empty()) r.pass = false;
      }
      all_pass = all_pass && r.pass;

      json out;
      out["task"] = r.task;
      out["pass"] = r.pass;
      if (r.error) out["error"] = *r.error;
      out["values"] = r.values;
      out["flags"] = r.flags;
      if (!mismatches.empty()) out["mismatches"] = mismatches;
      results.push_back(out);

      text << "  [" << (r.pass ? "PASS" : "FAIL") << "] " << r.task;
      if (r.error) text << " (" << *r.error << ")";
      text << "\n";
      for (const auto& [k, v] : r.values.items()) text << "      " << k << " = " << detail::value_text(v) << "\n";
      for (const auto& [k, v] : r.flags.items()) text << "      " << k << ": " << (v.get<bool>() ? "yes" : "no") << "\n";
      for (const auto& m : mismatches) text << "      mismatch: " << m << "\n";
      if (!r.detail.empty()) {
        std::istringstream lines(r.detail);
        std::string line;
        while (std::getline(lines, line)) text << "      | " << line << "\n";
      }
    }
    rep.data["tasks"] = results;
    rep.data["pass"] = all_pass;
    rep.exit_code = all_pass ? kPass : kNumericFailure;
    text << (all_pass ? "PASS" : "FAIL") << " " << name << "\n";
  } catch (const Error& e) {
    rep.data["pass"] = false;
    rep.data["error"] = std::string(to_string(e.code()));
    rep.data["message"] = e.what();
    const bool input = is_input_error(e.code());
    rep.exit_code = input ? kInputError : kNumericFailure;
    text << "scenario " << name << ": " << (input ? "input error: " : "error: ") << e.what() << "\n";
  }
  rep.text = text.str();
  return rep;
}

inline Report run_file(const std::string& path, const RunOptions& opts = {}) {
  try {
    return run_scenario(parse_file(path), opts);
  } catch (const Error& e) {
    Report rep;
    rep.data["pass"] = false;
    rep.data["error"] = std::string(to_string(e.code()));
    rep.data["message"] = e.what();
    rep.exit_code = kInputError;
    rep.text = path + ": input error: " + e.what() + "\n";
    return rep;
  }
}

// ---------------------------------------------------------------- selftest

inline std::vector<std::string> selftest_corpus() {
  return {
      R"({"name": "c-in-c", "seed": 0,
          "model": {"kind": "explicit", "N": {"dims": [1]}, "M": {"dims": [1], "trace": "markov"}, "inclusion": [[1]]},
          "tasks": [{"task": "markov", "expect": {"beta": 1}},
                    {"task": "classify_system", "params": {"elements": ["1"], "side": "two-sided"},
                     "expect": {"basis": true, "orthonormal": true}},
                    {"task": "support", "expect": {"support_to_identity": 0}},
                    {"task": "construct_with_support", "params": {"target": "identity"}, "expect": {"size": 1}},
                    {"task": "complete_to_basis", "expect": {"size": 1}},
                    {"task": "path_basis"},
                    {"task": "watatani", "expect": {"index": 1}},
                    {"task": "regular_pipeline", "expect": {"basis_size": 1, "beta": 1}}]})",
      R"({"name": "c-in-m2", "seed": 0,
          "model": {"kind": "explicit", "N": {"dims": [1]}, "M": {"dims": [2], "trace": "markov"}, "inclusion": [[2]]},
          "tasks": [{"task": "markov", "expect": {"beta": 4}},
                    {"task": "construct_with_support", "params": {"target": "identity", "mode": "orthonormal-padded"},
                     "expect": {"size": 4, "basis": true}},
                    {"task": "complete_to_basis", "params": {"elements": ["1"]}, "expect": {"size": 4, "prefix_preserved": true}},
                    {"task": "path_basis", "expect": {"scalar_basis_size": 4}},
                    {"task": "watatani", "expect": {"index": 4}}]})",
      R"({"name": "c-in-c-plus-m2", "seed": 0,
          "model": {"kind": "explicit", "N": {"dims": [1]}, "M": {"dims": [1, 2], "trace": "markov"}, "inclusion": [[1, 2]]},
          "tasks": [{"task": "markov", "expect": {"beta": 5}},
                    {"task": "path_basis", "expect": {"scalar_basis_size": 5}},
                    {"task": "watatani", "expect": {"index": 5}}]})",
      R"({"name": "diag-in-m2", "seed": 0,
          "model": {"kind": "diagonal_in_matrix", "n": 2},
          "tasks": [{"task": "markov", "expect": {"beta": 2}},
                    {"task": "classify_system", "params": {"elements": ["1", "u1"], "side": "two-sided"},
                     "expect": {"orthonormal": true, "basis": true}},
                    {"task": "construct_with_support", "params": {"target": {"central": 0}, "mode": "orthonormal-padded"},
                     "expect": {"error": "InfeasibleSupport"}},
                    {"task": "construct_with_support", "params": {"target": "random", "mode": "general"}},
                    {"task": "complete_to_basis", "params": {"elements": ["1", "u1"]}, "expect": {"size": 2}},
                    {"task": "watatani", "expect": {"index": 2}},
                    {"task": "regular_pipeline", "expect": {"basis_size": 2, "beta": 2, "reps_times_dim_commutant": 4}}]})",
      R"({"name": "cyclic-shift-3", "seed": 0,
          "model": {"kind": "crossed_product", "B": {"dims": [1, 1, 1]}, "group": {"cyclic": 3},
                    "action": {"block_permutation": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}},
          "tasks": [{"task": "markov", "expect": {"beta": 3}},
                    {"task": "regular_pipeline", "expect": {"basis_size": 3, "regular": true}}]})",
      R"({"name": "m2-in-m2-plus-m2", "seed": 0,
          "model": {"kind": "explicit", "N": {"dims": [2]}, "M": {"dims": [2, 2], "trace": "markov"}, "inclusion": [[1, 1]]},
          "tasks": [{"task": "markov", "expect": {"beta": 2}},
                    {"task": "regular_pipeline",
                     "expect": {"basis_size": 2, "beta": 2, "reps": 1, "dim_commutant": 2, "reps_times_dim_commutant": 2}}]})",
      R"({"name": "z2-group-algebra", "seed": 0,
          "model": {"kind": "group_algebra_pair", "degree": 2, "G": [[1, 0]], "H": []},
          "tasks": [{"task": "markov", "expect": {"beta": 2}},
                    {"task": "regular_pipeline", "expect": {"basis_size": 2}}]})",
      R"({"name": "masa-quadruple", "seed": 0,
          "model": {"kind": "quadruple", "variant": "masa"},
          "tasks": [{"task": "commuting_square", "expect": {"commuting_square": true}},
                    {"task": "interchange", "expect": {"projection": true}}]})",
      R"({"name": "same-masa-quadruple", "seed": 0,
          "model": {"kind": "quadruple", "variant": "same"},
          "tasks": [{"task": "commuting_square", "expect": {"commuting_square": false}},
                    {"task": "interchange", "expect": {"projection": false, "idempotency": 2}}]})",
  };
}

struct SelftestResult {
  json data;
  std::string text;
  int exit_code = kPass;
};

inline SelftestResult run_selftest(const RunOptions& opts = {}) {
  SelftestResult out;
  out.data = json::array();
  for (const auto& src : selftest_corpus()) {
    const Report r = run_scenario(parse_text(src), opts);
    out.data.push_back(r.data);
    out.text += r.text;
    if (r.exit_code != kPass) out.exit_code = std::max(out.exit_code, r.exit_code);
  }
  out.text += out.exit_code == kPass ? "selftest: all scenarios passed\n" : "selftest: FAILED\n";
  return out;
}

}  // namespace ppbasis::scenario
