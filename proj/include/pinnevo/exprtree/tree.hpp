#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinnevo/exprtree/operators.hpp"
#include "pinnevo/exprtree/series.hpp"

namespace pinnevo::exprtree {

inline constexpr int kMaxNodes = 7;   // M_N
inline constexpr int kMaxParams = 3;  // M_E
inline constexpr double kInitialParamValue = 1.0;

enum class NodeKind : std::uint8_t { unary, binary };

/// One operator node. Children are indices into the owning tree; for a unary
/// node `child[0] == -1` means its input is the variable x (a leaf edge).
/// `out_param` is the parameter on the edge leaving this node, `leaf_param`
/// the one on the x edge feeding a leaf-unary node; -1 means none.
struct Node {
  NodeKind kind = NodeKind::unary;
  std::uint8_t op = 0;
  std::array<int, 2> child{-1, -1};
  int out_param = -1;
  int leaf_param = -1;

  UnaryOp unary() const { return static_cast<UnaryOp>(op); }
  BinaryOp binary() const { return static_cast<BinaryOp>(op); }
  bool has_leaf() const { return kind == NodeKind::unary && child[0] < 0; }

  friend bool operator==(const Node&, const Node&) = default;
};

/// Binary expression tree of activation operators over a single input x, with
/// optional multiplicative parameters on its edges. Nodes are stored in
/// pre-order (root at index 0) and parameters are numbered in the same order,
/// so two trees are structurally identical iff their node arrays are equal.
class ActivationTree {
 public:
  ActivationTree() = default;

  // --- builders ---

  static ActivationTree unary(UnaryOp op) {
    ActivationTree t;
    t.nodes_.push_back(Node{NodeKind::unary, static_cast<std::uint8_t>(op)});
    return t;
  }

  static ActivationTree unary(UnaryOp op, const ActivationTree& child) {
    ActivationTree t = unary(op);
    t.nodes_[0].child[0] = 1;
    t.append(child);
    t.renumber();
    return t;
  }

  static ActivationTree binary(BinaryOp op, const ActivationTree& lhs, const ActivationTree& rhs) {
    ActivationTree t;
    t.nodes_.push_back(Node{NodeKind::binary, static_cast<std::uint8_t>(op)});
    t.nodes_[0].child[0] = 1;
    t.append(lhs);
    t.nodes_[0].child[1] = static_cast<int>(t.nodes_.size());
    t.append(rhs);
    t.renumber();
    return t;
  }

  /// Same tree with a parameter on the root's output edge.
  ActivationTree with_output_param() const {
    ActivationTree t = *this;
    t.nodes_.at(0).out_param = 0;
    t.renumber();
    return t;
  }

  /// Same tree with a parameter on the x edge of the root (which must be a leaf-unary).
  ActivationTree with_leaf_param() const {
    ActivationTree t = *this;
    if (!t.nodes_.at(0).has_leaf()) throw std::invalid_argument("root has no leaf edge");
    t.nodes_[0].leaf_param = 0;
    t.renumber();
    return t;
  }

  /// Adopts a raw pre-ordered node array. Parameter indices are renumbered.
  static ActivationTree from_nodes(std::vector<Node> nodes) {
    ActivationTree t;
    t.nodes_ = std::move(nodes);
    t.renumber();
    return t;
  }

  // --- observers ---

  const std::vector<Node>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int param_count() const { return param_count_; }
  bool empty() const { return nodes_.empty(); }

  /// Number of edges: one output edge per node plus one per x leaf.
  int edge_count() const {
    int e = 0;
    for (const auto& n : nodes_) e += 1 + (n.has_leaf() ? 1 : 0);
    return e;
  }

  friend bool operator==(const ActivationTree& a, const ActivationTree& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  void append(const ActivationTree& sub) {
    const int offset = static_cast<int>(nodes_.size());
    for (Node n : sub.nodes_) {
      for (int& c : n.child)
        if (c >= 0) c += offset;
      nodes_.push_back(n);
    }
  }

  // Re-sorts into pre-order and numbers parameters by first appearance.
  void renumber() {
    if (nodes_.empty()) {
      param_count_ = 0;
      return;
    }
    std::vector<Node> ordered;
    ordered.reserve(nodes_.size());
    int next_param = 0;
    auto visit = [&](auto&& self, int idx) -> int {
      if (idx < 0 || idx >= static_cast<int>(nodes_.size()))
        throw std::invalid_argument("malformed activation tree: bad child index");
      if (ordered.size() > nodes_.size())
        throw std::invalid_argument("malformed activation tree: cycle");
      const Node src = nodes_[idx];
      const int at = static_cast<int>(ordered.size());
      ordered.push_back(src);
      ordered[at].out_param = src.out_param >= 0 ? next_param++ : -1;
      if (src.kind == NodeKind::unary) {
        ordered[at].child[1] = -1;
        if (src.child[0] < 0) {
          ordered[at].leaf_param = src.leaf_param >= 0 ? next_param++ : -1;
        } else {
          ordered[at].leaf_param = -1;
          ordered[at].child[0] = self(self, src.child[0]);
        }
      } else {
        ordered[at].leaf_param = -1;
        if (src.child[0] < 0 || src.child[1] < 0)
          throw std::invalid_argument("malformed activation tree: binary node needs two operands");
        ordered[at].child[0] = self(self, src.child[0]);
        ordered[at].child[1] = self(self, src.child[1]);
      }
      return at;
    };
    visit(visit, 0);
    if (ordered.size() != nodes_.size())
      throw std::invalid_argument("malformed activation tree: unreachable nodes");
    nodes_ = std::move(ordered);
    param_count_ = next_param;
  }

  std::vector<Node> nodes_;
  int param_count_ = 0;
};

using ParamVector = std::vector<double>;

/// Scalar result of an evaluation. `finite` is false when any intermediate
/// value was inf or NaN; the values are returned unclamped.
struct EvalResult {
  double value = 0;
  bool finite = true;
};

struct JetResult {
  double value = 0, d1 = 0, d2 = 0;
  /// d/d(param_k) of value, d1 and d2, only when requested.
  std::vector<double> dvalue, dd1, dd2;
  bool finite = true;
};

namespace detail {

inline void check_params(const ActivationTree& tree, std::span<const double> params) {
  if (tree.empty()) throw std::invalid_argument("empty activation tree");
  if (static_cast<int>(params.size()) != tree.param_count())
    throw std::invalid_argument("parameter count mismatch: tree has " +
                                std::to_string(tree.param_count()) + ", got " +
                                std::to_string(params.size()));
}

template <class S>
S param_scalar(std::span<const double> params, int idx) {
  if constexpr (std::is_same_v<S, double>) {
    return params[idx];
  } else {
    S s(params[idx]);
    if (idx < static_cast<int>(s.d.size())) s.d[idx] = 1.0;
    return s;
  }
}

/// Evaluates all nodes bottom-up for one input; `scratch` must hold node_count entries.
/// Returns the root series, and sets `finite` to false on any non-finite intermediate.
template <class S>
Taylor3<S> eval_series(const ActivationTree& tree, std::span<const double> params, double x,
                       std::span<Taylor3<S>> scratch, bool& finite) {
  const auto& nodes = tree.nodes();
  for (int i = tree.node_count() - 1; i >= 0; --i) {
    const Node& n = nodes[i];
    Taylor3<S> r;
    if (n.kind == NodeKind::unary) {
      Taylor3<S> in;
      if (n.child[0] < 0) {
        in.c[0] = S(x);
        in.c[1] = S(1.0);
        if (n.leaf_param >= 0) in = scale(param_scalar<S>(params, n.leaf_param), in);
      } else {
        in = scratch[n.child[0]];
      }
      r = compose(n.unary(), in);
    } else {
      r = combine(n.binary(), scratch[n.child[0]], scratch[n.child[1]]);
    }
    if (n.out_param >= 0) r = scale(param_scalar<S>(params, n.out_param), r);
    if (!std::isfinite(value_of(r.c[0]))) finite = false;
    scratch[i] = r;
  }
  const Taylor3<S>& root = scratch[0];
  for (const auto& c : root.c)
    if (!std::isfinite(value_of(c))) finite = false;
  return root;
}

template <int K>
void fill_jet(const Taylor3<Dual<K>>& r, int nparams, JetResult& out) {
  out.value = r.c[0].v;
  out.d1 = r.c[1].v;
  out.d2 = 2 * r.c[2].v;
  out.dvalue.assign(nparams, 0.0);
  out.dd1.assign(nparams, 0.0);
  out.dd2.assign(nparams, 0.0);
  for (int p = 0; p < nparams && p < K; ++p) {
    out.dvalue[p] = r.c[0].d[p];
    out.dd1[p] = r.c[1].d[p];
    out.dd2[p] = 2 * r.c[2].d[p];
  }
}

}  // namespace detail

/// f(x) by bottom-up evaluation.
inline EvalResult eval(const ActivationTree& tree, double x, std::span<const double> params) {
  detail::check_params(tree, params);
  const auto& nodes = tree.nodes();
  std::vector<double> vals(nodes.size());
  bool finite = true;
  for (int i = tree.node_count() - 1; i >= 0; --i) {
    const Node& n = nodes[i];
    double r;
    if (n.kind == NodeKind::unary) {
      double in = n.child[0] < 0 ? x : vals[n.child[0]];
      if (n.child[0] < 0 && n.leaf_param >= 0) in *= params[n.leaf_param];
      r = apply(n.unary(), in);
    } else {
      r = apply(n.binary(), vals[n.child[0]], vals[n.child[1]]);
    }
    if (n.out_param >= 0) r *= params[n.out_param];
    if (!std::isfinite(r)) finite = false;
    vals[i] = r;
  }
  return {vals[0], finite};
}

/// f, f' and f'' at x. With `param_gradients`, also their derivatives with
/// respect to every parameter.
inline JetResult eval_jet(const ActivationTree& tree, double x, std::span<const double> params,
                          int order = 2, bool param_gradients = false) {
  detail::check_params(tree, params);
  if (order < 1 || order > 2) throw std::invalid_argument("jet order must be 1 or 2");
  JetResult out;
  bool finite = true;
  auto run = [&]<int K>() {
    std::vector<Taylor3<Dual<K>>> scratch(tree.node_count());
    const auto r = detail::eval_series<Dual<K>>(tree, params, x, scratch, finite);
    detail::fill_jet<K>(r, param_gradients ? tree.param_count() : 0, out);
  };
  if (!param_gradients || tree.param_count() == 0) {
    run.template operator()<0>();
  } else if (tree.param_count() == 1) {
    run.template operator()<1>();
  } else if (tree.param_count() == 2) {
    run.template operator()<2>();
  } else if (tree.param_count() == 3) {
    run.template operator()<3>();
  } else {
    throw std::invalid_argument("parameter gradients support at most 3 parameters");
  }
  if (order == 1) {
    out.d2 = 0;
    out.dd2.assign(out.dd2.size(), 0.0);
  }
  out.finite = finite && std::isfinite(out.value) && std::isfinite(out.d1) &&
               (order < 2 || std::isfinite(out.d2));
  return out;
}

/// Element-wise derivative stacks of an activation over a batch of inputs,
/// as consumed by the network engine.
struct ActivationBatch {
  std::vector<double> s0, s1, s2, s3;  // f, f', f'', f'''
  std::vector<double> ds0, ds1, ds2;   // [p * n + i]: d/d(param p) of f, f', f''
  int params = 0;
  bool finite = true;
};

namespace detail {

template <int K>
void eval_batch_impl(const ActivationTree& tree, std::span<const double> params,
                     std::span<const double> z, bool grads, ActivationBatch& out) {
  const std::size_t n = z.size();
  std::vector<Taylor3<Dual<K>>> scratch(tree.node_count());
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = eval_series<Dual<K>>(tree, params, z[i], scratch, finite);
    out.s0[i] = r.c[0].v;
    out.s1[i] = r.c[1].v;
    out.s2[i] = 2 * r.c[2].v;
    out.s3[i] = 6 * r.c[3].v;
    if (grads) {
      for (int p = 0; p < K; ++p) {
        out.ds0[p * n + i] = r.c[0].d[p];
        out.ds1[p * n + i] = r.c[1].d[p];
        out.ds2[p * n + i] = 2 * r.c[2].d[p];
      }
    }
  }
  out.finite = finite;
}

}  // namespace detail

inline void eval_batch(const ActivationTree& tree, std::span<const double> params,
                       std::span<const double> z, bool param_gradients, ActivationBatch& out) {
  detail::check_params(tree, params);
  const std::size_t n = z.size();
  const int np = param_gradients ? tree.param_count() : 0;
  out.params = np;
  for (auto* v : {&out.s0, &out.s1, &out.s2, &out.s3}) v->resize(n);
  for (auto* v : {&out.ds0, &out.ds1, &out.ds2}) v->resize(static_cast<std::size_t>(np) * n);
  switch (np) {
    case 0: detail::eval_batch_impl<0>(tree, params, z, false, out); break;
    case 1: detail::eval_batch_impl<1>(tree, params, z, true, out); break;
    case 2: detail::eval_batch_impl<2>(tree, params, z, true, out); break;
    case 3: detail::eval_batch_impl<3>(tree, params, z, true, out); break;
    default: throw std::invalid_argument("parameter gradients support at most 3 parameters");
  }
}

/// Every invariant violation of the tree; empty means valid.
inline std::vector<std::string> validate(const ActivationTree& tree, int max_nodes = kMaxNodes,
                                         int max_params = kMaxParams) {
  std::vector<std::string> v;
  const int nc = tree.node_count();
  if (nc < 1) v.push_back("node_count < 1");
  if (nc > max_nodes)
    v.push_back("node_count " + std::to_string(nc) + " > M_N=" + std::to_string(max_nodes));
  if (tree.param_count() > max_params)
    v.push_back("param_count " + std::to_string(tree.param_count()) +
                " > M_E=" + std::to_string(max_params));
  std::vector<int> seen_params(tree.param_count(), 0);
  std::vector<int> parents(nc, 0);
  for (int i = 0; i < nc; ++i) {
    const Node& n = tree.nodes()[i];
    const int limit = n.kind == NodeKind::unary ? kUnaryCount : kBinaryCount;
    if (n.op >= limit) v.push_back("node " + std::to_string(i) + ": unknown operator");
    const int arity = n.kind == NodeKind::unary ? 1 : 2;
    for (int c = 0; c < arity; ++c) {
      const int ch = n.child[c];
      if (ch < 0) {
        if (n.kind == NodeKind::binary)
          v.push_back("node " + std::to_string(i) + ": binary operand is not an operator node");
      } else if (ch <= i || ch >= nc) {
        v.push_back("node " + std::to_string(i) + ": bad child index");
      } else {
        ++parents[ch];
      }
    }
    for (int p : {n.out_param, n.leaf_param}) {
      if (p < 0) continue;
      if (p >= tree.param_count()) v.push_back("parameter index out of range");
      else ++seen_params[p];
    }
    if (n.leaf_param >= 0 && !n.has_leaf())
      v.push_back("node " + std::to_string(i) + ": leaf parameter on a non-leaf edge");
  }
  for (int i = 1; i < nc; ++i)
    if (parents[i] != 1) v.push_back("node " + std::to_string(i) + ": not a tree");
  for (int c : seen_params)
    if (c != 1) v.push_back("parameter not on exactly one edge");
  return v;
}

/// Draws a random activation of the form unary1(unary2(x)) or
/// binary(unary1(x), unary2(x)), then places a uniformly drawn number of
/// parameters on distinct uniformly chosen edges.
struct RandomTreePolicy {
  enum class Form { any, nested_unary, binary_of_unaries };
  Form form = Form::any;
  int max_params = kMaxParams;
};

namespace detail {

template <class Rng>
int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class Rng>
UnaryOp random_unary(Rng& rng) {
  return static_cast<UnaryOp>(uniform_int(rng, 0, kUnaryCount - 1));
}

template <class Rng>
BinaryOp random_binary(Rng& rng) {
  return static_cast<BinaryOp>(uniform_int(rng, 0, kBinaryCount - 1));
}

}  // namespace detail

template <class Rng>
ActivationTree random_tree(Rng& rng, const RandomTreePolicy& policy = {}) {
  using Form = RandomTreePolicy::Form;
  Form form = policy.form;
  if (form == Form::any) form = detail::uniform_int(rng, 0, 1) == 0 ? Form::nested_unary
                                                                    : Form::binary_of_unaries;
  std::vector<Node> nodes;
  if (form == Form::nested_unary) {
    nodes.push_back(Node{NodeKind::unary, static_cast<std::uint8_t>(detail::random_unary(rng)),
                         {1, -1}});
    nodes.push_back(Node{NodeKind::unary, static_cast<std::uint8_t>(detail::random_unary(rng))});
  } else {
    nodes.push_back(Node{NodeKind::binary, static_cast<std::uint8_t>(detail::random_binary(rng)),
                         {1, 2}});
    nodes.push_back(Node{NodeKind::unary, static_cast<std::uint8_t>(detail::random_unary(rng))});
    nodes.push_back(Node{NodeKind::unary, static_cast<std::uint8_t>(detail::random_unary(rng))});
  }
  // Edge slots in pre-order: (node, is_leaf_edge).
  std::vector<std::pair<int, bool>> edges;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    edges.emplace_back(i, false);
    if (nodes[i].has_leaf()) edges.emplace_back(i, true);
  }
  const int count = detail::uniform_int(rng, 0, std::min<int>(policy.max_params,
                                                              static_cast<int>(edges.size())));
  std::shuffle(edges.begin(), edges.end(), rng);
  for (int k = 0; k < count; ++k) {
    auto [node, leaf] = edges[k];
    (leaf ? nodes[node].leaf_param : nodes[node].out_param) = 0;
  }
  return ActivationTree::from_nodes(std::move(nodes));
}

}  // namespace pinnevo::exprtree
