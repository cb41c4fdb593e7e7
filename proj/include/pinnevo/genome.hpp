#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinnevo/detail/random.hpp"
#include "pinnevo/exprtree/text.hpp"
#include "pinnevo/exprtree/tree.hpp"

namespace pinnevo::genome {

using exprtree::ActivationTree;
using exprtree::BinaryOp;
using exprtree::NodeKind;
using exprtree::ParamVector;
using exprtree::UnaryOp;

/// Skip connection from the input of layer `start` to the input of layer `end`.
struct Shortcut {
  int start = 0;
  int end = 0;
  friend auto operator<=>(const Shortcut&, const Shortcut&) = default;
};

struct GenomeLimits {
  int min_layers = 3;
  int max_layers = 11;
  int min_width = 20;
  int max_width = 50;
  int width_step = 2;
  int max_nodes = exprtree::kMaxNodes;
  int max_params = exprtree::kMaxParams;

  std::vector<int> widths() const {
    std::vector<int> w;
    for (int v = min_width; v <= max_width; v += width_step) w.push_back(v);
    return w;
  }
};

struct StructureGene {
  int num_layers = 3;
  int hidden_width = 20;
  std::vector<Shortcut> shortcuts;  // kept sorted
  friend bool operator==(const StructureGene&, const StructureGene&) = default;
};

struct Genome {
  StructureGene structure;
  ActivationTree activation;
  ParamVector params;  // initial values of the activation parameters, canonical order
  std::vector<std::string> lineage;

  friend bool operator==(const Genome& a, const Genome& b) {
    return a.structure == b.structure && a.activation == b.activation && a.params == b.params;
  }
};

struct MutationRates {
  double layers = 0.3;      // R_l
  double neurons = 0.3;     // R_n
  double shortcuts = 0.3;   // R_s
  double activation = 0.7;  // R_a
};

// ---------------------------------------------------------------------------
// Shortcut geometry

inline bool interiors_disjoint(const Shortcut& a, const Shortcut& b) {
  return a.end <= b.start || b.end <= a.start;
}

inline bool fits(const std::vector<Shortcut>& set, const Shortcut& s, int num_layers,
                 int skip = -1) {
  if (s.start < 0 || s.start >= s.end || s.end > num_layers - 1) return false;
  for (int k = 0; k < static_cast<int>(set.size()); ++k)
    if (k != skip && !interiors_disjoint(set[k], s)) return false;
  return true;
}

inline std::vector<Shortcut> legal_additions(const StructureGene& g) {
  std::vector<Shortcut> out;
  for (int i = 0; i < g.num_layers; ++i)
    for (int j = i + 1; j < g.num_layers; ++j)
      if (fits(g.shortcuts, {i, j}, g.num_layers)) out.push_back({i, j});
  return out;
}

/// Shortcuts of equal span laid end to end from the input: [0-s, s-2s, ...].
inline std::vector<Shortcut> regular_shortcuts(int num_layers, int span) {
  std::vector<Shortcut> out;
  if (span < 1) return out;
  for (int s = 0; s + span <= num_layers - 1; s += span) out.push_back({s, s + span});
  return out;
}

inline std::vector<std::string> validate_structure(const StructureGene& g,
                                                   const GenomeLimits& lim = {}) {
  std::vector<std::string> v;
  if (g.num_layers < lim.min_layers || g.num_layers > lim.max_layers)
    v.push_back("num_layers " + std::to_string(g.num_layers) + " outside [" +
                std::to_string(lim.min_layers) + ", " + std::to_string(lim.max_layers) + "]");
  const auto widths = lim.widths();
  if (std::find(widths.begin(), widths.end(), g.hidden_width) == widths.end())
    v.push_back("hidden_width " + std::to_string(g.hidden_width) + " is not an alternative width");
  for (std::size_t k = 0; k < g.shortcuts.size(); ++k) {
    const Shortcut& s = g.shortcuts[k];
    const std::string tag = std::to_string(s.start) + "-" + std::to_string(s.end);
    if (s.start < 0 || s.start >= s.end) v.push_back("shortcut " + tag + ": start must precede end");
    if (s.end > g.num_layers - 1) v.push_back("shortcut " + tag + ": spans the last layer");
    for (std::size_t l = k + 1; l < g.shortcuts.size(); ++l)
      if (!interiors_disjoint(s, g.shortcuts[l]))
        v.push_back("shortcuts " + tag + " and " + std::to_string(g.shortcuts[l].start) + "-" +
                    std::to_string(g.shortcuts[l].end) + ": intersecting interiors");
  }
  if (!std::is_sorted(g.shortcuts.begin(), g.shortcuts.end())) v.push_back("shortcuts not sorted");
  return v;
}

inline std::vector<std::string> validate_genome(const Genome& g, const GenomeLimits& lim = {}) {
  auto v = validate_structure(g.structure, lim);
  for (auto& s : exprtree::validate(g.activation, lim.max_nodes, lim.max_params))
    v.push_back("activation: " + s);
  if (static_cast<int>(g.params.size()) != g.activation.param_count())
    v.push_back("activation parameter values do not match parameter count");
  for (double p : g.params)
    if (!std::isfinite(p)) v.push_back("non-finite activation parameter value");
  return v;
}

// ---------------------------------------------------------------------------
// Editable activation tree (parameters travel with their edges)

struct EditNode {
  NodeKind kind = NodeKind::unary;
  std::uint8_t op = 0;
  std::optional<double> out;   // parameter on the output edge
  std::optional<double> leaf;  // parameter on the x edge (leaf-unary only)
  std::vector<EditNode> kids;

  int size() const {
    int n = 1;
    for (const auto& k : kids) n += k.size();
    return n;
  }
};

inline EditNode to_edit(const ActivationTree& t, const ParamVector& params, int idx = 0) {
  const auto& n = t.nodes()[idx];
  EditNode e;
  e.kind = n.kind;
  e.op = n.op;
  if (n.out_param >= 0) e.out = params.at(n.out_param);
  if (n.leaf_param >= 0) e.leaf = params.at(n.leaf_param);
  const int arity = n.kind == NodeKind::unary ? 1 : 2;
  for (int c = 0; c < arity; ++c)
    if (n.child[c] >= 0) e.kids.push_back(to_edit(t, params, n.child[c]));
  return e;
}

inline std::pair<ActivationTree, ParamVector> from_edit(const EditNode& root) {
  std::vector<exprtree::Node> nodes;
  ParamVector params;
  auto visit = [&](auto&& self, const EditNode& e) -> int {
    const int at = static_cast<int>(nodes.size());
    nodes.push_back(exprtree::Node{e.kind, e.op});
    if (e.out) {
      nodes[at].out_param = static_cast<int>(params.size());
      params.push_back(*e.out);
    }
    if (e.kind == NodeKind::unary && e.kids.empty() && e.leaf) {
      nodes[at].leaf_param = static_cast<int>(params.size());
      params.push_back(*e.leaf);
    }
    for (std::size_t c = 0; c < e.kids.size(); ++c) {
      const int child = self(self, e.kids[c]);
      nodes[at].child[c] = child;
    }
    return at;
  };
  visit(visit, root);
  return {ActivationTree::from_nodes(std::move(nodes)), std::move(params)};
}

namespace detail {

struct NodeRef {
  EditNode* node;
  EditNode* parent;  // null for the root
};

inline void collect(EditNode& n, EditNode* parent, std::vector<NodeRef>& out) {
  out.push_back({&n, parent});
  for (auto& k : n.kids) collect(k, &n, out);
}

inline std::vector<NodeRef> all_nodes(EditNode& root) {
  std::vector<NodeRef> out;
  collect(root, nullptr, out);
  return out;
}

struct EdgeRef {
  EditNode* node;
  bool leaf;  // the x edge of `node` rather than its output edge
  std::optional<double>& slot() const { return leaf ? node->leaf : node->out; }
};

inline std::vector<EdgeRef> all_edges(EditNode& root) {
  std::vector<EdgeRef> out;
  for (auto& r : all_nodes(root)) {
    out.push_back({r.node, false});
    if (r.node->kind == NodeKind::unary && r.node->kids.empty()) out.push_back({r.node, true});
  }
  return out;
}

inline int param_total(EditNode& root) {
  int n = 0;
  for (auto& e : all_edges(root)) n += e.slot().has_value();
  return n;
}

template <class R>
EditNode random_leaf_unary(R& rng) {
  EditNode e;
  e.op = static_cast<std::uint8_t>(uniform_int(rng, 0, exprtree::kUnaryCount - 1));
  return e;
}

template <class R>
std::uint8_t other_op(R& rng, NodeKind kind, std::uint8_t current) {
  const int count = kind == NodeKind::unary ? exprtree::kUnaryCount : exprtree::kBinaryCount;
  int pick = uniform_int(rng, 0, count - 2);
  if (pick >= current) ++pick;
  return static_cast<std::uint8_t>(pick);
}

template <class T, class R>
T& pick(std::vector<T>& v, R& rng) {
  return v[uniform_int(rng, 0, static_cast<int>(v.size()) - 1)];
}

}  // namespace detail

enum class ActivationMutation {
  insert_node,
  remove_node,
  change_node,
  regenerate_nodes,
  insert_param,
  remove_param,
  change_param,
};

/// Applies one activation mutation of the given type. Returns false (tree
/// untouched) when the type has no legal move.
template <class R>
bool mutate_activation_as(EditNode& root, ActivationMutation type, R& rng,
                          const GenomeLimits& lim = {}) {
  using detail::EdgeRef;
  using detail::NodeRef;
  const int count = root.size();
  switch (type) {
    case ActivationMutation::insert_node: {
      auto edges = detail::all_edges(root);
      const int op = uniform_int(rng, 0, exprtree::kUnaryCount + exprtree::kBinaryCount - 1);
      const bool is_binary = op >= exprtree::kUnaryCount;
      const EdgeRef e = detail::pick(edges, rng);
      const int added = !is_binary ? 1 : (e.leaf ? 3 : 2);
      if (count + added > lim.max_nodes) {
        // Draw again among operators that still fit.
        if (count + 1 > lim.max_nodes) return false;
        if (is_binary) return mutate_activation_as(root, type, rng, lim);
      }
      EditNode fresh;
      fresh.kind = is_binary ? NodeKind::binary : NodeKind::unary;
      fresh.op = static_cast<std::uint8_t>(is_binary ? op - exprtree::kUnaryCount : op);
      if (!e.leaf) {
        EditNode below = std::move(*e.node);
        if (is_binary) {
          EditNode other = detail::random_leaf_unary(rng);
          if (bernoulli(rng, 0.5)) fresh.kids = {std::move(below), std::move(other)};
          else fresh.kids = {std::move(other), std::move(below)};
        } else {
          fresh.kids = {std::move(below)};
        }
        *e.node = std::move(fresh);
      } else {
        EditNode& owner = *e.node;
        if (is_binary) {
          EditNode ident;
          ident.op = static_cast<std::uint8_t>(UnaryOp::identity);
          ident.leaf = owner.leaf;
          EditNode other = detail::random_leaf_unary(rng);
          if (bernoulli(rng, 0.5)) fresh.kids = {std::move(ident), std::move(other)};
          else fresh.kids = {std::move(other), std::move(ident)};
        } else {
          fresh.leaf = owner.leaf;
        }
        owner.leaf.reset();
        owner.kids = {std::move(fresh)};
      }
      return true;
    }
    case ActivationMutation::remove_node: {
      std::vector<NodeRef> legal;
      for (auto& r : detail::all_nodes(root)) {
        if (r.node->kind == NodeKind::binary) legal.push_back(r);
        else if (!r.node->kids.empty()) legal.push_back(r);
        else if (r.parent && r.parent->kind == NodeKind::unary) legal.push_back(r);
      }
      if (legal.empty()) return false;
      NodeRef r = detail::pick(legal, rng);
      EditNode& n = *r.node;
      if (n.kind == NodeKind::unary && n.kids.empty()) {
        // The parent takes x directly; the two edges merge.
        EditNode& parent = *r.parent;
        std::optional<double> merged = n.leaf ? n.leaf : n.out;
        parent.kids.clear();
        parent.leaf = merged;
        return true;
      }
      const int keep = n.kind == NodeKind::binary ? uniform_int(rng, 0, 1) : 0;
      EditNode kept = std::move(n.kids[keep]);
      if (!kept.out) kept.out = n.out;
      n = std::move(kept);
      return true;
    }
    case ActivationMutation::change_node: {
      auto nodes = detail::all_nodes(root);
      EditNode& n = *detail::pick(nodes, rng).node;
      n.op = detail::other_op(rng, n.kind, n.op);
      return true;
    }
    case ActivationMutation::regenerate_nodes: {
      for (auto& r : detail::all_nodes(root)) r.node->op = detail::other_op(rng, r.node->kind, r.node->op);
      return true;
    }
    case ActivationMutation::insert_param: {
      if (detail::param_total(root) >= lim.max_params) return false;
      std::vector<EdgeRef> free;
      for (auto& e : detail::all_edges(root))
        if (!e.slot()) free.push_back(e);
      if (free.empty()) return false;
      detail::pick(free, rng).slot() = exprtree::kInitialParamValue;
      return true;
    }
    case ActivationMutation::remove_param: {
      std::vector<EdgeRef> used;
      for (auto& e : detail::all_edges(root))
        if (e.slot()) used.push_back(e);
      if (used.empty()) return false;
      detail::pick(used, rng).slot().reset();
      return true;
    }
    case ActivationMutation::change_param: {
      std::vector<EdgeRef> used, free;
      for (auto& e : detail::all_edges(root)) (e.slot() ? used : free).push_back(e);
      if (used.empty() || free.empty()) return false;
      auto& from = detail::pick(used, rng).slot();
      detail::pick(free, rng).slot() = from;
      from.reset();
      return true;
    }
  }
  return false;
}

/// One activation mutation of a uniformly drawn type; types without a legal
/// move are redrawn. Returns false if no type applies.
template <class R>
bool mutate_activation(EditNode& root, R& rng, const GenomeLimits& lim = {}) {
  std::vector<int> types = {0, 1, 2, 3, 4, 5, 6};
  while (!types.empty()) {
    const int k = uniform_int(rng, 0, static_cast<int>(types.size()) - 1);
    if (mutate_activation_as(root, static_cast<ActivationMutation>(types[k]), rng, lim)) return true;
    types.erase(types.begin() + k);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Structure mutations

/// Inserts a hidden layer at position p (1 <= p <= n-1): endpoints at or
/// beyond p move up by one.
inline void insert_layer(StructureGene& g, int p) {
  for (auto& s : g.shortcuts) {
    if (s.start >= p) ++s.start;
    if (s.end >= p) ++s.end;
  }
  ++g.num_layers;
}

/// Removes the layer whose input is position p (1 <= p <= n-1): endpoints
/// beyond p move down by one and shortcuts that collapse are dropped.
inline void remove_layer(StructureGene& g, int p) {
  std::vector<Shortcut> kept;
  --g.num_layers;
  for (auto s : g.shortcuts) {
    if (s.start > p) --s.start;
    if (s.end > p) --s.end;
    if (s.start < s.end && s.end <= g.num_layers - 1) kept.push_back(s);
  }
  g.shortcuts = std::move(kept);
}

template <class R>
void mutate_layers(StructureGene& g, R& rng, const GenomeLimits& lim = {}) {
  bool insert = bernoulli(rng, 0.5);
  if (g.num_layers >= lim.max_layers) insert = false;
  if (g.num_layers <= lim.min_layers) insert = true;
  const int p = uniform_int(rng, 1, g.num_layers - 1);
  if (insert) insert_layer(g, p);
  else remove_layer(g, p);
}

template <class R>
void mutate_width(StructureGene& g, R& rng, const GenomeLimits& lim = {}) {
  const int up = g.hidden_width + lim.width_step, down = g.hidden_width - lim.width_step;
  if (up > lim.max_width) g.hidden_width = down;
  else if (down < lim.min_width) g.hidden_width = up;
  else g.hidden_width = bernoulli(rng, 0.5) ? up : down;
}

enum class ShortcutMutation { add, remove, change };

template <class R>
bool mutate_shortcuts_as(StructureGene& g, ShortcutMutation type, R& rng) {
  auto& set = g.shortcuts;
  switch (type) {
    case ShortcutMutation::add: {
      auto options = legal_additions(g);
      if (options.empty()) return false;
      set.push_back(detail::pick(options, rng));
      break;
    }
    case ShortcutMutation::remove: {
      if (set.empty()) return false;
      set.erase(set.begin() + uniform_int(rng, 0, static_cast<int>(set.size()) - 1));
      break;
    }
    case ShortcutMutation::change: {
      // (shortcut index, replacement) pairs that move exactly one endpoint.
      std::vector<std::pair<int, Shortcut>> moves;
      std::vector<int> movable;
      for (int k = 0; k < static_cast<int>(set.size()); ++k) {
        bool any = false;
        for (int pos = 0; pos < g.num_layers; ++pos) {
          for (Shortcut c : {Shortcut{pos, set[k].end}, Shortcut{set[k].start, pos}}) {
            if (c == set[k] || !fits(set, c, g.num_layers, k)) continue;
            if (std::find(set.begin(), set.end(), c) != set.end()) continue;
            any = true;
          }
        }
        if (any) movable.push_back(k);
      }
      if (movable.empty()) return false;
      const int k = detail::pick(movable, rng);
      for (int pos = 0; pos < g.num_layers; ++pos)
        for (Shortcut c : {Shortcut{pos, set[k].end}, Shortcut{set[k].start, pos}})
          if (c != set[k] && fits(set, c, g.num_layers, k) &&
              std::find(set.begin(), set.end(), c) == set.end())
            moves.emplace_back(k, c);
      set[k] = detail::pick(moves, rng).second;
      break;
    }
  }
  std::sort(set.begin(), set.end());
  return true;
}

template <class R>
bool mutate_shortcuts(StructureGene& g, R& rng) {
  std::vector<int> types = {0, 1, 2};
  while (!types.empty()) {
    const int k = uniform_int(rng, 0, static_cast<int>(types.size()) - 1);
    if (mutate_shortcuts_as(g, static_cast<ShortcutMutation>(types[k]), rng)) return true;
    types.erase(types.begin() + k);
  }
  return false;
}

/// Independent mutation of the four sub-genes with their rates. The parent is
/// not modified; activation parameter values ride along with their edges.
template <class R>
Genome mutate(const Genome& parent, const MutationRates& rates, R& rng,
              const GenomeLimits& lim = {}) {
  Genome child = parent;
  child.lineage.clear();
  if (bernoulli(rng, rates.layers)) mutate_layers(child.structure, rng, lim);
  if (bernoulli(rng, rates.neurons)) mutate_width(child.structure, rng, lim);
  if (bernoulli(rng, rates.shortcuts)) mutate_shortcuts(child.structure, rng);
  if (bernoulli(rng, rates.activation)) {
    EditNode root = to_edit(parent.activation, parent.params);
    if (mutate_activation(root, rng, lim)) {
      auto [tree, params] = from_edit(root);
      child.activation = std::move(tree);
      child.params = std::move(params);
    }
  }
  return child;
}

/// Single-point crossover between the structure and activation genes: with
/// probability `rate` the children are (S1, A2) and (S2, A1), otherwise copies.
template <class R>
std::pair<Genome, Genome> crossover(const Genome& p1, const Genome& p2, double rate, R& rng) {
  Genome c1 = p1, c2 = p2;
  c1.lineage.clear();
  c2.lineage.clear();
  if (bernoulli(rng, rate)) {
    std::swap(c1.activation, c2.activation);
    std::swap(c1.params, c2.params);
  }
  return {std::move(c1), std::move(c2)};
}

// ---------------------------------------------------------------------------
// Initialization

/// Common activations used to seed the initial population. ReCU, max(0,x)^3,
/// is spelled with library operators as max(x-x, x^2*x).
inline std::vector<std::string> common_activations() {
  return {"tanh(x)",   "atan(x)",  "sin(x)",           "cos(x)",
          "asinh(x)",  "sigmoid(x)", "max(x-x,sq(x)*x)", "swish(x)",
          "tanh(a*x)", "sin(a*x)", "cos(a*x)",         "sigmoid(a*x)",
          "x*sigmoid(a*x)"};
}

struct InitPolicy {
  enum class Structure { any, fcnet, regular, random };
  enum class Activation { any, common, random };
  Structure structure = Structure::any;
  Activation activation = Activation::any;
  std::optional<int> num_layers;
  std::optional<int> regular_span;
  double common_fraction = 0.25;  // common : random = 1 : 3
};

template <class R>
Genome random_genome(R& rng, const InitPolicy& policy = {}, const GenomeLimits& lim = {}) {
  Genome g;
  const auto widths = lim.widths();
  g.structure.num_layers = policy.num_layers.value_or(uniform_int(rng, lim.min_layers, lim.max_layers));
  g.structure.hidden_width = widths[uniform_int(rng, 0, static_cast<int>(widths.size()) - 1)];
  auto kind = policy.structure;
  if (kind == InitPolicy::Structure::any)
    kind = static_cast<InitPolicy::Structure>(uniform_int(rng, 1, 3));
  const int n = g.structure.num_layers;
  if (kind == InitPolicy::Structure::regular) {
    const int span = policy.regular_span.value_or(uniform_int(rng, 1, std::min(5, n - 1)));
    g.structure.shortcuts = regular_shortcuts(n, span);
  } else if (kind == InitPolicy::Structure::random) {
    const int wanted = uniform_int(rng, 1, n - 1);
    for (int k = 0; k < wanted; ++k)
      if (!mutate_shortcuts_as(g.structure, ShortcutMutation::add, rng)) break;
  }
  auto act = policy.activation;
  if (act == InitPolicy::Activation::any)
    act = bernoulli(rng, policy.common_fraction) ? InitPolicy::Activation::common
                                                 : InitPolicy::Activation::random;
  if (act == InitPolicy::Activation::common) {
    const auto list = common_activations();
    g.activation = exprtree::parse(list[uniform_int(rng, 0, static_cast<int>(list.size()) - 1)]);
  } else {
    exprtree::RandomTreePolicy tp;
    tp.max_params = lim.max_params;
    g.activation = exprtree::random_tree(rng, tp);
  }
  g.params.assign(g.activation.param_count(), exprtree::kInitialParamValue);
  return g;
}

// ---------------------------------------------------------------------------
// Text form

class GenomeParseError : public std::runtime_error {
 public:
  GenomeParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string shortcuts_string(const std::vector<Shortcut>& s) {
  if (s.empty()) return "none";
  std::string out = "[";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(s[k].start) + "-" + std::to_string(s[k].end);
  }
  return out + "]";
}

/// `layer num: 6; neuron num: 48; shortcuts: [0-1,1-2]; activation: ...; params: [...]`
/// with one field per line (or on one line with `single_line`).
inline std::string to_text(const Genome& g, bool single_line = false) {
  std::string params = "[";
  for (std::size_t k = 0; k < g.params.size(); ++k) {
    if (k) params += ",";
    params += format_double(g.params[k]);
  }
  params += "]";
  const char* sep = single_line ? "; " : "\n";
  std::string out = "layer num: " + std::to_string(g.structure.num_layers) + sep +
                    "neuron num: " + std::to_string(g.structure.hidden_width) + sep +
                    "shortcuts: " + shortcuts_string(g.structure.shortcuts) + sep +
                    "activation: " + exprtree::canonical_string(g.activation) + sep +
                    "params: " + params;
  return single_line ? out : out + "\n";
}

inline Genome from_text(const std::string& text) {
  // Split into fields on newlines and ';', remembering each field's line and column.
  struct Field {
    std::string key, value;
    int line, column;
  };
  std::vector<Field> fields;
  int line = 1;
  std::size_t start = 0;
  int start_col = 1;
  auto flush = [&](std::size_t end) {
    std::string raw = text.substr(start, end - start);
    std::size_t lead = raw.find_first_not_of(" \t\r");
    if (lead == std::string::npos) return;
    const std::size_t colon = raw.find(':');
    if (colon == std::string::npos)
      throw GenomeParseError(line, start_col + static_cast<int>(lead), "expected 'key: value'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::size_t vstart = raw.find_first_not_of(" \t", colon + 1);
    fields.push_back({trim(raw.substr(0, colon)), trim(raw.substr(colon + 1)), line,
                      start_col + static_cast<int>(vstart == std::string::npos ? colon + 1 : vstart)});
  };
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n' || text[i] == ';') {
      flush(i);
      if (i < text.size() && text[i] == '\n') {
        ++line;
        start_col = 1;
      } else {
        start_col += static_cast<int>(i - start) + 1;
      }
      start = i + 1;
    }
  }
  Genome g;
  bool have[5] = {};
  auto parse_int = [](const Field& f) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(f.value, &used);
    } catch (const std::exception&) {
      throw GenomeParseError(f.line, f.column, "expected an integer");
    }
    if (used != f.value.size()) throw GenomeParseError(f.line, f.column + static_cast<int>(used), "trailing characters");
    return v;
  };
  for (const Field& f : fields) {
    if (f.key == "layer num") {
      g.structure.num_layers = parse_int(f);
      have[0] = true;
    } else if (f.key == "neuron num") {
      g.structure.hidden_width = parse_int(f);
      have[1] = true;
    } else if (f.key == "shortcuts") {
      have[2] = true;
      if (f.value == "none" || f.value == "[]") continue;
      if (f.value.size() < 2 || f.value.front() != '[' || f.value.back() != ']')
        throw GenomeParseError(f.line, f.column, "expected [i-j,...] or none");
      std::stringstream ss(f.value.substr(1, f.value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        int a = 0, b = 0;
        char dash = 0;
        std::stringstream is(item);
        if (!(is >> a >> dash >> b) || dash != '-')
          throw GenomeParseError(f.line, f.column, "bad shortcut '" + item + "'");
        // '-' is consumed by >> b as a sign otherwise; the check above guards that.
        g.structure.shortcuts.push_back({a, b});
      }
      std::sort(g.structure.shortcuts.begin(), g.structure.shortcuts.end());
    } else if (f.key == "activation") {
      try {
        g.activation = exprtree::parse(f.value);
      } catch (const exprtree::ParseError& e) {
        throw GenomeParseError(f.line, f.column + e.column() - 1, e.what());
      } catch (const std::invalid_argument& e) {
        throw GenomeParseError(f.line, f.column, e.what());
      }
      have[3] = true;
    } else if (f.key == "params") {
      have[4] = true;
      if (f.value.size() < 2 || f.value.front() != '[' || f.value.back() != ']')
        throw GenomeParseError(f.line, f.column, "expected [v,...]");
      std::stringstream ss(f.value.substr(1, f.value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          g.params.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw GenomeParseError(f.line, f.column, "bad parameter value '" + item + "'");
        }
      }
    } else {
      throw GenomeParseError(f.line, 1, "unknown field '" + f.key + "'");
    }
  }
  const char* names[] = {"layer num", "neuron num", "shortcuts", "activation"};
  for (int k = 0; k < 4; ++k)
    if (!have[k]) throw GenomeParseError(line, 1, std::string("missing field '") + names[k] + "'");
  if (!have[4]) g.params.assign(g.activation.param_count(), exprtree::kInitialParamValue);
  if (static_cast<int>(g.params.size()) != g.activation.param_count())
    throw GenomeParseError(line, 1, "params count does not match the activation");
  return g;
}

}  // namespace pinnevo::genome
