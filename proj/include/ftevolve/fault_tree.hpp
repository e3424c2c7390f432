#pragma once

// Static fault tree model: AND / OR / at-least-k gates wired into a rooted
// DAG over named basic events.  Gates have a single output each; basic
// events may feed several gates.  Evaluation is monotone boolean logic.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ftevolve/errors.hpp"

namespace ftevolve {

// Node names are plain identifiers ([A-Za-z0-9_]+) shared between gates and
// basic events; a single name space per tree.
using NodeId = std::string;

namespace detail {

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

enum class GateOp { And, Or, AtLeast };

// Gate behavior.  AtLeast carries its cardinality k; And/Or keep k at 0 so
// that defaulted equality works.
struct GateKind {
  GateOp op = GateOp::Or;
  int k = 0;

  static GateKind and_gate() { return {GateOp::And, 0}; }
  static GateKind or_gate() { return {GateOp::Or, 0}; }
  static GateKind at_least(int k) { return {GateOp::AtLeast, k}; }

  friend bool operator==(const GateKind&, const GateKind&) = default;
};

inline std::string kind_text(const GateKind& kind, std::size_t fan_in) {
  switch (kind.op) {
    case GateOp::And: return "and";
    case GateOp::Or: return "or";
    default: return std::to_string(kind.k) + "of" + std::to_string(fan_in);
  }
}

struct Gate {
  NodeId output;
  GateKind kind;
  std::vector<NodeId> inputs;  // kept sorted and duplicate-free

  bool has_input(const NodeId& id) const {
    return std::binary_search(inputs.begin(), inputs.end(), id);
  }

  // Inserting an input that is already present is a no-op: inputs form a set.
  void add_input(const NodeId& id) {
    auto it = std::lower_bound(inputs.begin(), inputs.end(), id);
    if (it == inputs.end() || *it != id) inputs.insert(it, id);
  }

  void remove_input(const NodeId& id) {
    auto it = std::lower_bound(inputs.begin(), inputs.end(), id);
    if (it != inputs.end() && *it == id) inputs.erase(it);
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

// Keeps an at-least gate's cardinality inside [1, max(fan_in - 1, 1)].
// Callers invoke this after every change to the gate's input list.
inline void clamp_cardinality(Gate& g) {
  if (g.kind.op != GateOp::AtLeast) return;
  int hi = std::max(static_cast<int>(g.inputs.size()) - 1, 1);
  if (g.kind.k < 1) g.kind.k = 1;
  if (g.kind.k > hi) g.kind.k = hi;
}

struct FaultTree {
  NodeId top;
  std::map<NodeId, Gate> gates;  // keyed by gate output name
  std::set<NodeId> basic_events;
  std::map<NodeId, double> be_probabilities;  // optional, keys are basic events

  bool is_gate(const NodeId& id) const { return gates.count(id) != 0; }
  bool is_basic_event(const NodeId& id) const { return basic_events.count(id) != 0; }

  std::size_t gate_count() const { return gates.size(); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& [id, g] : gates) n += g.inputs.size();
    return n;
  }

  // Gates that list `id` among their inputs, in name order.
  std::vector<NodeId> parents_of(const NodeId& id) const {
    std::vector<NodeId> out;
    for (const auto& [gid, g] : gates)
      if (g.has_input(id)) out.push_back(gid);
    return out;
  }

  // Smallest G<n> not used by any node of this tree.
  NodeId fresh_gate_id() const {
    for (int n = 1;; ++n) {
      NodeId id = "G" + std::to_string(n);
      if (!is_gate(id) && !is_basic_event(id)) return id;
    }
  }

  friend bool operator==(const FaultTree&, const FaultTree&) = default;
};

// Convenience constructor for a tree consisting of one gate over basic events.
inline FaultTree single_gate_tree(NodeId top, GateKind kind, std::vector<NodeId> inputs) {
  FaultTree ft;
  ft.top = top;
  Gate g;
  g.output = ft.top;
  g.kind = kind;
  for (auto& in : inputs) {
    g.add_input(in);
    ft.basic_events.insert(std::move(in));
  }
  clamp_cardinality(g);
  ft.gates.emplace(ft.top, std::move(g));
  return ft;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationRule {
  TopUndefined,      // top does not name a gate
  NodeOverlap,       // same name is both a gate and a basic event
  DuplicateInput,    // an input listed twice on one gate
  SelfLoop,          // gate feeds itself
  UnknownInput,      // input names neither a gate nor a basic event
  CardinalityRange,  // at-least k outside [1, max(fan_in - 1, 1)]
  Cycle,             // gate lies on a directed cycle
  Unreachable        // node not reachable from top
};

inline const char* rule_name(ViolationRule r) {
  switch (r) {
    case ViolationRule::TopUndefined: return "top-undefined";
    case ViolationRule::NodeOverlap: return "node-overlap";
    case ViolationRule::DuplicateInput: return "duplicate-input";
    case ViolationRule::SelfLoop: return "self-loop";
    case ViolationRule::UnknownInput: return "unknown-input";
    case ViolationRule::CardinalityRange: return "cardinality-range";
    case ViolationRule::Cycle: return "cycle";
    default: return "unreachable";
  }
}

struct Violation {
  ViolationRule rule;
  NodeId node;
  std::string message;
};

// Structural well-formedness check.  Returns every violated rule together
// with the offending node; an empty result means the tree is valid.
inline std::vector<Violation> validate(const FaultTree& ft) {
  std::vector<Violation> out;
  auto add = [&out](ViolationRule r, const NodeId& n, std::string msg) {
    out.push_back({r, n, std::move(msg)});
  };

  if (!ft.is_gate(ft.top))
    add(ViolationRule::TopUndefined, ft.top, "top '" + ft.top + "' is not a gate");

  for (const auto& be : ft.basic_events)
    if (ft.is_gate(be))
      add(ViolationRule::NodeOverlap, be, "'" + be + "' is both a gate and a basic event");

  for (const auto& [id, g] : ft.gates) {
    std::set<NodeId> seen;
    for (const auto& in : g.inputs) {
      if (!seen.insert(in).second)
        add(ViolationRule::DuplicateInput, id, "gate '" + id + "' lists '" + in + "' twice");
      if (in == id)
        add(ViolationRule::SelfLoop, id, "gate '" + id + "' feeds itself");
      else if (!ft.is_gate(in) && !ft.is_basic_event(in))
        add(ViolationRule::UnknownInput, id, "gate '" + id + "' references undefined '" + in + "'");
    }
    if (g.kind.op == GateOp::AtLeast) {
      int hi = std::max(static_cast<int>(g.inputs.size()) - 1, 1);
      if (g.kind.k < 1 || g.kind.k > hi)
        add(ViolationRule::CardinalityRange, id,
            "gate '" + id + "' cardinality " + std::to_string(g.kind.k) +
                " outside [1, " + std::to_string(hi) + "]");
    }
  }

  // Cycle detection over gate-to-gate edges; self-loops were reported above.
  {
    std::map<NodeId, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::set<NodeId> on_cycle;
    std::vector<std::pair<NodeId, std::size_t>> stack;
    for (const auto& [root, g0] : ft.gates) {
      if (state[root]) continue;
      stack.push_back({root, 0});
      state[root] = 1;
      while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const Gate& g = ft.gates.at(id);
        if (next < g.inputs.size()) {
          const NodeId& in = g.inputs[next++];
          if (in == id || !ft.is_gate(in)) continue;
          int s = state[in];
          if (s == 0) {
            state[in] = 1;
            stack.push_back({in, 0});
          } else if (s == 1) {
            on_cycle.insert(in);
            on_cycle.insert(id);
          }
        } else {
          state[id] = 2;
          stack.pop_back();
        }
      }
    }
    for (const auto& id : on_cycle)
      add(ViolationRule::Cycle, id, "gate '" + id + "' lies on a cycle");
  }

  // Reachability from top (only meaningful when top is defined).
  if (ft.is_gate(ft.top)) {
    std::set<NodeId> reached;
    std::vector<NodeId> frontier{ft.top};
    reached.insert(ft.top);
    while (!frontier.empty()) {
      NodeId id = std::move(frontier.back());
      frontier.pop_back();
      auto it = ft.gates.find(id);
      if (it == ft.gates.end()) continue;
      for (const auto& in : it->second.inputs)
        if (reached.insert(in).second) frontier.push_back(in);
    }
    for (const auto& [id, g] : ft.gates)
      if (!reached.count(id))
        add(ViolationRule::Unreachable, id, "gate '" + id + "' is unreachable from top");
    for (const auto& be : ft.basic_events)
      if (!reached.count(be))
        add(ViolationRule::Unreachable, be, "basic event '" + be + "' is unreachable from top");
  }

  return out;
}

inline bool is_valid(const FaultTree& ft) { return validate(ft).empty(); }

// ---------------------------------------------------------------------------
// Traversal helpers

// Gates reachable from top, children before parents.  Throws on a cycle.
inline std::vector<NodeId> topological_order(const FaultTree& ft) {
  if (!ft.is_gate(ft.top)) throw input_error("top '" + ft.top + "' is not a gate");
  std::vector<NodeId> order;
  std::map<NodeId, int> state;
  std::vector<std::pair<NodeId, std::size_t>> stack{{ft.top, 0}};
  state[ft.top] = 1;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const Gate& g = ft.gates.at(id);
    if (next < g.inputs.size()) {
      const NodeId& in = g.inputs[next++];
      if (!ft.is_gate(in)) continue;
      int s = state[in];
      if (s == 1) throw input_error("cycle through gate '" + in + "'");
      if (s == 0) {
        state[in] = 1;
        stack.push_back({in, 0});
      }
    } else {
      state[id] = 2;
      order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

// Drops every gate and basic event that is no longer reachable from top.
// Probability entries of dropped basic events go with them.
inline void prune_unreachable(FaultTree& ft) {
  std::set<NodeId> reached{ft.top};
  std::vector<NodeId> frontier{ft.top};
  while (!frontier.empty()) {
    NodeId id = std::move(frontier.back());
    frontier.pop_back();
    auto it = ft.gates.find(id);
    if (it == ft.gates.end()) continue;
    for (const auto& in : it->second.inputs)
      if (reached.insert(in).second) frontier.push_back(in);
  }
  for (auto it = ft.gates.begin(); it != ft.gates.end();)
    it = reached.count(it->first) ? std::next(it) : ft.gates.erase(it);
  for (auto it = ft.basic_events.begin(); it != ft.basic_events.end();)
    it = reached.count(*it) ? std::next(it) : ft.basic_events.erase(it);
  for (auto it = ft.be_probabilities.begin(); it != ft.be_probabilities.end();)
    it = ft.basic_events.count(it->first) ? std::next(it) : ft.be_probabilities.erase(it);
}

// ---------------------------------------------------------------------------
// Evaluation

using Assignment = std::map<NodeId, bool>;

namespace detail {

inline bool gate_value(const GateKind& kind, const std::vector<char>& vals) {
  // A gate with no inputs is false; a gate with one input passes it through.
  if (vals.empty()) return false;
  if (vals.size() == 1) return vals[0] != 0;
  switch (kind.op) {
    case GateOp::And:
      return std::all_of(vals.begin(), vals.end(), [](char v) { return v != 0; });
    case GateOp::Or:
      return std::any_of(vals.begin(), vals.end(), [](char v) { return v != 0; });
    default: {
      int n = static_cast<int>(std::count_if(vals.begin(), vals.end(), [](char v) { return v != 0; }));
      return n >= kind.k;
    }
  }
}

}  // namespace detail

// Value of the top event under a total assignment of the basic events.
// Throws input_error when a referenced basic event has no value.
inline bool evaluate(const FaultTree& ft, const Assignment& assignment) {
  std::map<NodeId, bool> value;
  for (const NodeId& id : topological_order(ft)) {
    const Gate& g = ft.gates.at(id);
    std::vector<char> vals;
    vals.reserve(g.inputs.size());
    for (const auto& in : g.inputs) {
      if (ft.is_gate(in)) {
        vals.push_back(value.at(in));
      } else {
        auto it = assignment.find(in);
        if (it == assignment.end())
          throw input_error("no value for basic event '" + in + "'");
        vals.push_back(it->second);
      }
    }
    value[id] = detail::gate_value(g.kind, vals);
  }
  return value.at(ft.top);
}

namespace detail {

// Flattened evaluator for tight loops: nodes in dependency order, children
// referenced by slot, leaves by variable index.  Semantics match evaluate().
class CompiledTree {
 public:
  // var_index maps each basic event of ft to a slot in the value array
  // handed to eval().  Missing entries raise input_error.
  CompiledTree(const FaultTree& ft, const std::map<NodeId, int>& var_index) {
    std::vector<NodeId> order = topological_order(ft);
    std::map<NodeId, int> slot;
    for (const NodeId& id : order) {
      const Gate& g = ft.gates.at(id);
      Node n;
      n.kind = g.kind;
      for (const auto& in : g.inputs) {
        if (ft.is_gate(in)) {
          n.children.push_back(slot.at(in));
        } else {
          auto it = var_index.find(in);
          if (it == var_index.end())
            throw input_error("basic event '" + in + "' has no variable slot");
          n.children.push_back(-1 - it->second);
        }
      }
      slot[id] = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(n));
    }
    root_ = slot.at(ft.top);
    scratch_.resize(nodes_.size());
  }

  bool eval(const std::uint8_t* vars) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      bool v;
      if (n.children.empty()) {
        v = false;
      } else if (n.children.size() == 1) {
        v = child_value(n.children[0], vars);
      } else {
        switch (n.kind.op) {
          case GateOp::And: {
            v = true;
            for (int c : n.children)
              if (!child_value(c, vars)) { v = false; break; }
            break;
          }
          case GateOp::Or: {
            v = false;
            for (int c : n.children)
              if (child_value(c, vars)) { v = true; break; }
            break;
          }
          default: {
            int cnt = 0;
            for (int c : n.children)
              if (child_value(c, vars)) ++cnt;
            v = cnt >= n.kind.k;
            break;
          }
        }
      }
      scratch_[i] = v ? 1 : 0;
    }
    return scratch_[root_] != 0;
  }

 private:
  struct Node {
    GateKind kind;
    std::vector<int> children;  // >= 0: node slot; < 0: variable -(c+1)
  };

  bool child_value(int c, const std::uint8_t* vars) const {
    return c >= 0 ? scratch_[c] != 0 : vars[-1 - c] != 0;
  }

  std::vector<Node> nodes_;
  int root_ = 0;
  mutable std::vector<std::uint8_t> scratch_;
};

inline std::map<NodeId, int> index_basic_events(const FaultTree& ft) {
  std::map<NodeId, int> idx;
  int i = 0;
  for (const auto& be : ft.basic_events) idx[be] = i++;
  return idx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// At-least expansion

// Rewrites every at-least-k gate into an OR over AND gates, one per
// k-subset of its inputs.  k = 1 degenerates to a plain OR.  The result is
// equivalent to the input on every assignment.
inline FaultTree expand_at_least(const FaultTree& ft) {
  FaultTree out = ft;
  std::vector<NodeId> todo;
  for (const auto& [id, g] : out.gates)
    if (g.kind.op == GateOp::AtLeast) todo.push_back(id);

  for (const NodeId& id : todo) {
    Gate& g = out.gates.at(id);
    const int k = g.kind.k;
    const std::vector<NodeId> ins = g.inputs;
    const int n = static_cast<int>(ins.size());
    g.kind = GateKind::or_gate();
    if (k <= 1 || n <= 1) continue;  // OR over the same inputs already matches
    g.inputs.clear();
    if (k > n) continue;  // fewer inputs than required: constant false, empty OR

    // Enumerate k-subsets in lexicographic index order.
    std::vector<int> comb(k);
    for (int i = 0; i < k; ++i) comb[i] = i;
    while (true) {
      Gate sub;
      sub.output = out.fresh_gate_id();
      sub.kind = GateKind::and_gate();
      for (int i : comb) sub.add_input(ins[i]);
      out.gates.at(id).add_input(sub.output);
      out.gates.emplace(sub.output, std::move(sub));

      int pos = k - 1;
      while (pos >= 0 && comb[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int i = pos + 1; i < k; ++i) comb[i] = comb[i - 1] + 1;
    }
  }
  return out;
}

}  // namespace ftevolve
