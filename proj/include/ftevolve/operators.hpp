#pragma once

// Structural search moves over fault trees.  Every operator takes a tree by
// const reference and returns a modified copy, or nothing when it does not
// apply to the given tree.  All randomness comes from the supplied Rng, so
// a fixed seed replays the exact same move.
//
// Each operator has a restricted twin (the *_o functions in skeleton.hpp)
// that must not touch a fixed subgraph; both share the implementations
// below, which take an optional restriction view describing that subgraph.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ftevolve/fault_tree.hpp"
#include "ftevolve/rng.hpp"

namespace ftevolve {

namespace detail {

// Read-only view of a fixed subgraph that restricted operators preserve.
struct SkeletonView {
  const FaultTree* ft = nullptr;

  bool is_gate(const NodeId& id) const { return ft->is_gate(id); }
  bool is_basic_event(const NodeId& id) const { return ft->is_basic_event(id); }
  bool has_edge(const NodeId& parent, const NodeId& child) const {
    auto it = ft->gates.find(parent);
    return it != ft->gates.end() && it->second.has_input(child);
  }
};

// True when ft embeds the fixed subgraph exactly: same top, every fixed
// gate present with identical kind, every fixed edge present, every fixed
// basic event present.  Extra children on fixed gates are fine.
inline bool contains_subgraph(const FaultTree& ft, const FaultTree& skel) {
  if (ft.top != skel.top) return false;
  for (const auto& [id, sg] : skel.gates) {
    auto it = ft.gates.find(id);
    if (it == ft.gates.end()) return false;
    if (it->second.kind != sg.kind) return false;
    for (const auto& in : sg.inputs)
      if (!it->second.has_input(in)) return false;
  }
  for (const auto& be : skel.basic_events)
    if (!ft.is_basic_event(be)) return false;
  return true;
}

inline std::vector<GateOp> allowed_ops(bool allow_at_least) {
  std::vector<GateOp> ops{GateOp::And, GateOp::Or};
  if (allow_at_least) ops.push_back(GateOp::AtLeast);
  return ops;
}

// Uniform draw over the subsets of `universe` with size in [1, max_take].
inline std::vector<NodeId> draw_subset(const std::vector<NodeId>& universe, std::size_t max_take,
                                       Rng& rng) {
  const std::size_t e = universe.size();
  std::vector<NodeId> out;
  while (true) {
    out.clear();
    if (e <= 63) {
      const std::uint64_t mask = rng.below((std::uint64_t{1} << e) - 1) + 1;
      for (std::size_t i = 0; i < e; ++i)
        if (mask >> i & 1) out.push_back(universe[i]);
    } else {
      for (std::size_t i = 0; i < e; ++i)
        if (rng.chance(0.5)) out.push_back(universe[i]);
      if (out.empty()) continue;
    }
    if (out.size() <= max_take) return out;
  }
}

// ---------------------------------------------------------------------------

// Splits a uniformly chosen proper subset of one gate's inputs off into a
// fresh child gate of uniformly chosen kind.
inline std::optional<FaultTree> g_create_impl(const FaultTree& ft, const SkeletonView* sk,
                                              Rng& rng, bool allow_at_least) {
  struct Candidate {
    NodeId gate;
    std::vector<NodeId> movable;
    std::size_t max_take;
  };
  std::vector<Candidate> cands;
  for (const auto& [id, g] : ft.gates) {
    if (g.inputs.size() < 2) continue;
    Candidate c;
    c.gate = id;
    const bool fixed = sk && sk->is_gate(id);
    for (const auto& in : g.inputs)
      if (!fixed || !sk->has_edge(id, in)) c.movable.push_back(in);
    c.max_take = std::min(c.movable.size(), g.inputs.size() - 1);
    if (!c.movable.empty() && c.max_take >= 1) cands.push_back(std::move(c));
  }
  if (cands.empty()) return std::nullopt;

  const GateOp op = rng.pick(allowed_ops(allow_at_least));
  const Candidate& c = cands[rng.index(cands.size())];
  const std::vector<NodeId> taken = draw_subset(c.movable, c.max_take, rng);

  FaultTree out = ft;
  Gate fresh;
  fresh.output = out.fresh_gate_id();
  fresh.kind.op = op;
  if (op == GateOp::AtLeast) {
    const int hi = std::max(static_cast<int>(taken.size()) - 1, 1);
    fresh.kind.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi)));
  }
  Gate& host = out.gates.at(c.gate);
  for (const auto& in : taken) {
    host.remove_input(in);
    fresh.add_input(in);
  }
  host.add_input(fresh.output);
  clamp_cardinality(host);
  out.gates.emplace(fresh.output, std::move(fresh));
  return out;
}

// Flips one gate to a different kind.
inline std::optional<FaultTree> g_mutate_impl(const FaultTree& ft, const SkeletonView* sk,
                                              Rng& rng, bool allow_at_least) {
  std::vector<NodeId> pool;
  for (const auto& [id, g] : ft.gates)
    if (!sk || !sk->is_gate(id)) pool.push_back(id);
  if (pool.empty()) return std::nullopt;

  const NodeId& id = pool[rng.index(pool.size())];
  const GateOp current = ft.gates.at(id).kind.op;
  std::vector<GateOp> others;
  for (GateOp op : allowed_ops(allow_at_least))
    if (op != current) others.push_back(op);
  if (others.empty()) return std::nullopt;

  FaultTree out = ft;
  Gate& g = out.gates.at(id);
  g.kind.op = others[rng.index(others.size())];
  if (g.kind.op == GateOp::AtLeast) {
    const int hi = std::max(static_cast<int>(g.inputs.size()) - 1, 1);
    g.kind.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi)));
  } else {
    g.kind.k = 0;
  }
  return out;
}

// Re-draws the cardinality of one at-least gate.  Needs a gate with at
// least three inputs, otherwise no alternative cardinality exists.
inline std::optional<FaultTree> k_n_change_impl(const FaultTree& ft, const SkeletonView* sk,
                                                Rng& rng) {
  std::vector<NodeId> pool;
  for (const auto& [id, g] : ft.gates)
    if (g.kind.op == GateOp::AtLeast && g.inputs.size() >= 3 && (!sk || !sk->is_gate(id)))
      pool.push_back(id);
  if (pool.empty()) return std::nullopt;

  FaultTree out = ft;
  Gate& g = out.gates.at(pool[rng.index(pool.size())]);
  const int hi = static_cast<int>(g.inputs.size()) - 1;
  // Uniform over [1, hi] minus the current value.
  int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - 1)));
  if (k >= g.kind.k) ++k;
  g.kind.k = k;
  return out;
}

// Removes one non-top gate; its inputs are hoisted to each of its parents.
inline std::optional<FaultTree> g_delete_impl(const FaultTree& ft, const SkeletonView* sk,
                                              Rng& rng) {
  std::vector<NodeId> pool;
  for (const auto& [id, g] : ft.gates)
    if (id != ft.top && (!sk || !sk->is_gate(id))) pool.push_back(id);
  if (pool.empty()) return std::nullopt;

  const NodeId victim = pool[rng.index(pool.size())];
  FaultTree out = ft;
  const std::vector<NodeId> orphans = out.gates.at(victim).inputs;
  for (const NodeId& pid : out.parents_of(victim)) {
    Gate& p = out.gates.at(pid);
    p.remove_input(victim);
    for (const NodeId& in : orphans) p.add_input(in);
    clamp_cardinality(p);
  }
  out.gates.erase(victim);
  return out;
}

// Detaches a basic event from one of its parent gates; the event leaves the
// tree entirely when that was its last parent.
inline std::optional<FaultTree> be_disconnect_impl(const FaultTree& ft, const SkeletonView* sk,
                                                   Rng& rng) {
  if (ft.basic_events.size() < 2) return std::nullopt;
  std::vector<NodeId> pool;
  for (const auto& be : ft.basic_events)
    if (!sk || !sk->is_basic_event(be)) pool.push_back(be);
  if (pool.empty()) return std::nullopt;

  const NodeId be = pool[rng.index(pool.size())];
  const std::vector<NodeId> parents = ft.parents_of(be);
  if (parents.empty()) return std::nullopt;

  FaultTree out = ft;
  Gate& p = out.gates.at(parents[rng.index(parents.size())]);
  p.remove_input(be);
  clamp_cardinality(p);
  if (out.parents_of(be).empty()) {
    out.basic_events.erase(be);
    out.be_probabilities.erase(be);
  }
  return out;
}

// Attaches a variable that is not yet part of the tree to a uniformly
// chosen gate.  Variables whose name is taken by a gate are skipped; the
// caller keeps the observed top variable out of `variables`.
inline std::optional<FaultTree> be_connect_impl(const FaultTree& ft,
                                                const std::vector<std::string>& variables,
                                                Rng& rng) {
  std::vector<NodeId> pool;
  for (const auto& v : variables)
    if (!ft.is_basic_event(v) && !ft.is_gate(v)) pool.push_back(v);
  if (pool.empty() || ft.gates.empty()) return std::nullopt;

  std::vector<NodeId> gate_ids;
  for (const auto& [id, g] : ft.gates) gate_ids.push_back(id);

  const NodeId be = pool[rng.index(pool.size())];
  FaultTree out = ft;
  Gate& g = out.gates.at(gate_ids[rng.index(gate_ids.size())]);
  g.add_input(be);
  clamp_cardinality(g);
  out.basic_events.insert(be);
  return out;
}

// Moves a basic event from one parent gate to a gate that lacks it.
inline std::optional<FaultTree> be_swap_impl(const FaultTree& ft, const SkeletonView* sk,
                                             Rng& rng) {
  std::vector<NodeId> pool;
  for (const auto& be : ft.basic_events)
    if (!sk || !sk->is_basic_event(be)) pool.push_back(be);
  if (pool.empty()) return std::nullopt;

  const NodeId be = pool[rng.index(pool.size())];
  const std::vector<NodeId> parents = ft.parents_of(be);
  if (parents.empty()) return std::nullopt;
  const NodeId from = parents[rng.index(parents.size())];

  std::vector<NodeId> dests;
  for (const auto& [id, g] : ft.gates)
    if (id != from && !g.has_input(be)) dests.push_back(id);
  if (dests.empty()) return std::nullopt;
  const NodeId to = dests[rng.index(dests.size())];

  FaultTree out = ft;
  Gate& src = out.gates.at(from);
  src.remove_input(be);
  clamp_cardinality(src);
  Gate& dst = out.gates.at(to);
  dst.add_input(be);
  clamp_cardinality(dst);
  return out;
}

// ---------------------------------------------------------------------------
// Crossover

// Copies the subtree of `donor` rooted at `root` into `child`.  Gates get
// fresh names; basic events keep theirs and are shared.  Returns the name
// of the copied root inside `child`.
inline NodeId copy_subtree(FaultTree& child, const FaultTree& donor, const NodeId& root) {
  if (!donor.is_gate(root)) {
    child.basic_events.insert(root);
    auto it = donor.be_probabilities.find(root);
    if (it != donor.be_probabilities.end() && !child.be_probabilities.count(root))
      child.be_probabilities.emplace(root, it->second);
    return root;
  }

  // Discover the donor gates in a stable preorder, then wire up copies.
  std::vector<NodeId> discovered;
  std::map<NodeId, NodeId> rename;
  std::vector<NodeId> stack{root};
  std::set<NodeId> seen{root};
  while (!stack.empty()) {
    NodeId id = std::move(stack.back());
    stack.pop_back();
    discovered.push_back(id);
    const Gate& g = donor.gates.at(id);
    for (auto it = g.inputs.rbegin(); it != g.inputs.rend(); ++it)
      if (donor.is_gate(*it) && seen.insert(*it).second) stack.push_back(*it);
  }
  for (const NodeId& id : discovered) {
    NodeId fresh = child.fresh_gate_id();
    rename.emplace(id, fresh);
    Gate g;
    g.output = fresh;
    child.gates.emplace(std::move(fresh), std::move(g));
  }
  for (const NodeId& id : discovered) {
    const Gate& from = donor.gates.at(id);
    Gate& to = child.gates.at(rename.at(id));
    to.kind = from.kind;
    for (const NodeId& in : from.inputs) {
      if (donor.is_gate(in)) {
        to.add_input(rename.at(in));
      } else {
        to.add_input(in);
        child.basic_events.insert(in);
        auto it = donor.be_probabilities.find(in);
        if (it != donor.be_probabilities.end() && !child.be_probabilities.count(in))
          child.be_probabilities.emplace(in, it->second);
      }
    }
  }
  return rename.at(root);
}

// Replaces the edge parent->old_child of `base` by a copy of the donor
// subtree rooted at donor_root, then prunes whatever became unreachable.
inline FaultTree splice(const FaultTree& base, const NodeId& parent, const NodeId& old_child,
                        const FaultTree& donor, const NodeId& donor_root) {
  FaultTree child = base;
  child.gates.at(parent).remove_input(old_child);
  const NodeId new_root = copy_subtree(child, donor, donor_root);
  Gate& p = child.gates.at(parent);
  p.add_input(new_root);
  clamp_cardinality(p);
  prune_unreachable(child);
  return child;
}

// Non-top nodes eligible as crossover points, in a stable order.
inline std::vector<NodeId> swap_points(const FaultTree& ft, const SkeletonView* sk) {
  std::vector<NodeId> out;
  for (const auto& [id, g] : ft.gates)
    if (id != ft.top && (!sk || !sk->is_gate(id))) out.push_back(id);
  for (const auto& be : ft.basic_events)
    if (!sk || !sk->is_basic_event(be)) out.push_back(be);
  return out;
}

// Exchanges two uniformly chosen subtrees between two parents.  Returns up
// to two children; with a restriction view, children that no longer embed
// the fixed subgraph are dropped.
inline std::vector<FaultTree> crossover_impl(const FaultTree& a, const FaultTree& b,
                                             const SkeletonView* sk, Rng& rng) {
  const std::vector<NodeId> pool_a = swap_points(a, sk);
  const std::vector<NodeId> pool_b = swap_points(b, sk);
  if (pool_a.empty() || pool_b.empty()) return {};

  const NodeId n1 = pool_a[rng.index(pool_a.size())];
  const std::vector<NodeId> parents1 = a.parents_of(n1);
  if (parents1.empty()) return {};
  const NodeId p1 = parents1[rng.index(parents1.size())];

  const NodeId n2 = pool_b[rng.index(pool_b.size())];
  const std::vector<NodeId> parents2 = b.parents_of(n2);
  if (parents2.empty()) return {};
  const NodeId p2 = parents2[rng.index(parents2.size())];

  std::vector<FaultTree> children;
  children.push_back(splice(a, p1, n1, b, n2));
  children.push_back(splice(b, p2, n2, a, n1));
  if (sk) {
    std::vector<FaultTree> kept;
    for (auto& c : children)
      if (contains_subgraph(c, *sk->ft)) kept.push_back(std::move(c));
    return kept;
  }
  return children;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unrestricted operators

inline std::optional<FaultTree> g_create(const FaultTree& ft, Rng& rng,
                                         bool allow_at_least = false) {
  return detail::g_create_impl(ft, nullptr, rng, allow_at_least);
}

inline std::optional<FaultTree> g_mutate(const FaultTree& ft, Rng& rng,
                                         bool allow_at_least = false) {
  return detail::g_mutate_impl(ft, nullptr, rng, allow_at_least);
}

inline std::optional<FaultTree> k_n_change(const FaultTree& ft, Rng& rng) {
  return detail::k_n_change_impl(ft, nullptr, rng);
}

inline std::optional<FaultTree> g_delete(const FaultTree& ft, Rng& rng) {
  return detail::g_delete_impl(ft, nullptr, rng);
}

inline std::optional<FaultTree> be_disconnect(const FaultTree& ft, Rng& rng) {
  return detail::be_disconnect_impl(ft, nullptr, rng);
}

inline std::optional<FaultTree> be_connect(const FaultTree& ft,
                                           const std::vector<std::string>& variables, Rng& rng) {
  return detail::be_connect_impl(ft, variables, rng);
}

inline std::optional<FaultTree> be_swap(const FaultTree& ft, Rng& rng) {
  return detail::be_swap_impl(ft, nullptr, rng);
}

inline std::vector<FaultTree> crossover(const FaultTree& a, const FaultTree& b, Rng& rng) {
  return detail::crossover_impl(a, b, nullptr, rng);
}

}  // namespace ftevolve
