#pragma once

// Negation-free normal forms for fault trees.  Monotone formulas need no
// negative literals, so a normal form is just a set of clauses, each clause
// a set of basic events.  DNF reads OR-of-ANDs, CNF reads AND-of-ORs.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"

namespace ftevolve {

enum class NfForm { Cnf, Dnf };

struct NormalForm {
  NfForm form = NfForm::Dnf;
  std::set<std::set<NodeId>> clauses;

  friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

namespace detail {

using Clause = std::set<NodeId>;
using ClauseSet = std::set<Clause>;

inline bool subset_of(const Clause& a, const Clause& b) {
  return a.size() <= b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Removes every clause that strictly contains another clause of the set.
// For monotone formulas this preserves meaning in both DNF and CNF.
inline void absorb(ClauseSet& cs) {
  std::vector<const Clause*> by_size;
  by_size.reserve(cs.size());
  for (const Clause& c : cs) by_size.push_back(&c);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](const Clause* a, const Clause* b) { return a->size() < b->size(); });
  std::vector<const Clause*> kept;
  std::set<const Clause*> dead;
  for (const Clause* c : by_size) {
    bool absorbed = false;
    for (const Clause* k : kept)
      if (subset_of(*k, *c)) { absorbed = true; break; }
    if (absorbed)
      dead.insert(c);
    else
      kept.push_back(c);
  }
  for (auto it = cs.begin(); it != cs.end();)
    it = dead.count(&*it) ? cs.erase(it) : std::next(it);
}

inline void check_clause_budget(std::size_t n, std::size_t limit) {
  if (n > limit)
    throw capacity_error("normal form exceeds " + std::to_string(limit) + " clauses");
}

// Clause-set union; the easy direction (OR in DNF, AND in CNF).
inline ClauseSet combine_union(const ClauseSet& a, const ClauseSet& b, std::size_t limit) {
  ClauseSet out = a;
  out.insert(b.begin(), b.end());
  check_clause_budget(out.size(), limit);
  absorb(out);
  return out;
}

// Pairwise clause merge; the distributing direction (AND in DNF, OR in CNF).
inline ClauseSet combine_product(const ClauseSet& a, const ClauseSet& b, std::size_t limit) {
  ClauseSet out;
  for (const Clause& x : a) {
    for (const Clause& y : b) {
      Clause c = x;
      c.insert(y.begin(), y.end());
      out.insert(std::move(c));
      check_clause_budget(out.size(), limit);
    }
  }
  absorb(out);
  return out;
}

}  // namespace detail

// Converts a fault tree into the requested normal form.  At-least gates are
// expanded first.  Throws capacity_error when any intermediate clause set
// grows beyond clause_limit.
inline NormalForm to_normal_form(const FaultTree& ft, NfForm form,
                                 std::size_t clause_limit = 100000) {
  using detail::ClauseSet;
  FaultTree flat = expand_at_least(ft);

  NormalForm out;
  out.form = form;
  std::map<NodeId, ClauseSet> sets;
  const ClauseSet false_set =
      form == NfForm::Dnf ? ClauseSet{} : ClauseSet{detail::Clause{}};

  for (const NodeId& id : topological_order(flat)) {
    const Gate& g = flat.gates.at(id);
    // union_like: the gate connective that matches the clause-level
    // connective of the requested form, so clauses just accumulate.
    const bool union_like = (g.kind.op == GateOp::Or) == (form == NfForm::Dnf);
    ClauseSet acc;
    if (g.inputs.empty()) {
      acc = false_set;
    } else {
      bool first = true;
      for (const NodeId& in : g.inputs) {
        ClauseSet child = flat.is_gate(in) ? sets.at(in) : ClauseSet{{in}};
        if (first) {
          acc = std::move(child);
          first = false;
        } else if (union_like) {
          acc = detail::combine_union(acc, child, clause_limit);
        } else {
          acc = detail::combine_product(acc, child, clause_limit);
        }
      }
    }
    sets[id] = std::move(acc);
  }

  out.clauses = std::move(sets.at(flat.top));
  return out;
}

// Value of a normal form under an assignment. Empty clause sets are the
// neutral constants: DNF false, CNF true.
inline bool evaluate(const NormalForm& nf, const Assignment& assignment) {
  auto lit = [&assignment](const NodeId& v) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw input_error("no value for basic event '" + v + "'");
    return it->second;
  };
  if (nf.form == NfForm::Dnf) {
    for (const auto& clause : nf.clauses) {
      bool all = true;
      for (const auto& v : clause)
        if (!lit(v)) { all = false; break; }
      if (all) return true;
    }
    return false;
  }
  for (const auto& clause : nf.clauses) {
    bool any = false;
    for (const auto& v : clause)
      if (lit(v)) { any = true; break; }
    if (!any) return false;
  }
  return true;
}

// Materializes a normal form as a two-level fault tree named top_name.
// Single-literal clauses connect directly; a lone clause becomes the top
// gate itself.  An empty clause set has no gate to build and is rejected;
// so is a DNF empty clause (constant true is not expressible when an empty
// gate evaluates to false).
inline FaultTree from_normal_form(const NormalForm& nf, const NodeId& top_name) {
  if (nf.clauses.empty()) throw input_error("empty clause set");
  if (nf.form == NfForm::Dnf)
    for (const auto& c : nf.clauses)
      if (c.empty()) throw input_error("empty clause in disjunctive form");

  const GateKind outer = nf.form == NfForm::Cnf ? GateKind::and_gate() : GateKind::or_gate();
  const GateKind inner = nf.form == NfForm::Cnf ? GateKind::or_gate() : GateKind::and_gate();

  FaultTree ft;
  ft.top = top_name;
  for (const auto& clause : nf.clauses) {
    for (const auto& v : clause) {
      if (v == top_name) throw input_error("literal '" + v + "' collides with top name");
      ft.basic_events.insert(v);
    }
  }

  Gate topg;
  topg.output = top_name;
  if (nf.clauses.size() == 1) {
    topg.kind = inner;
    for (const auto& v : *nf.clauses.begin()) topg.add_input(v);
    ft.gates.emplace(top_name, std::move(topg));
    return ft;
  }

  topg.kind = outer;
  ft.gates.emplace(top_name, std::move(topg));
  for (const auto& clause : nf.clauses) {
    if (clause.size() == 1) {
      ft.gates.at(top_name).add_input(*clause.begin());
      continue;
    }
    Gate g;
    g.output = ft.fresh_gate_id();
    g.kind = inner;
    for (const auto& v : clause) g.add_input(v);
    ft.gates.at(top_name).add_input(g.output);
    ft.gates.emplace(g.output, std::move(g));
  }
  return ft;
}

// One clause per line, literals space-separated, in canonical set order.
inline std::string to_text(const NormalForm& nf) {
  std::string out;
  for (const auto& clause : nf.clauses) {
    bool first = true;
    for (const auto& v : clause) {
      if (!first) out += ' ';
      out += v;
      first = false;
    }
    out += '\n';
  }
  return out;
}

// Truth-table equivalence over the union of both basic event sets.  A basic
// event missing from one tree is a free variable there.  Capped at 24
// variables.
inline bool equivalent(const FaultTree& a, const FaultTree& b) {
  std::set<NodeId> vars_set = a.basic_events;
  vars_set.insert(b.basic_events.begin(), b.basic_events.end());
  if (vars_set.size() > 24)
    throw capacity_error("equivalence check over " + std::to_string(vars_set.size()) +
                         " variables exceeds the 24-variable cap");
  std::map<NodeId, int> idx;
  int n = 0;
  for (const auto& v : vars_set) idx[v] = n++;

  detail::CompiledTree ca(a, idx);
  detail::CompiledTree cb(b, idx);
  std::vector<std::uint8_t> vals(std::max(n, 1), 0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (int i = 0; i < n; ++i) vals[i] = (mask >> i) & 1;
    if (ca.eval(vals.data()) != cb.eval(vals.data())) return false;
  }
  return true;
}

}  // namespace ftevolve
