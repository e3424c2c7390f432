#pragma once

// Random ground-truth trees and synthetic observation data for benchmarks.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ftevolve/dataset.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"
#include "ftevolve/rng.hpp"

namespace ftevolve {

struct GenSpec {
  int num_bes = 6;
  int num_gates = 3;
  std::vector<GateOp> kinds{GateOp::And, GateOp::Or};  // drawn uniformly per gate
  double be_prob_lo = 0.1;  // basic event probabilities drawn from [lo, hi]
  double be_prob_hi = 0.9;
  std::uint64_t seed = 1;
};

// Samples a valid tree with exactly num_gates gates ("T", "G1", ...) and
// num_bes basic events ("B1", ...), every gate with at least two inputs.
// Gate i hangs under a uniform earlier gate; basic events land on uniform
// gates.  Under-full gates are repaired by pulling basic events from gates
// with spares, or, when none has any, by re-attaching an existing basic
// event as a second parent edge.
inline FaultTree generate_ft(const GenSpec& spec) {
  if (spec.num_gates < 1) throw input_error("need at least one gate");
  if (spec.num_bes < 2) throw input_error("need at least two basic events");
  if (spec.num_bes < spec.num_gates + 1)
    throw input_error("too many gates: " + std::to_string(spec.num_gates) + " gates need at least " +
                      std::to_string(spec.num_gates + 1) + " basic events");
  if (spec.kinds.empty()) throw input_error("no gate kinds to draw from");
  if (!(spec.be_prob_lo > 0.0 && spec.be_prob_hi < 1.0 && spec.be_prob_lo <= spec.be_prob_hi))
    throw input_error("probability range must satisfy 0 < lo <= hi < 1");

  Rng rng(spec.seed);
  FaultTree ft;
  ft.top = "T";
  std::vector<NodeId> gate_ids{"T"};
  for (int i = 1; i < spec.num_gates; ++i) gate_ids.push_back("G" + std::to_string(i));
  for (const NodeId& id : gate_ids) {
    Gate g;
    g.output = id;
    g.kind = GateKind::or_gate();  // kinds drawn after the structure settles
    ft.gates.emplace(id, std::move(g));
  }
  for (std::size_t i = 1; i < gate_ids.size(); ++i)
    ft.gates.at(gate_ids[rng.index(i)]).add_input(gate_ids[i]);

  std::vector<NodeId> be_ids;
  for (int i = 1; i <= spec.num_bes; ++i) be_ids.push_back("B" + std::to_string(i));
  for (const NodeId& be : be_ids) {
    ft.basic_events.insert(be);
    ft.gates.at(gate_ids[rng.index(gate_ids.size())]).add_input(be);
  }

  // Arity repair: every gate needs two inputs.
  auto be_children = [&ft](const Gate& g) {
    std::vector<NodeId> out;
    for (const auto& in : g.inputs)
      if (ft.is_basic_event(in)) out.push_back(in);
    return out;
  };
  while (true) {
    std::vector<NodeId> needy;
    for (const NodeId& id : gate_ids)
      if (ft.gates.at(id).inputs.size() < 2) needy.push_back(id);
    if (needy.empty()) break;
    Gate& sink = ft.gates.at(needy[rng.index(needy.size())]);

    std::vector<NodeId> donors;
    for (const NodeId& id : gate_ids) {
      const Gate& g = ft.gates.at(id);
      if (id != sink.output && g.inputs.size() > 2 && !be_children(g).empty())
        donors.push_back(id);
    }
    if (!donors.empty()) {
      Gate& donor = ft.gates.at(donors[rng.index(donors.size())]);
      const std::vector<NodeId> movable = be_children(donor);
      const NodeId be = movable[rng.index(movable.size())];
      donor.remove_input(be);
      sink.add_input(be);
    } else {
      // No gate can spare a basic event: reuse one under a second parent.
      std::vector<NodeId> candidates;
      for (const NodeId& be : be_ids)
        if (!sink.has_input(be)) candidates.push_back(be);
      sink.add_input(candidates[rng.index(candidates.size())]);
    }
  }

  // Kinds, then probabilities, both in fixed id order.
  for (const NodeId& id : gate_ids) {
    Gate& g = ft.gates.at(id);
    g.kind.op = spec.kinds[rng.index(spec.kinds.size())];
    if (g.kind.op == GateOp::AtLeast) {
      const int hi = static_cast<int>(g.inputs.size()) - 1;
      g.kind.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi)));
    }
  }
  for (const NodeId& be : be_ids)
    ft.be_probabilities[be] = rng.real(spec.be_prob_lo, spec.be_prob_hi);

  return ft;
}

// Draws num_records independent observations: each basic event fails with
// its probability, the top value is computed from the tree.  Requires a
// probability for every basic event.
inline Dataset sample_dataset(const FaultTree& ft, std::int64_t num_records,
                              std::uint64_t seed) {
  if (num_records < 1) throw input_error("need at least one record");
  if (ft.is_basic_event(ft.top))
    throw input_error("top '" + ft.top + "' is also a basic event");
  std::vector<NodeId> bes(ft.basic_events.begin(), ft.basic_events.end());
  if (bes.empty()) throw input_error("tree has no basic events");
  std::vector<double> probs;
  for (const NodeId& be : bes) {
    auto it = ft.be_probabilities.find(be);
    if (it == ft.be_probabilities.end())
      throw input_error("no probability for basic event '" + be + "'");
    probs.push_back(it->second);
  }

  Rng rng(seed);
  detail::CompiledTree eval(ft, detail::index_basic_events(ft));
  std::map<std::vector<std::uint8_t>, std::int64_t> merged;
  std::vector<std::uint8_t> row(bes.size() + 1);
  for (std::int64_t r = 0; r < num_records; ++r) {
    for (std::size_t i = 0; i < bes.size(); ++i) row[i] = rng.chance(probs[i]) ? 1 : 0;
    row.back() = eval.eval(row.data()) ? 1 : 0;
    merged[row] += 1;
  }

  Dataset d;
  d.variables = bes;
  d.variables.push_back(ft.top);
  d.top_variable = ft.top;
  for (auto& [values, count] : merged) d.records.push_back({values, count});
  return d;
}

}  // namespace ftevolve
