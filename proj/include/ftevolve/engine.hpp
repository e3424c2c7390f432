#pragma once

// Evolutionary search for a fault tree that explains a labeled dataset.
// Two seed trees (AND over all variables, OR over all variables) evolve
// under the structural operators; fitness is the count-weighted accuracy
// against the training records.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftevolve/dataset.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/eval_context.hpp"
#include "ftevolve/fault_tree.hpp"
#include "ftevolve/individual.hpp"
#include "ftevolve/normal_form.hpp"
#include "ftevolve/operators.hpp"
#include "ftevolve/rng.hpp"
#include "ftevolve/selection.hpp"

namespace ftevolve {

struct EaConfig {
  int population_size = 100;
  double operator_probability = 0.9;  // per individual and per pair, each iteration
  int max_iterations = 100;
  int convergence_window = 10;  // stop after this many iterations without a better best
  double target_fitness = 1.0;
  SelectionStrategy selection = SelectionStrategy::Elitist;
  int tournament_size = 3;
  int max_gates = 0;  // offspring cap; 0 means 4 * number of dataset variables
  bool at_least_gates = false;
  std::uint64_t seed = 1;
  bool record_individuals = false;  // keep every iteration's population in the trace
};

inline void check_config(const EaConfig& cfg) {
  if (cfg.population_size < 1) throw input_error("population_size must be positive");
  if (!(cfg.operator_probability >= 0.0 && cfg.operator_probability <= 1.0))
    throw input_error("operator_probability must lie in [0,1]");
  if (cfg.max_iterations < 0) throw input_error("max_iterations must be non-negative");
  if (cfg.convergence_window < 1) throw input_error("convergence_window must be positive");
  if (cfg.tournament_size < 1) throw input_error("tournament_size must be positive");
  if (cfg.max_gates < 0) throw input_error("max_gates must be non-negative");
}

struct IterationStats {
  int iteration = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  int population_size = 0;
  std::map<Origin, int> survivor_counts;  // every origin present, zero-filled
  std::vector<Origin> selected_origins;   // origin of each survivor, population order
  std::vector<Individual> individuals;    // filled only when record_individuals is set
};

enum class Termination { TargetReached, Converged, MaxIterations };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::TargetReached: return "target-reached";
    case Termination::Converged: return "converged";
    default: return "max-iterations";
  }
}

inline Termination termination_from_name(const std::string& name) {
  for (Termination t :
       {Termination::TargetReached, Termination::Converged, Termination::MaxIterations})
    if (name == termination_name(t)) return t;
  throw input_error("unknown termination reason '" + name + "'");
}

struct RunTrace {
  std::vector<IterationStats> iterations;  // index 0 describes the seeded population
  Termination termination = Termination::MaxIterations;
  int iterations_run = 0;
  double wall_seconds = 0.0;  // measured, not covered by determinism guarantees
};

struct RunResult {
  Individual best;
  FaultTree best_cnf;      // two-level reduction of best.ft when cnf_reduced
  bool cnf_reduced = false;  // false: reduction hit a capacity limit, best_cnf copies best.ft
  RunTrace trace;
};

// The two starting trees over the non-top variables: AND of all, OR of all.
inline std::vector<Individual> seed_population(const std::vector<std::string>& variables,
                                               const std::string& top_variable) {
  bool saw_top = false;
  std::vector<NodeId> bes;
  for (const auto& v : variables) {
    if (v == top_variable)
      saw_top = true;
    else
      bes.push_back(v);
  }
  if (!saw_top) throw input_error("top variable '" + top_variable + "' is not a variable");
  if (bes.empty()) throw input_error("no variables besides the top variable");

  std::vector<Individual> seeds;
  seeds.push_back({single_gate_tree(top_variable, GateKind::and_gate(), bes), 0.0, 0,
                   Origin::Seed});
  seeds.push_back({single_gate_tree(top_variable, GateKind::or_gate(), bes), 0.0, 0,
                   Origin::Seed});
  return seeds;
}

namespace detail {

using UnaryOp = std::function<std::optional<FaultTree>(const FaultTree&, Rng&)>;
using CrossOp = std::function<std::vector<FaultTree>(const FaultTree&, const FaultTree&, Rng&)>;

struct OperatorSet {
  std::vector<std::pair<Origin, UnaryOp>> unary;
  CrossOp cross;
};

inline OperatorSet default_operator_set(std::vector<std::string> connectable,
                                        bool at_least_gates) {
  OperatorSet ops;
  ops.unary.push_back({Origin::GCreate, [at_least_gates](const FaultTree& ft, Rng& rng) {
                         return g_create(ft, rng, at_least_gates);
                       }});
  ops.unary.push_back({Origin::GMutate, [at_least_gates](const FaultTree& ft, Rng& rng) {
                         return g_mutate(ft, rng, at_least_gates);
                       }});
  if (at_least_gates)
    ops.unary.push_back({Origin::KnChange,
                         [](const FaultTree& ft, Rng& rng) { return k_n_change(ft, rng); }});
  ops.unary.push_back(
      {Origin::GDelete, [](const FaultTree& ft, Rng& rng) { return g_delete(ft, rng); }});
  ops.unary.push_back({Origin::BeDisconnect,
                       [](const FaultTree& ft, Rng& rng) { return be_disconnect(ft, rng); }});
  ops.unary.push_back({Origin::BeConnect,
                       [vars = std::move(connectable)](const FaultTree& ft, Rng& rng) {
                         return be_connect(ft, vars, rng);
                       }});
  ops.unary.push_back(
      {Origin::BeSwap, [](const FaultTree& ft, Rng& rng) { return be_swap(ft, rng); }});
  ops.cross = [](const FaultTree& a, const FaultTree& b, Rng& rng) {
    return crossover(a, b, rng);
  };
  return ops;
}

inline IterationStats make_stats(int iteration, const std::vector<Individual>& pop,
                                 bool record_individuals) {
  IterationStats st;
  st.iteration = iteration;
  st.population_size = static_cast<int>(pop.size());
  for (Origin o : kAllOrigins) st.survivor_counts[o] = 0;
  double sum = 0.0;
  for (const auto& ind : pop) {
    st.best_fitness = std::max(st.best_fitness, ind.fitness);
    sum += ind.fitness;
    st.survivor_counts[ind.origin] += 1;
    st.selected_origins.push_back(ind.origin);
  }
  st.mean_fitness = pop.empty() ? 0.0 : sum / static_cast<double>(pop.size());
  if (record_individuals) st.individuals = pop;
  return st;
}

inline const Individual& rank_best(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  RankKey best_key = RankKey::of(pop[0], 0);
  for (std::size_t i = 1; i < pop.size(); ++i) {
    RankKey key = RankKey::of(pop[i], i);
    if (key.precedes(best_key)) {
      best = i;
      best_key = key;
    }
  }
  return pop[best];
}

inline RunResult run_impl(const Dataset& train, const EaConfig& cfg,
                          std::vector<Individual> population, const OperatorSet& ops) {
  check_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const EvalContext ctx(train);
  Rng rng(cfg.seed);
  const std::size_t max_gates = cfg.max_gates > 0
                                    ? static_cast<std::size_t>(cfg.max_gates)
                                    : 4 * train.variables.size();

  RunResult result;
  RunTrace& trace = result.trace;

  for (auto& ind : population) ind.fitness = ctx.fitness(ind.ft);
  trace.iterations.push_back(make_stats(0, population, cfg.record_individuals));

  double best_so_far = trace.iterations.back().best_fitness;
  int stall = 0;
  trace.termination = Termination::MaxIterations;
  trace.iterations_run = 0;

  if (best_so_far >= cfg.target_fitness) {
    trace.termination = Termination::TargetReached;
  } else {
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
      // Operators fire in a fresh random order each iteration; slot
      // ops.unary.size() stands for crossover.
      std::vector<std::size_t> op_order(ops.unary.size() + 1);
      for (std::size_t i = 0; i < op_order.size(); ++i) op_order[i] = i;
      rng.shuffle(op_order);

      std::vector<Individual> offspring;
      for (std::size_t slot : op_order) {
        if (slot < ops.unary.size()) {
          const auto& [origin, op] = ops.unary[slot];
          for (const auto& parent : population) {
            if (!rng.chance(cfg.operator_probability)) continue;
            if (auto child = op(parent.ft, rng); child && child->gate_count() <= max_gates)
              offspring.push_back({std::move(*child), 0.0, iter, origin});
          }
        } else {
          // Random perfect matching over the current population.
          std::vector<std::size_t> perm(population.size());
          for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
          rng.shuffle(perm);
          for (std::size_t j = 0; j + 1 < perm.size(); j += 2) {
            if (!rng.chance(cfg.operator_probability)) continue;
            for (auto& child :
                 ops.cross(population[perm[j]].ft, population[perm[j + 1]].ft, rng))
              if (child.gate_count() <= max_gates)
                offspring.push_back({std::move(child), 0.0, iter, Origin::Crossover});
          }
        }
      }

      for (auto& ind : offspring) ind.fitness = ctx.fitness(ind.ft);

      std::vector<Individual> pool = population;
      pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                  std::make_move_iterator(offspring.end()));
      const std::size_t keep = std::min<std::size_t>(cfg.population_size, pool.size());
      population = select(pool, keep, cfg.selection, rng, cfg.tournament_size);

      trace.iterations.push_back(make_stats(iter, population, cfg.record_individuals));
      trace.iterations_run = iter;

      const double best = trace.iterations.back().best_fitness;
      if (best > best_so_far) {
        best_so_far = best;
        stall = 0;
      } else {
        ++stall;
      }

      if (best_so_far >= cfg.target_fitness) {
        trace.termination = Termination::TargetReached;
        break;
      }
      if (stall >= cfg.convergence_window) {
        trace.termination = Termination::Converged;
        break;
      }
    }
  }

  result.best = rank_best(population);
  try {
    result.best_cnf = from_normal_form(to_normal_form(result.best.ft, NfForm::Cnf),
                                       result.best.ft.top);
    result.cnf_reduced = true;
  } catch (const capacity_error&) {
    result.best_cnf = result.best.ft;
  } catch (const input_error&) {
    result.best_cnf = result.best.ft;
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace detail

// Learns a fault tree for train's top variable.  The returned trace holds
// one row per iteration, row 0 describing the seeded population.
inline RunResult run(const Dataset& train, const EaConfig& cfg) {
  std::vector<std::string> connectable;
  for (const auto& v : train.variables)
    if (v != train.top_variable) connectable.push_back(v);
  return detail::run_impl(train, cfg,
                          seed_population(train.variables, train.top_variable),
                          detail::default_operator_set(std::move(connectable),
                                                       cfg.at_least_gates));
}

// Survivor counts per origin and iteration, recounted from the trace.
inline std::map<Origin, std::vector<int>> operator_survival_stats(const RunTrace& trace) {
  std::map<Origin, std::vector<int>> table;
  for (Origin o : kAllOrigins) table[o].assign(trace.iterations.size(), 0);
  for (std::size_t i = 0; i < trace.iterations.size(); ++i)
    for (Origin o : trace.iterations[i].selected_origins) table[o][i] += 1;
  return table;
}

}  // namespace ftevolve
