#pragma once

// Survivor selection.  All strategies draw only from the given pool and
// keep exactly target_size individuals (with replacement where noted).

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ftevolve/errors.hpp"
#include "ftevolve/individual.hpp"
#include "ftevolve/rng.hpp"

namespace ftevolve {

enum class SelectionStrategy { Elitist, Roulette, Sus, Tournament, Random };

inline const char* strategy_name(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::Elitist: return "elitist";
    case SelectionStrategy::Roulette: return "roulette";
    case SelectionStrategy::Sus: return "sus";
    case SelectionStrategy::Tournament: return "tournament";
    default: return "random";
  }
}

inline SelectionStrategy strategy_from_name(const std::string& name) {
  for (SelectionStrategy s : {SelectionStrategy::Elitist, SelectionStrategy::Roulette,
                              SelectionStrategy::Sus, SelectionStrategy::Tournament,
                              SelectionStrategy::Random})
    if (name == strategy_name(s)) return s;
  throw input_error("unknown selection strategy '" + name + "'");
}

namespace detail {

// Ranking used by elitist selection and tournament winners: higher fitness
// first, then fewer gates, fewer edges, earlier birth, earlier pool slot.
// The structural tie-breaks prefer smaller equivalent trees.
struct RankKey {
  double fitness;
  std::size_t gates;
  std::size_t edges;
  int birth;
  std::size_t slot;

  static RankKey of(const Individual& ind, std::size_t slot) {
    return {ind.fitness, ind.ft.gate_count(), ind.ft.edge_count(), ind.birth_iteration, slot};
  }

  bool precedes(const RankKey& o) const {
    if (fitness != o.fitness) return fitness > o.fitness;
    if (gates != o.gates) return gates < o.gates;
    if (edges != o.edges) return edges < o.edges;
    if (birth != o.birth) return birth < o.birth;
    return slot < o.slot;
  }
};

// Index picks proportional to fitness for roulette / stochastic universal
// sampling.  A pool whose fitness sums to zero falls back to uniform picks.
inline std::vector<std::size_t> proportional_picks(const std::vector<Individual>& pool,
                                                   std::size_t n, Rng& rng, bool universal) {
  double total = 0.0;
  for (const auto& ind : pool) total += ind.fitness;
  std::vector<std::size_t> picks;
  picks.reserve(n);
  if (total <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(rng.index(pool.size()));
    return picks;
  }
  if (universal) {
    // One spin, n equally spaced pointers.
    const double step = total / static_cast<double>(n);
    double point = rng.real01() * step;
    double cum = 0.0;
    std::size_t i = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const double target = point + step * static_cast<double>(p);
      while (i + 1 < pool.size() && cum + pool[i].fitness <= target) cum += pool[i++].fitness;
      picks.push_back(i);
    }
    return picks;
  }
  for (std::size_t p = 0; p < n; ++p) {
    const double target = rng.real01() * total;
    double cum = 0.0;
    std::size_t i = 0;
    while (i + 1 < pool.size() && cum + pool[i].fitness <= target) cum += pool[i++].fitness;
    picks.push_back(i);
  }
  return picks;
}

}  // namespace detail

// Keeps target_size survivors from pool.  Elitist picks the distinct best
// slots; the stochastic strategies sample with replacement.
inline std::vector<Individual> select(const std::vector<Individual>& pool,
                                      std::size_t target_size, SelectionStrategy strategy,
                                      Rng& rng, int tournament_size = 3) {
  if (pool.empty()) throw input_error("selection from an empty pool");
  if (target_size == 0) throw input_error("selection target must be positive");
  target_size = std::min(target_size, pool.size());

  std::vector<Individual> out;
  out.reserve(target_size);

  switch (strategy) {
    case SelectionStrategy::Elitist: {
      std::vector<std::size_t> idx(pool.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::vector<detail::RankKey> keys;
      keys.reserve(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i)
        keys.push_back(detail::RankKey::of(pool[i], i));
      std::sort(idx.begin(), idx.end(),
                [&keys](std::size_t a, std::size_t b) { return keys[a].precedes(keys[b]); });
      for (std::size_t i = 0; i < target_size; ++i) out.push_back(pool[idx[i]]);
      return out;
    }
    case SelectionStrategy::Roulette:
    case SelectionStrategy::Sus: {
      const bool universal = strategy == SelectionStrategy::Sus;
      for (std::size_t i : detail::proportional_picks(pool, target_size, rng, universal))
        out.push_back(pool[i]);
      return out;
    }
    case SelectionStrategy::Tournament: {
      if (tournament_size < 1) throw input_error("tournament size must be positive");
      for (std::size_t p = 0; p < target_size; ++p) {
        std::size_t best = rng.index(pool.size());
        detail::RankKey best_key = detail::RankKey::of(pool[best], best);
        for (int t = 1; t < tournament_size; ++t) {
          const std::size_t i = rng.index(pool.size());
          detail::RankKey key = detail::RankKey::of(pool[i], i);
          if (key.precedes(best_key)) {
            best = i;
            best_key = key;
          }
        }
        out.push_back(pool[best]);
      }
      return out;
    }
    default: {
      for (std::size_t p = 0; p < target_size; ++p) out.push_back(pool[rng.index(pool.size())]);
      return out;
    }
  }
}

}  // namespace ftevolve
