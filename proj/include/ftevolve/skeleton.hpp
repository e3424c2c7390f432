#pragma once

// Expert-guided search: a skeleton is a partial fault tree that every
// individual must embed exactly (same top, same gate kinds, every listed
// edge and basic event present).  Search starts from the skeleton alone and
// uses restricted operators that never touch the fixed parts; new structure
// may only grow around them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftevolve/engine.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"
#include "ftevolve/individual.hpp"
#include "ftevolve/operators.hpp"
#include "ftevolve/rng.hpp"

namespace ftevolve {

struct Skeleton {
  FaultTree ft;

  explicit Skeleton(FaultTree f) : ft(std::move(f)) {
    const std::vector<Violation> vs = validate(ft);
    if (!vs.empty())
      throw input_error("skeleton is not a valid fault tree: " + vs.front().message);
  }

  detail::SkeletonView view() const { return {&ft}; }
};

// True when ft embeds the skeleton exactly.  Gates of the skeleton may have
// grown extra children in ft; everything listed must still be there.
inline bool contains_skeleton(const FaultTree& ft, const Skeleton& s) {
  return detail::contains_subgraph(ft, s.ft);
}

// ---------------------------------------------------------------------------
// Restricted operators.  Same moves as the unrestricted versions, with the
// skeleton's gates, edges, and basic events removed from the candidate
// pools.  be_connect needs no restriction: attaching a new variable to any
// gate, a skeleton gate included, never breaks the embedding.

inline std::optional<FaultTree> g_create_o(const FaultTree& ft, const Skeleton& s, Rng& rng,
                                           bool allow_at_least = false) {
  const detail::SkeletonView v = s.view();
  return detail::g_create_impl(ft, &v, rng, allow_at_least);
}

inline std::optional<FaultTree> g_mutate_o(const FaultTree& ft, const Skeleton& s, Rng& rng,
                                           bool allow_at_least = false) {
  const detail::SkeletonView v = s.view();
  return detail::g_mutate_impl(ft, &v, rng, allow_at_least);
}

inline std::optional<FaultTree> k_n_change_o(const FaultTree& ft, const Skeleton& s, Rng& rng) {
  const detail::SkeletonView v = s.view();
  return detail::k_n_change_impl(ft, &v, rng);
}

inline std::optional<FaultTree> g_delete_o(const FaultTree& ft, const Skeleton& s, Rng& rng) {
  const detail::SkeletonView v = s.view();
  return detail::g_delete_impl(ft, &v, rng);
}

inline std::optional<FaultTree> be_disconnect_o(const FaultTree& ft, const Skeleton& s,
                                                Rng& rng) {
  const detail::SkeletonView v = s.view();
  return detail::be_disconnect_impl(ft, &v, rng);
}

inline std::optional<FaultTree> be_swap_o(const FaultTree& ft, const Skeleton& s, Rng& rng) {
  const detail::SkeletonView v = s.view();
  return detail::be_swap_impl(ft, &v, rng);
}

// Children that lost the skeleton in the exchange are dropped, so the
// result may hold zero, one, or two trees.
inline std::vector<FaultTree> crossover_o(const FaultTree& a, const FaultTree& b,
                                          const Skeleton& s, Rng& rng) {
  const detail::SkeletonView v = s.view();
  return detail::crossover_impl(a, b, &v, rng);
}

// ---------------------------------------------------------------------------

// The skeleton itself is the whole starting population.  Checks that it
// fits the variable list: its top is a variable, its basic events are
// non-top variables, and no other gate name shadows a variable.
inline std::vector<Individual> seed_population_o(const Skeleton& s,
                                                 const std::vector<std::string>& variables) {
  bool saw_top = false;
  for (const auto& v : variables) {
    if (v == s.ft.top) {
      saw_top = true;
      continue;
    }
    if (s.ft.is_gate(v))
      throw input_error("skeleton gate '" + v + "' shadows a dataset variable");
  }
  if (!saw_top)
    throw input_error("skeleton top '" + s.ft.top + "' is not a dataset variable");
  for (const auto& be : s.ft.basic_events) {
    if (be == s.ft.top) throw input_error("skeleton uses the top variable as a basic event");
    bool found = false;
    for (const auto& v : variables) found = found || v == be;
    if (!found)
      throw input_error("skeleton basic event '" + be + "' is not a dataset variable");
  }
  return {{s.ft, 0.0, 0, Origin::Seed}};
}

// Like run(), but every individual keeps the skeleton embedded.
inline RunResult run_partial(const Dataset& train, const Skeleton& skeleton,
                             const EaConfig& cfg) {
  if (skeleton.ft.top != train.top_variable)
    throw input_error("skeleton top '" + skeleton.ft.top + "' does not match top variable '" +
                      train.top_variable + "'");

  auto shared = std::make_shared<const Skeleton>(skeleton);
  std::vector<std::string> connectable;
  for (const auto& v : train.variables)
    if (v != train.top_variable) connectable.push_back(v);

  detail::OperatorSet ops;
  const bool kn = cfg.at_least_gates;
  ops.unary.push_back({Origin::GCreate, [shared, kn](const FaultTree& ft, Rng& rng) {
                         return g_create_o(ft, *shared, rng, kn);
                       }});
  ops.unary.push_back({Origin::GMutate, [shared, kn](const FaultTree& ft, Rng& rng) {
                         return g_mutate_o(ft, *shared, rng, kn);
                       }});
  if (kn)
    ops.unary.push_back({Origin::KnChange, [shared](const FaultTree& ft, Rng& rng) {
                           return k_n_change_o(ft, *shared, rng);
                         }});
  ops.unary.push_back({Origin::GDelete, [shared](const FaultTree& ft, Rng& rng) {
                         return g_delete_o(ft, *shared, rng);
                       }});
  ops.unary.push_back({Origin::BeDisconnect, [shared](const FaultTree& ft, Rng& rng) {
                         return be_disconnect_o(ft, *shared, rng);
                       }});
  ops.unary.push_back({Origin::BeConnect,
                       [vars = std::move(connectable)](const FaultTree& ft, Rng& rng) {
                         return be_connect(ft, vars, rng);
                       }});
  ops.unary.push_back({Origin::BeSwap, [shared](const FaultTree& ft, Rng& rng) {
                         return be_swap_o(ft, *shared, rng);
                       }});
  ops.cross = [shared](const FaultTree& a, const FaultTree& b, Rng& rng) {
    return crossover_o(a, b, *shared, rng);
  };

  return detail::run_impl(train, cfg, seed_population_o(skeleton, train.variables), ops);
}

}  // namespace ftevolve
