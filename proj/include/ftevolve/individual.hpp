#pragma once

#include <string>

#include "ftevolve/fault_tree.hpp"

namespace ftevolve {

// Which move produced an individual.  Seeds come from population setup.
enum class Origin {
  Seed,
  GCreate,
  GMutate,
  KnChange,
  GDelete,
  BeDisconnect,
  BeConnect,
  BeSwap,
  Crossover
};

inline const char* origin_name(Origin o) {
  switch (o) {
    case Origin::Seed: return "seed";
    case Origin::GCreate: return "g-create";
    case Origin::GMutate: return "g-mutate";
    case Origin::KnChange: return "k-n-change";
    case Origin::GDelete: return "g-delete";
    case Origin::BeDisconnect: return "be-disconnect";
    case Origin::BeConnect: return "be-connect";
    case Origin::BeSwap: return "be-swap";
    default: return "crossover";
  }
}

inline const Origin kAllOrigins[] = {
    Origin::Seed,      Origin::GCreate,      Origin::GMutate,
    Origin::KnChange,  Origin::GDelete,      Origin::BeDisconnect,
    Origin::BeConnect, Origin::BeSwap,       Origin::Crossover};

struct Individual {
  FaultTree ft;
  double fitness = 0.0;
  int birth_iteration = 0;
  Origin origin = Origin::Seed;
};

}  // namespace ftevolve
