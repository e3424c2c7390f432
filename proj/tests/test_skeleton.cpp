#include <catch2/catch_amalgamated.hpp>

#include "ftevolve/skeleton.hpp"
#include "ftevolve/trace_io.hpp"
#include "helpers.hpp"

using namespace ftevolve;
using Catch::Matchers::WithinAbs;

namespace {

// The fixed part used throughout: the lamp tree's known and-branch.
FaultTree lamp_skeleton_tree() {
  FaultTree ft;
  ft.top = "T";
  ft.gates["T"] = Gate{"T", GateKind::or_gate(), {"G2"}};
  ft.gates["G2"] = Gate{"G2", GateKind::and_gate(), {"LB1", "LB2"}};
  ft.basic_events = {"LB1", "LB2"};
  return ft;
}

// A skeleton that pins nothing but the top gate's name and kind.
Skeleton top_only_skeleton(GateKind kind = GateKind::or_gate()) {
  FaultTree ft;
  ft.top = "T";
  ft.gates["T"] = Gate{"T", kind, {}};
  return Skeleton(std::move(ft));
}

}  // namespace

TEST_CASE("a skeleton must itself be a valid fault tree") {
  CHECK_NOTHROW(Skeleton(lamp_skeleton_tree()));
  CHECK_NOTHROW(top_only_skeleton());

  FaultTree looped;
  looped.top = "T";
  looped.gates["T"] = Gate{"T", GateKind::or_gate(), {"G1"}};
  looped.gates["G1"] = Gate{"G1", GateKind::and_gate(), {"G1"}};
  CHECK_THROWS_MATCHES(Skeleton(looped), input_error,
                       Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(
                           "skeleton is not a valid fault tree")));
}

TEST_CASE("containment demands the top, every fixed gate, edge, and event") {
  const Skeleton skel(lamp_skeleton_tree());
  CHECK(contains_skeleton(lamp_skeleton_tree(), skel));
  CHECK(contains_skeleton(testutil::lamp_tree(), skel));  // grown children are fine

  SECTION("a different top fails") {
    FaultTree other = lamp_skeleton_tree();
    other.gates["X"] = other.gates["T"];
    other.gates["X"].output = "X";
    other.gates.erase("T");
    other.top = "X";
    CHECK_FALSE(contains_skeleton(other, skel));
  }
  SECTION("a missing fixed gate fails") {
    FaultTree flat;
    flat.top = "T";
    flat.gates["T"] = Gate{"T", GateKind::or_gate(), {"LB1", "LB2"}};
    flat.basic_events = {"LB1", "LB2"};
    CHECK_FALSE(contains_skeleton(flat, skel));
  }
  SECTION("a changed fixed kind fails") {
    FaultTree mutated = testutil::lamp_tree();
    mutated.gates["G2"].kind = GateKind::or_gate();
    CHECK_FALSE(contains_skeleton(mutated, skel));
  }
  SECTION("a missing fixed edge fails") {
    FaultTree cut = testutil::lamp_tree();
    cut.gates["G2"].remove_input("LB2");
    CHECK_FALSE(contains_skeleton(cut, skel));
    // Moving the event elsewhere does not restore the fixed edge.
    cut.gates["G1"].add_input("LB2");
    CHECK_FALSE(contains_skeleton(cut, skel));
  }
  SECTION("a missing fixed basic event fails") {
    FaultTree f = lamp_skeleton_tree();
    f.gates["T"].add_input("OF");
    f.basic_events.insert("OF");
    const Skeleton with_of(std::move(f));
    CHECK_FALSE(contains_skeleton(lamp_skeleton_tree(), with_of));
  }
}

TEST_CASE("restricted operators never disturb the fixed subgraph") {
  const Skeleton skel(lamp_skeleton_tree());
  const std::vector<std::string> vars = {"OF", "CF", "LB1", "LB2"};
  Rng rng(20240816);

  FaultTree prev = skel.ft;
  FaultTree cur = skel.ft;
  int applied = 0;
  int by_kind[7] = {0};
  while (applied < 1000) {
    const int move = static_cast<int>(rng.below(7));
    std::optional<FaultTree> next;
    switch (move) {
      case 0: next = g_create_o(cur, skel, rng, true); break;
      case 1: next = g_mutate_o(cur, skel, rng, true); break;
      case 2: next = k_n_change_o(cur, skel, rng); break;
      case 3: next = g_delete_o(cur, skel, rng); break;
      case 4: next = be_disconnect_o(cur, skel, rng); break;
      case 5: next = be_connect(cur, vars, rng); break;
      default: next = be_swap_o(cur, skel, rng); break;
    }
    if (!next) continue;
    ++applied;
    ++by_kind[move];
    REQUIRE(validate(*next).empty());
    REQUIRE(contains_skeleton(*next, skel));
    prev = std::move(cur);
    cur = std::move(*next);
    if (cur.gate_count() > 12) cur = skel.ft;  // keep the walk small

    if (applied % 50 == 0) {
      for (const FaultTree& kid : crossover_o(cur, prev, skel, rng)) {
        CHECK(validate(kid).empty());
        CHECK(contains_skeleton(kid, skel));
      }
    }
  }
  // Every move kind must actually have fired during the walk.
  for (int k = 0; k < 7; ++k) {
    INFO("move kind " << k);
    CHECK(by_kind[k] > 0);
  }
}

TEST_CASE("fixed gates are excluded from each operator's choices") {
  const Skeleton skel(lamp_skeleton_tree());

  SECTION("gate mutation only touches free gates") {
    FaultTree ft = lamp_skeleton_tree();
    ft.gates["G1"] = Gate{"G1", GateKind::or_gate(), {"OF", "CF"}};
    ft.gates["T"].add_input("G1");
    ft.basic_events.insert("OF");
    ft.basic_events.insert("CF");
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng rng(seed);
      const auto out = g_mutate_o(ft, skel, rng);
      REQUIRE(out.has_value());
      CHECK(out->gates.at("T").kind == GateKind::or_gate());
      CHECK(out->gates.at("G2").kind == GateKind::and_gate());
      CHECK(out->gates.at("G1").kind == GateKind::and_gate());  // the only free gate
    }
  }
  SECTION("mutation is inapplicable when every gate is fixed") {
    Rng rng(1);
    CHECK_FALSE(g_mutate_o(skel.ft, skel, rng, true).has_value());
    CHECK_FALSE(k_n_change_o(skel.ft, skel, rng).has_value());
    CHECK_FALSE(g_delete_o(skel.ft, skel, rng).has_value());
    CHECK_FALSE(be_disconnect_o(skel.ft, skel, rng).has_value());
    CHECK_FALSE(be_swap_o(skel.ft, skel, rng).has_value());
  }
  SECTION("grouping never moves a fixed edge away from its gate") {
    FaultTree ft = lamp_skeleton_tree();
    ft.gates["T"].add_input("OF");
    ft.gates["T"].add_input("CF");
    ft.basic_events.insert("OF");
    ft.basic_events.insert("CF");
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      Rng rng(seed);
      const auto out = g_create_o(ft, skel, rng);
      REQUIRE(out.has_value());
      CHECK(out->gates.at("T").has_input("G2"));  // the fixed edge survives
      CHECK(contains_skeleton(*out, skel));
    }
  }
  SECTION("cardinality changes skip fixed at-least gates") {
    FaultTree base;
    base.top = "T";
    base.gates["T"] = Gate{"T", GateKind::at_least(2), {"B1", "B2", "B3"}};
    base.basic_events = {"B1", "B2", "B3"};
    const Skeleton kn_skel(base);  // the whole two-of-three gate is fixed
    Rng rng(1);
    CHECK_FALSE(k_n_change_o(base, kn_skel, rng).has_value());

    FaultTree with_free = base;
    with_free.gates["G1"] = Gate{"G1", GateKind::at_least(1), {"B4", "B5", "B6"}};
    with_free.gates["T"].add_input("G1");
    for (const char* b : {"B4", "B5", "B6"}) with_free.basic_events.insert(b);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Rng r(seed);
      const auto out = k_n_change_o(with_free, kn_skel, r);
      REQUIRE(out.has_value());
      CHECK(out->gates.at("T").kind == GateKind::at_least(2));  // untouched
      CHECK(out->gates.at("G1").kind.k != 1);
    }
  }
  SECTION("crossover drops a side with no free swap points") {
    FaultTree grown = lamp_skeleton_tree();
    grown.gates["T"].add_input("OF");
    grown.basic_events.insert("OF");
    Rng rng(1);
    CHECK(crossover_o(grown, skel.ft, skel, rng).empty());
    CHECK(crossover_o(skel.ft, grown, skel, rng).empty());
  }
}

TEST_CASE("a top-only skeleton leaves most operators unrestricted") {
  // With no fixed edges or events, the restricted pools coincide with the
  // unrestricted ones: the same seed must yield the same move.  Gate-kind
  // moves are the exception: the top gate itself always stays fixed.
  const Skeleton bare = top_only_skeleton();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const FaultTree ft = testutil::random_tree(seed, 6, 3, false);
    {
      Rng a(seed), b(seed);
      CHECK(g_create_o(ft, bare, a) == g_create(ft, b));
    }
    {
      Rng a(seed), b(seed);
      CHECK(g_delete_o(ft, bare, a) == g_delete(ft, b));
    }
    {
      Rng a(seed), b(seed);
      CHECK(be_disconnect_o(ft, bare, a) == be_disconnect(ft, b));
    }
    {
      Rng a(seed), b(seed);
      CHECK(be_swap_o(ft, bare, a) == be_swap(ft, b));
    }
  }
  SECTION("crossover also coincides when the parents' top kinds match") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      FaultTree a = testutil::random_tree(seed, 6, 3);
      FaultTree b = testutil::random_tree(seed + 1000, 6, 3);
      a.gates.at(a.top).kind = GateKind::or_gate();
      b.gates.at(b.top).kind = GateKind::or_gate();
      Rng r1(seed), r2(seed);
      CHECK(crossover_o(a, b, bare, r1) == crossover(a, b, r2));
    }
  }
  SECTION("the top gate's kind stays fixed even for a bare skeleton") {
    FaultTree ft;
    ft.top = "T";
    ft.gates["T"] = Gate{"T", GateKind::or_gate(), {"B1", "G1"}};
    ft.gates["G1"] = Gate{"G1", GateKind::or_gate(), {"B2", "B3"}};
    ft.basic_events = {"B1", "B2", "B3"};
    bool unrestricted_flips_top = false;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng a(seed), b(seed);
      const auto restricted = g_mutate_o(ft, bare, a);
      const auto free = g_mutate(ft, b);
      REQUIRE(restricted.has_value());
      REQUIRE(free.has_value());
      CHECK(restricted->gates.at("T").kind == GateKind::or_gate());
      if (!(free->gates.at("T").kind == GateKind::or_gate())) unrestricted_flips_top = true;
    }
    CHECK(unrestricted_flips_top);
  }
}

TEST_CASE("guided search keeps the expert structure in every individual") {
  const Dataset lamp = testutil::lamp_data();
  const Skeleton skel(lamp_skeleton_tree());
  EaConfig cfg;
  cfg.population_size = 40;
  cfg.max_iterations = 60;
  cfg.convergence_window = 15;
  cfg.seed = 5;
  cfg.record_individuals = true;

  const RunResult result = run_partial(lamp, skel, cfg);
  CHECK_THAT(result.best.fitness, WithinAbs(1.0, 1e-12));
  CHECK(result.trace.termination == Termination::TargetReached);
  CHECK(contains_skeleton(result.best.ft, skel));
  CHECK(equivalent(result.best.ft, testutil::lamp_tree()));

  REQUIRE(!result.trace.iterations.empty());
  CHECK(result.trace.iterations[0].population_size == 1);  // the skeleton alone
  for (const auto& st : result.trace.iterations) {
    REQUIRE(static_cast<int>(st.individuals.size()) == st.population_size);
    for (const auto& ind : st.individuals) {
      CHECK(contains_skeleton(ind.ft, skel));
      CHECK(validate(ind.ft).empty());
    }
  }
}

TEST_CASE("a complete skeleton satisfies the target before any iteration") {
  const Dataset lamp = testutil::lamp_data();
  const Skeleton full(testutil::lamp_tree());
  EaConfig cfg;
  cfg.seed = 2;
  const RunResult result = run_partial(lamp, full, cfg);
  CHECK(result.trace.termination == Termination::TargetReached);
  CHECK(result.trace.iterations_run == 0);
  CHECK_THAT(result.best.fitness, WithinAbs(1.0, 1e-12));
  CHECK(result.best.ft == testutil::lamp_tree());
}

TEST_CASE("a wrong skeleton caps the reachable fitness but the run completes") {
  const Dataset lamp = testutil::lamp_data();
  // Forcing the top to be a conjunction of oil and coil failure contradicts
  // the data, which needs a disjunction.
  FaultTree wrong;
  wrong.top = "T";
  wrong.gates["T"] = Gate{"T", GateKind::and_gate(), {"CF", "OF"}};
  wrong.basic_events = {"CF", "OF"};
  const Skeleton skel{std::move(wrong)};

  EaConfig cfg;
  cfg.population_size = 30;
  cfg.max_iterations = 15;
  cfg.convergence_window = 5;
  cfg.seed = 3;
  cfg.record_individuals = true;
  const RunResult result = run_partial(lamp, skel, cfg);
  CHECK(result.trace.termination != Termination::TargetReached);
  CHECK(result.best.fitness < 1.0);
  CHECK(result.best.fitness > 0.5);
  CHECK(contains_skeleton(result.best.ft, skel));
  for (const auto& st : result.trace.iterations)
    for (const auto& ind : st.individuals) CHECK(contains_skeleton(ind.ft, skel));
}

TEST_CASE("guided seeding validates the skeleton against the variables") {
  const std::vector<std::string> vars = {"OF", "CF", "LB1", "LB2", "T"};

  SECTION("the skeleton itself is the single seed") {
    const Skeleton skel(lamp_skeleton_tree());
    const auto seeds = seed_population_o(skel, vars);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0].ft == skel.ft);
    CHECK(seeds[0].origin == Origin::Seed);
  }
  SECTION("a gate name shadowing a variable is rejected") {
    FaultTree shadow;
    shadow.top = "T";
    shadow.gates["T"] = Gate{"T", GateKind::or_gate(), {"LB1"}};
    shadow.gates["LB1"] = Gate{"LB1", GateKind::and_gate(), {"CF"}};
    shadow.basic_events = {"CF"};
    CHECK_THROWS_MATCHES(seed_population_o(Skeleton(std::move(shadow)), vars), input_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("shadows a dataset variable")));
  }
  SECTION("a top that is not a variable is rejected") {
    FaultTree other;
    other.top = "X";
    other.gates["X"] = Gate{"X", GateKind::or_gate(), {"OF"}};
    other.basic_events = {"OF"};
    CHECK_THROWS_MATCHES(seed_population_o(Skeleton(std::move(other)), vars), input_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not a dataset variable")));
  }
  SECTION("a basic event that is not a variable is rejected") {
    FaultTree unknown;
    unknown.top = "T";
    unknown.gates["T"] = Gate{"T", GateKind::or_gate(), {"ZZ"}};
    unknown.basic_events = {"ZZ"};
    CHECK_THROWS_MATCHES(seed_population_o(Skeleton(std::move(unknown)), vars), input_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not a dataset variable")));
  }
  SECTION("the guided run rejects a top mismatch") {
    Dataset lamp = testutil::lamp_data();
    FaultTree other;
    other.top = "OF";
    other.gates["OF"] = Gate{"OF", GateKind::or_gate(), {"CF"}};
    other.basic_events = {"CF"};
    EaConfig cfg;
    CHECK_THROWS_MATCHES(run_partial(lamp, Skeleton(std::move(other)), cfg), input_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("does not match")));
  }
}
