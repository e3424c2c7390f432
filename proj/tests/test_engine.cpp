#include <catch2/catch_amalgamated.hpp>

#include "ftevolve/engine.hpp"
#include "ftevolve/trace_io.hpp"
#include "helpers.hpp"

using namespace ftevolve;
using Catch::Matchers::WithinAbs;

namespace {

// A dataset sampled from a known tree plus a handful of contradicting rows,
// so fitness values land strictly between the frozen anchors.
Dataset six_be_dataset() {
  const FaultTree truth = testutil::six_be_tree();
  std::vector<std::string> vars(truth.basic_events.begin(), truth.basic_events.end());
  vars.push_back(truth.top);
  std::vector<Record> records;
  int weight = 1;
  for (const Assignment& a : testutil::all_assignments(truth)) {
    Record r;
    for (const auto& v : vars)
      r.values.push_back(v == truth.top ? testutil::ref_eval(truth, a) : a.at(v));
    r.count = 1 + (weight++ % 3);
    records.push_back(std::move(r));
  }
  return make_dataset(vars, truth.top, records);
}

EaConfig quiet_config(std::uint64_t seed = 1) {
  EaConfig cfg;
  cfg.population_size = 40;
  cfg.max_iterations = 60;
  cfg.convergence_window = 10;
  cfg.seed = seed;
  return cfg;
}

bool traces_equal_ignoring_time(const RunTrace& a, const RunTrace& b) {
  if (a.termination != b.termination || a.iterations_run != b.iterations_run) return false;
  if (a.iterations.size() != b.iterations.size()) return false;
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    const IterationStats& x = a.iterations[i];
    const IterationStats& y = b.iterations[i];
    if (x.iteration != y.iteration || x.best_fitness != y.best_fitness ||
        x.mean_fitness != y.mean_fitness || x.population_size != y.population_size ||
        x.survivor_counts != y.survivor_counts || x.selected_origins != y.selected_origins)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("seed population holds the and-of-all and or-of-all trees") {
  const std::vector<std::string> vars = {"OF", "CF", "LB1", "LB2", "T"};
  const auto seeds = seed_population(vars, "T");
  REQUIRE(seeds.size() == 2);
  for (const auto& s : seeds) {
    CHECK(s.origin == Origin::Seed);
    CHECK(s.birth_iteration == 0);
    CHECK(s.ft.gate_count() == 1);
    CHECK(s.ft.top == "T");
    CHECK(s.ft.basic_events == std::set<NodeId>{"CF", "LB1", "LB2", "OF"});
    CHECK(validate(s.ft).empty());
  }
  CHECK(seeds[0].ft.gates.at("T").kind == GateKind::and_gate());
  CHECK(seeds[1].ft.gates.at("T").kind == GateKind::or_gate());

  CHECK_THROWS_AS(seed_population(vars, "missing"), input_error);
  CHECK_THROWS_AS(seed_population({"T"}, "T"), input_error);
}

TEST_CASE("fitness matches the hand-computed anchors on the lamp data") {
  const Dataset lamp = testutil::lamp_data();
  const EvalContext ctx(lamp);

  CHECK_THAT(ctx.fitness(testutil::lamp_tree()), WithinAbs(1.0, 1e-12));

  const auto seeds = seed_population(lamp.variables, lamp.top_variable);
  const double and_fit = ctx.fitness(seeds[0].ft);
  const double or_fit = ctx.fitness(seeds[1].ft);
  CHECK_THAT(and_fit, WithinAbs(0.92, 1e-12));
  CHECK_THAT(or_fit, WithinAbs(0.98, 1e-12));

  // The same numbers must fall out of a plain per-record recount.
  CHECK_THAT(testutil::reference_fitness(seeds[0].ft, lamp), WithinAbs(and_fit, 1e-12));
  CHECK_THAT(testutil::reference_fitness(seeds[1].ft, lamp), WithinAbs(or_fit, 1e-12));
  CHECK_THAT(testutil::reference_fitness(testutil::lamp_tree(), lamp), WithinAbs(1.0, 1e-12));
}

TEST_CASE("packed evaluation agrees with the reference recount") {
  const Dataset base = six_be_dataset();
  const EvalContext ctx(base);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const FaultTree ft = testutil::random_tree(seed, 6, 3, seed % 4 == 0);
    CHECK_THAT(ctx.fitness(ft), WithinAbs(testutil::reference_fitness(ft, base), 1e-12));
  }
  SECTION("a tree naming an unknown variable is rejected") {
    FaultTree bad;
    bad.top = "T";
    bad.gates["T"] = Gate{"T", GateKind::and_gate(), {"B1", "NOPE"}};
    bad.basic_events = {"B1", "NOPE"};
    CHECK_THROWS_MATCHES(ctx.fitness(bad), input_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not a dataset variable")));
  }
}

TEST_CASE("fitness is invariant under scaling every record count") {
  const Dataset base = six_be_dataset();
  Dataset scaled = base;
  for (auto& r : scaled.records) r.count *= 7;
  const EvalContext a(base), b(scaled);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const FaultTree ft = testutil::random_tree(seed, 6, 3);
    CHECK_THAT(a.fitness(ft), WithinAbs(b.fitness(ft), 1e-12));
  }
}

TEST_CASE("the search recovers the lamp tree exactly") {
  const Dataset lamp = testutil::lamp_data();
  const RunResult result = run(lamp, quiet_config(5));
  CHECK_THAT(result.best.fitness, WithinAbs(1.0, 1e-12));
  CHECK(result.trace.termination == Termination::TargetReached);
  REQUIRE(result.cnf_reduced);
  // Equivalence to the true tree, checked through the normal forms.
  CHECK(equivalent(result.best.ft, testutil::lamp_tree()));
  CHECK(equivalent(result.best_cnf, testutil::lamp_tree()));
  CHECK(to_normal_form(result.best_cnf, NfForm::Cnf) ==
        to_normal_form(testutil::lamp_tree(), NfForm::Cnf));
}

TEST_CASE("a satisfied target stops the run before any iteration") {
  const Dataset lamp = testutil::lamp_data();
  EaConfig cfg = quiet_config();
  cfg.target_fitness = 0.9;  // the or-of-all seed already scores 0.98
  const RunResult result = run(lamp, cfg);
  CHECK(result.trace.termination == Termination::TargetReached);
  CHECK(result.trace.iterations_run == 0);
  REQUIRE(result.trace.iterations.size() == 1);
  CHECK(result.trace.iterations[0].population_size == 2);
  CHECK_THAT(result.best.fitness, WithinAbs(0.98, 1e-12));
}

TEST_CASE("an unreachable target ends in convergence or the iteration cap") {
  const Dataset lamp = testutil::lamp_data();
  SECTION("convergence window") {
    EaConfig cfg = quiet_config();
    cfg.target_fitness = 2.0;  // can never be reached
    cfg.convergence_window = 3;
    cfg.max_iterations = 100;
    const RunResult result = run(lamp, cfg);
    CHECK(result.trace.termination == Termination::Converged);
    CHECK(result.trace.iterations_run < 100);
    // The last three iterations brought no improvement.
    const auto& its = result.trace.iterations;
    REQUIRE(its.size() >= 4);
    double best_before = 0.0;
    for (std::size_t i = 0; i + 3 < its.size(); ++i)
      best_before = std::max(best_before, its[i].best_fitness);
    for (std::size_t i = its.size() - 3; i < its.size(); ++i)
      CHECK(its[i].best_fitness <= best_before);
  }
  SECTION("iteration cap") {
    EaConfig cfg = quiet_config();
    cfg.target_fitness = 2.0;
    cfg.convergence_window = 1000;
    cfg.max_iterations = 4;
    const RunResult result = run(lamp, cfg);
    CHECK(result.trace.termination == Termination::MaxIterations);
    CHECK(result.trace.iterations_run == 4);
    CHECK(result.trace.iterations.size() == 5);  // row 0 plus four iterations
  }
  SECTION("a zero iteration budget still reports the seeded population") {
    EaConfig cfg = quiet_config();
    cfg.target_fitness = 2.0;
    cfg.max_iterations = 0;
    const RunResult result = run(lamp, cfg);
    CHECK(result.trace.termination == Termination::MaxIterations);
    CHECK(result.trace.iterations_run == 0);
    CHECK(result.trace.iterations.size() == 1);
  }
}

TEST_CASE("equal seeds give identical runs apart from wall time") {
  const Dataset data = six_be_dataset();
  EaConfig cfg = quiet_config(99);
  cfg.max_iterations = 12;
  cfg.target_fitness = 2.0;
  cfg.convergence_window = 1000;
  const RunResult a = run(data, cfg);
  const RunResult b = run(data, cfg);
  CHECK(a.best.ft == b.best.ft);
  CHECK(a.best.fitness == b.best.fitness);
  CHECK(a.best_cnf == b.best_cnf);
  CHECK(a.cnf_reduced == b.cnf_reduced);
  CHECK(traces_equal_ignoring_time(a.trace, b.trace));

  EaConfig other = cfg;
  other.seed = 100;
  const RunResult c = run(data, other);
  CHECK_FALSE(traces_equal_ignoring_time(a.trace, c.trace));
}

TEST_CASE("elitist best fitness never decreases across iterations") {
  const Dataset data = six_be_dataset();
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    EaConfig cfg = quiet_config(seed);
    cfg.max_iterations = 20;
    cfg.target_fitness = 2.0;
    cfg.convergence_window = 1000;
    const RunResult result = run(data, cfg);
    const auto& its = result.trace.iterations;
    for (std::size_t i = 1; i < its.size(); ++i)
      CHECK(its[i].best_fitness >= its[i - 1].best_fitness);
  }
}

TEST_CASE("the gate cap bounds every individual in the population") {
  const Dataset data = six_be_dataset();
  EaConfig cfg = quiet_config(7);
  cfg.max_gates = 2;
  cfg.max_iterations = 10;
  cfg.target_fitness = 2.0;
  cfg.convergence_window = 1000;
  cfg.record_individuals = true;
  const RunResult result = run(data, cfg);
  for (const auto& st : result.trace.iterations) {
    REQUIRE(static_cast<int>(st.individuals.size()) == st.population_size);
    for (const auto& ind : st.individuals) {
      CHECK(ind.ft.gate_count() <= 2);
      CHECK(validate(ind.ft).empty());
    }
  }
  CHECK(result.best.ft.gate_count() <= 2);
}

TEST_CASE("survivor accounting is internally consistent") {
  const Dataset data = six_be_dataset();
  EaConfig cfg = quiet_config(11);
  cfg.max_iterations = 8;
  cfg.target_fitness = 2.0;
  cfg.convergence_window = 1000;
  cfg.selection = SelectionStrategy::Tournament;
  const RunResult result = run(data, cfg);
  const auto table = operator_survival_stats(result.trace);
  REQUIRE(table.size() == std::size(kAllOrigins));

  for (std::size_t i = 0; i < result.trace.iterations.size(); ++i) {
    const IterationStats& st = result.trace.iterations[i];
    // selected_origins, survivor_counts, and the recounted table must all
    // tell the same story.
    CHECK(static_cast<int>(st.selected_origins.size()) == st.population_size);
    int total = 0;
    for (Origin o : kAllOrigins) {
      const int counted =
          static_cast<int>(std::count(st.selected_origins.begin(), st.selected_origins.end(), o));
      CHECK(st.survivor_counts.at(o) == counted);
      CHECK(table.at(o)[i] == counted);
      total += counted;
    }
    CHECK(total == st.population_size);
    CHECK(st.population_size <= cfg.population_size);
  }
  // Row 0 is all seeds.
  CHECK(result.trace.iterations[0].survivor_counts.at(Origin::Seed) == 2);
}

TEST_CASE("trace serialization round-trips through JSON") {
  const Dataset lamp = testutil::lamp_data();
  EaConfig cfg = quiet_config(3);
  cfg.max_iterations = 6;
  cfg.target_fitness = 2.0;
  cfg.convergence_window = 1000;
  const RunTrace trace = run(lamp, cfg).trace;

  const RunTrace back = trace_from_json(trace_to_json(trace));
  CHECK(back.termination == trace.termination);
  CHECK(back.iterations_run == trace.iterations_run);
  CHECK_THAT(back.wall_seconds, WithinAbs(trace.wall_seconds, 1e-9));
  REQUIRE(back.iterations.size() == trace.iterations.size());
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    CHECK(back.iterations[i].iteration == trace.iterations[i].iteration);
    CHECK(back.iterations[i].best_fitness == trace.iterations[i].best_fitness);
    CHECK(back.iterations[i].mean_fitness == trace.iterations[i].mean_fitness);
    CHECK(back.iterations[i].population_size == trace.iterations[i].population_size);
    CHECK(back.iterations[i].survivor_counts == trace.iterations[i].survivor_counts);
    CHECK(back.iterations[i].selected_origins == trace.iterations[i].selected_origins);
  }

  SECTION("the CSV has one header and one row per iteration") {
    const std::string csv = trace_to_csv(trace);
    CHECK_THAT(csv, Catch::Matchers::StartsWith(
                        "iteration,best_fitness,mean_fitness,population,survivors_seed"));
    const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == trace.iterations.size() + 1);
  }
  SECTION("the survival table lists every operator as a row") {
    const std::string csv = survival_stats_to_csv(trace);
    const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == std::size(kAllOrigins) + 1);
    CHECK_THAT(csv, Catch::Matchers::StartsWith("operator,0,1,"));
    CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("\ncrossover,"));
    CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("\nseed,2,"));
  }
  SECTION("malformed JSON is reported as an input problem") {
    CHECK_THROWS_AS(trace_from_json("{"), input_error);
    CHECK_THROWS_AS(trace_from_json("{}"), input_error);
    CHECK_THROWS_AS(trace_from_json("{\"iterations\": [{\"iteration\": 0}]}"), input_error);
  }
}

TEST_CASE("configuration limits are enforced before a run starts") {
  const Dataset lamp = testutil::lamp_data();
  EaConfig cfg;
  SECTION("population") {
    cfg.population_size = 0;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
  SECTION("operator probability") {
    cfg.operator_probability = 1.5;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
    cfg.operator_probability = -0.1;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
  SECTION("iterations") {
    cfg.max_iterations = -1;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
  SECTION("convergence window") {
    cfg.convergence_window = 0;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
  SECTION("tournament size") {
    cfg.tournament_size = 0;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
  SECTION("gate cap") {
    cfg.max_gates = -2;
    CHECK_THROWS_AS(run(lamp, cfg), input_error);
  }
}

TEST_CASE("termination reasons round-trip by name") {
  for (Termination t :
       {Termination::TargetReached, Termination::Converged, Termination::MaxIterations})
    CHECK(termination_from_name(termination_name(t)) == t);
  CHECK_THROWS_AS(termination_from_name("gave-up"), input_error);
  CHECK_THROWS_AS(origin_from_name("mystery"), input_error);
}
