// Command line front end: learn trees from data, generate synthetic trees
// and datasets, evaluate and normalize trees, run experiment suites, and
// summarize traces.
//
// Exit codes: 0 success, 1 usage error, 2 data or runtime error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "ftevolve/bench.hpp"
#include "ftevolve/dataset.hpp"
#include "ftevolve/engine.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/eval_context.hpp"
#include "ftevolve/galileo.hpp"
#include "ftevolve/generator.hpp"
#include "ftevolve/normal_form.hpp"
#include "ftevolve/report_io.hpp"
#include "ftevolve/skeleton.hpp"
#include "ftevolve/trace_io.hpp"

namespace fs = std::filesystem;
using namespace ftevolve;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes via a temporary file in the same directory, then renames, so a
// crash never leaves a half-written artifact behind.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw input_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<GateOp> parse_kinds(const std::string& s) {
  std::vector<GateOp> kinds;
  for (const auto& name : split_list(s)) {
    if (name == "and")
      kinds.push_back(GateOp::And);
    else if (name == "or")
      kinds.push_back(GateOp::Or);
    else if (name == "atleast")
      kinds.push_back(GateOp::AtLeast);
    else
      throw input_error("unknown gate kind '" + name + "' (expected and, or, atleast)");
  }
  if (kinds.empty()) throw input_error("no gate kinds given");
  return kinds;
}

std::string format_fitness(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Engine options shared by learn and bench.
struct EngineArgs {
  int pop = 100;
  int iters = 100;
  int conv = 10;
  double op_prob = 0.9;
  double target = 1.0;
  std::string selection = "elitist";
  int tournament_size = 3;
  int max_gates = 0;
  bool kn = false;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--pop", pop, "population size")->capture_default_str();
    cmd->add_option("--iters", iters, "maximum iterations")->capture_default_str();
    cmd->add_option("--conv", conv, "stop after this many iterations without improvement")
        ->capture_default_str();
    cmd->add_option("--op-prob", op_prob, "per-individual operator probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--target", target, "stop once best fitness reaches this value")
        ->capture_default_str();
    cmd->add_option("--selection", selection,
                    "survivor selection: elitist, roulette, sus, tournament, random")
        ->capture_default_str();
    cmd->add_option("--tournament-size", tournament_size, "contestants per tournament pick")
        ->capture_default_str();
    cmd->add_option("--max-gates", max_gates,
                    "discard offspring with more gates (0: 4x variable count)")
        ->capture_default_str();
    cmd->add_flag("--kn", kn, "enable at-least (k-of-N) gates");
    cmd->add_option("--seed", seed, "random seed (falls back to FTEVOLVE_SEED, then 1)")
        ->capture_default_str();
  }

  EaConfig config(const CLI::App* cmd) const {
    EaConfig cfg;
    cfg.population_size = pop;
    cfg.max_iterations = iters;
    cfg.convergence_window = conv;
    cfg.operator_probability = op_prob;
    cfg.target_fitness = target;
    cfg.selection = strategy_from_name(selection);
    cfg.tournament_size = tournament_size;
    cfg.max_gates = max_gates;
    cfg.at_least_gates = kn;
    cfg.seed = seed;
    if (cmd->count("--seed") == 0) {
      if (const char* env = std::getenv("FTEVOLVE_SEED")) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw input_error("FTEVOLVE_SEED is not an unsigned integer: '" + std::string(env) +
                            "'");
        }
      }
    }
    return cfg;
  }
};

void write_resolved_config(CLI::App* cmd, const fs::path& dir, std::uint64_t effective_seed) {
  std::string text = "subcommand=" + cmd->get_name() + "\n";
  text += "effective_seed=" + std::to_string(effective_seed) + "\n";
  text += cmd->config_to_str(true, false);
  write_file(dir / "config.resolved", text);
}

// ---------------------------------------------------------------------------

int cmd_learn(CLI::App* cmd, const EngineArgs& eng, const std::string& data_path,
              const std::string& top, const std::string& skeleton_path,
              const std::string& out_dir) {
  const Dataset data = load_csv(read_file(data_path), top);
  const EaConfig cfg = eng.config(cmd);

  RunResult res;
  if (skeleton_path.empty()) {
    res = run(data, cfg);
  } else {
    const Skeleton sk(parse_galileo(read_file(skeleton_path)));
    res = run_partial(data, sk, cfg);
  }

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "best.ft", serialize(res.best.ft));
  write_file(fs::path(out_dir) / "best.cnf.ft", serialize(res.best_cnf));
  write_file(fs::path(out_dir) / "trace.csv", trace_to_csv(res.trace));
  write_file(fs::path(out_dir) / "trace.json", trace_to_json(res.trace));
  write_resolved_config(cmd, out_dir, cfg.seed);

  if (!res.cnf_reduced)
    std::cerr << "note: normal form reduction exceeded the clause budget; "
                 "best.cnf.ft holds the unreduced tree\n";
  std::cerr << "terminated: " << termination_name(res.trace.termination) << " after "
            << res.trace.iterations_run << " iterations\n";
  std::cout << "final fitness " << format_fitness(res.best.fitness) << "\n";
  return 0;
}

int cmd_gen_ft(const GenSpec& spec, const std::string& out_path) {
  write_or_print(out_path, serialize(generate_ft(spec)));
  return 0;
}

int cmd_gen_data(const std::string& ft_path, std::int64_t records, bool full,
                 std::uint64_t seed, const std::string& out_path) {
  const FaultTree ft = parse_galileo(read_file(ft_path));
  const Dataset d = full ? full_truth_table(ft) : sample_dataset(ft, records, seed);
  write_or_print(out_path, save_csv(d));
  return 0;
}

int cmd_eval(const std::string& ft_path, const std::string& data_path, const std::string& top) {
  const FaultTree ft = parse_galileo(read_file(ft_path));
  const Dataset d = load_csv(read_file(data_path), top);
  std::cout << format_fitness(fitness(ft, d)) << "\n";
  return 0;
}

int cmd_normalize(const std::string& ft_path, const std::string& form,
                  const std::string& out_path) {
  const FaultTree ft = parse_galileo(read_file(ft_path));
  const NfForm f = form == "cnf" ? NfForm::Cnf : NfForm::Dnf;
  write_or_print(out_path, to_text(to_normal_form(ft, f)));
  return 0;
}

int cmd_stats(const std::string& trace_path, const std::string& out_path) {
  const RunTrace trace = trace_from_json(read_file(trace_path));
  write_or_print(out_path, survival_stats_to_csv(trace));
  return 0;
}

struct BenchArgs {
  std::string suite;
  int cases = 20;
  int bes_min = 6;
  int bes_max = 8;
  int gates = 0;  // 0: half the basic event count, at least two
  std::string noise = "0,0.01,0.03,0.05";
  std::string strategies = "elitist,roulette,sus,tournament,random";
  int repetitions = 10;
  std::vector<std::string> trees;
  std::int64_t records = 100000;
  double split_fraction = 2.0 / 3.0;
  std::uint64_t split_seed = 1;
  std::string out_dir = "ftevolve-bench";
  int threads = 1;
};

int cmd_bench(CLI::App* cmd, const EngineArgs& eng, const BenchArgs& args) {
  const EaConfig cfg = eng.config(cmd);
  const SplitSpec split_spec{args.split_fraction, args.split_seed};

  auto gates_for = [&args](int bes) {
    if (args.gates > 0) return args.gates;
    return std::max(2, bes / 2);
  };
  auto make_specs = [&](int n, int lo, int hi) {
    std::vector<GenSpec> specs;
    for (int i = 0; i < n; ++i) {
      GenSpec s;
      s.num_bes = lo + (hi > lo ? i % (hi - lo + 1) : 0);
      s.num_gates = gates_for(s.num_bes);
      if (cfg.at_least_gates) s.kinds.push_back(GateOp::AtLeast);
      s.seed = derive_seed(cfg.seed, 50000 + static_cast<std::uint64_t>(i));
      specs.push_back(s);
    }
    return specs;
  };

  ExperimentReport rep;
  if (args.suite == "accuracy") {
    rep = run_accuracy_suite(make_specs(args.cases, args.bes_min, args.bes_max), cfg,
                             split_spec, args.threads);
  } else if (args.suite == "noise") {
    std::vector<double> levels;
    for (const auto& tok : split_list(args.noise)) levels.push_back(std::stod(tok));
    rep = run_noise_suite(make_specs(args.cases, args.bes_min, args.bes_max), levels, cfg,
                          split_spec, args.threads);
  } else if (args.suite == "selection") {
    std::vector<SelectionStrategy> strategies;
    for (const auto& name : split_list(args.strategies))
      strategies.push_back(strategy_from_name(name));
    GenSpec s;
    s.num_bes = args.bes_min;
    s.num_gates = gates_for(s.num_bes);
    if (cfg.at_least_gates) s.kinds.push_back(GateOp::AtLeast);
    s.seed = derive_seed(cfg.seed, 50000);
    rep = run_selection_suite(s, strategies, cfg, args.repetitions, split_spec, args.threads);
  } else if (args.suite == "benchmark") {
    if (args.trees.empty()) throw input_error("benchmark suite needs --trees");
    rep = run_benchmark_suite(args.trees, cfg, args.records, split_spec, args.threads);
  } else {
    throw input_error("unknown suite '" + args.suite +
                      "' (expected accuracy, noise, selection, benchmark)");
  }

  const fs::path dir = fs::path(args.out_dir) / (args.suite + "-seed-" + std::to_string(cfg.seed));
  fs::create_directories(dir);
  write_file(dir / "report.csv", report_to_csv(rep));
  write_file(dir / "report.json", report_to_json(rep));
  for (std::size_t i = 0; i < rep.cases.size(); ++i) {
    if (!rep.cases[i].error.empty()) continue;
    write_file(dir / ("case-" + detail::pad_index(i) + ".trace.csv"),
               trace_to_csv(rep.cases[i].trace));
  }
  write_resolved_config(cmd, dir, cfg.seed);

  int failed = 0;
  for (const auto& c : rep.cases) {
    if (!c.error.empty()) {
      std::cerr << "warning: case " << c.name << " failed: " << c.error << "\n";
      ++failed;
    }
    if (c.low_positive_warning)
      std::cerr << "warning: case " << c.name << " has only " << c.positive_observations
                << " positive observations\n";
  }
  std::cout << "report written to " << dir.string() << " (" << rep.cases.size() - failed << "/"
            << rep.cases.size() << " cases ok)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fault tree induction from labeled boolean failure data"};
  app.require_subcommand(1);

  // learn
  auto* learn = app.add_subcommand("learn", "learn a fault tree from a CSV dataset");
  std::string learn_data, learn_top, learn_skeleton, learn_out = "ftevolve-out";
  EngineArgs learn_eng;
  learn->add_option("--data", learn_data, "training data CSV")
      ->required()
      ->check(CLI::ExistingFile);
  learn->add_option("--top", learn_top, "name of the observed top event variable")->required();
  learn->add_option("--skeleton", learn_skeleton,
                    "partial tree file that the result must contain")
      ->check(CLI::ExistingFile);
  learn->add_option("--out", learn_out, "output directory")->capture_default_str();
  learn_eng.attach(learn);
  learn->set_config("--config", "", "key=value file with the options above");

  // gen-ft
  auto* gen_ft = app.add_subcommand("gen-ft", "generate a random ground-truth tree");
  GenSpec gen_spec;
  std::string gen_kinds = "and,or", gen_out;
  gen_ft->add_option("--bes", gen_spec.num_bes, "basic events")->capture_default_str();
  gen_ft->add_option("--gates", gen_spec.num_gates, "gates")->capture_default_str();
  gen_ft->add_option("--kinds", gen_kinds, "comma list of gate kinds to draw from")
      ->capture_default_str();
  gen_ft->add_option("--prob-lo", gen_spec.be_prob_lo, "basic event probability lower bound")
      ->capture_default_str();
  gen_ft->add_option("--prob-hi", gen_spec.be_prob_hi, "basic event probability upper bound")
      ->capture_default_str();
  gen_ft->add_option("--seed", gen_spec.seed, "random seed")->capture_default_str();
  gen_ft->add_option("--out", gen_out, "output file (default: stdout)");

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "sample observations from a tree");
  std::string gd_ft, gd_out;
  std::int64_t gd_records = 1000;
  std::uint64_t gd_seed = 1;
  bool gd_full = false;
  gen_data->add_option("--ft", gd_ft, "tree file")->required()->check(CLI::ExistingFile);
  gen_data->add_option("--records", gd_records, "observations to sample")->capture_default_str();
  gen_data->add_flag("--full", gd_full, "emit the full truth table instead of sampling");
  gen_data->add_option("--seed", gd_seed, "random seed")->capture_default_str();
  gen_data->add_option("--out", gd_out, "output file (default: stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "accuracy of a tree against a dataset");
  std::string ev_ft, ev_data, ev_top;
  eval->add_option("--ft", ev_ft, "tree file")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--top", ev_top, "name of the observed top event variable")->required();

  // normalize
  auto* normalize = app.add_subcommand("normalize", "print a tree's normal form clauses");
  std::string nf_ft, nf_form, nf_out;
  normalize->add_option("--ft", nf_ft, "tree file")->required()->check(CLI::ExistingFile);
  normalize->add_option("--form", nf_form, "cnf or dnf")
      ->required()
      ->check(CLI::IsMember({"cnf", "dnf"}));
  normalize->add_option("--out", nf_out, "output file (default: stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  BenchArgs bench_args;
  EngineArgs bench_eng;
  bench->add_option("--suite", bench_args.suite, "accuracy, noise, selection, or benchmark")
      ->required();
  bench->add_option("--cases", bench_args.cases, "generated cases (accuracy, noise)")
      ->capture_default_str();
  bench->add_option("--bes-min", bench_args.bes_min, "smallest basic event count")
      ->capture_default_str();
  bench->add_option("--bes-max", bench_args.bes_max, "largest basic event count")
      ->capture_default_str();
  bench->add_option("--gates", bench_args.gates, "gates per generated tree (0: bes/2)")
      ->capture_default_str();
  bench->add_option("--noise", bench_args.noise, "comma list of noise levels")
      ->capture_default_str();
  bench->add_option("--strategies", bench_args.strategies, "comma list for the selection suite")
      ->capture_default_str();
  bench->add_option("--seeds", bench_args.repetitions,
                    "paired repetitions in the selection suite")
      ->capture_default_str();
  bench->add_option("--trees", bench_args.trees, "tree files for the benchmark suite")
      ->expected(-1);
  bench->add_option("--records", bench_args.records, "sampled observations per benchmark case")
      ->capture_default_str();
  bench->add_option("--split", bench_args.split_fraction, "training fraction of distinct records")
      ->capture_default_str();
  bench->add_option("--split-seed", bench_args.split_seed, "seed for the train/test split")
      ->capture_default_str();
  bench->add_option("--out", bench_args.out_dir, "output directory")->capture_default_str();
  bench->add_option("--threads", bench_args.threads, "cases run in parallel (1: sequential)")
      ->capture_default_str();
  bench_eng.attach(bench);
  bench->set_config("--config", "", "key=value file with the options above");

  // stats
  auto* stats = app.add_subcommand("stats", "operator survival table from a trace.json");
  std::string st_trace, st_out;
  stats->add_option("--trace", st_trace, "trace.json from a learn run")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--out", st_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (learn->parsed())
      return cmd_learn(learn, learn_eng, learn_data, learn_top, learn_skeleton, learn_out);
    if (gen_ft->parsed()) {
      gen_spec.kinds = parse_kinds(gen_kinds);
      return cmd_gen_ft(gen_spec, gen_out);
    }
    if (gen_data->parsed()) return cmd_gen_data(gd_ft, gd_records, gd_full, gd_seed, gd_out);
    if (eval->parsed()) return cmd_eval(ev_ft, ev_data, ev_top);
    if (normalize->parsed()) return cmd_normalize(nf_ft, nf_form, nf_out);
    if (bench->parsed()) return cmd_bench(bench, bench_eng, bench_args);
    if (stats->parsed()) return cmd_stats(st_trace, st_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
