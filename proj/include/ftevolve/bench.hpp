#pragma once

// Synthetic experiment suites: learn trees for generated (or supplied)
// ground truths and report accuracy, runtime, and traces per case.  Every
// case derives its own seeds from the master seeds and the case index, so
// suites are reproducible and cases are independent; cases sharing an index
// across related suites (or noise levels, or strategies) share seeds and
// are therefore paired.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ftevolve/dataset.hpp"
#include "ftevolve/engine.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/eval_context.hpp"
#include "ftevolve/galileo.hpp"
#include "ftevolve/generator.hpp"

namespace ftevolve {

struct CaseResult {
  std::string name;
  int num_bes = 0;
  int num_gates = 0;
  double noise_level = 0.0;
  std::string strategy;
  std::uint64_t case_seed = 0;
  double train_fitness = 0.0;
  double test_accuracy = 0.0;   // held-out split, when one exists
  double clean_accuracy = 0.0;  // noise-free full truth table, when enumerable
  double runtime_seconds = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIterations;
  std::int64_t positive_observations = 0;
  bool low_positive_warning = false;
  std::string error;  // non-empty: the case failed and carries no metrics
  std::vector<double> best_fitness_curve;
  RunTrace trace;
};

struct ExperimentReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;
  std::map<int, double> mean_test_accuracy_by_bes;
  std::map<double, double> mean_clean_accuracy_by_noise;
  std::map<std::string, double> median_test_accuracy_by_strategy;
  double mean_runtime_seconds = 0.0;
};

namespace detail {

inline void finalize_report(ExperimentReport& rep) {
  std::map<int, std::pair<double, int>> by_bes;
  std::map<double, std::pair<double, int>> by_noise;
  std::map<std::string, std::vector<double>> by_strategy;
  double runtime = 0.0;
  int ok = 0;
  for (const auto& c : rep.cases) {
    if (!c.error.empty()) continue;
    ++ok;
    runtime += c.runtime_seconds;
    auto& [bsum, bn] = by_bes[c.num_bes];
    bsum += c.test_accuracy;
    bn += 1;
    if (rep.suite == "noise") {
      auto& [nsum, nn] = by_noise[c.noise_level];
      nsum += c.clean_accuracy;
      nn += 1;
    }
    if (!c.strategy.empty()) by_strategy[c.strategy].push_back(c.test_accuracy);
  }
  for (const auto& [bes, acc] : by_bes)
    rep.mean_test_accuracy_by_bes[bes] = acc.first / acc.second;
  for (const auto& [lvl, acc] : by_noise)
    rep.mean_clean_accuracy_by_noise[lvl] = acc.first / acc.second;
  for (auto& [name, vals] : by_strategy) {
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    rep.median_test_accuracy_by_strategy[name] =
        n % 2 ? vals[n / 2] : (vals[n / 2 - 1] + vals[n / 2]) / 2.0;
  }
  rep.mean_runtime_seconds = ok ? runtime / ok : 0.0;
}

template <class F>
void parallel_cases(std::size_t n, int threads, F body) {
  if (threads < 2 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t k = std::min<std::size_t>(threads, n);
  pool.reserve(k);
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::int64_t positive_observations(const Dataset& d) {
  const std::size_t top = d.top_index();
  std::int64_t n = 0;
  for (const auto& r : d.records)
    if (r.values[top]) n += r.count;
  return n;
}

// Ground-truth data for one case: the full truth table when small enough
// to enumerate, otherwise a large sample.
inline Dataset case_data(const FaultTree& ft, std::uint64_t sample_seed,
                         std::int64_t sample_records = 100000) {
  if (ft.basic_events.size() <= 16) return full_truth_table(ft);
  return sample_dataset(ft, sample_records, sample_seed);
}

struct CaseSeeds {
  std::uint64_t ea;
  std::uint64_t split;
  std::uint64_t sample;

  CaseSeeds(std::uint64_t master, std::uint64_t split_master, std::size_t index)
      : ea(derive_seed(master, index * 4)),
        split(derive_seed(split_master, index * 4 + 1)),
        sample(derive_seed(split_master, index * 4 + 2)) {}
};

// Learning step shared by all suites.
inline void run_case(CaseResult& row, const Dataset& data, const Dataset& train,
                     const Dataset& test, const EaConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res = run(train, cfg);
  row.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  row.case_seed = cfg.seed;
  row.train_fitness = res.best.fitness;
  row.test_accuracy =
      test.records.empty() ? res.best.fitness : fitness(res.best.ft, test);
  row.clean_accuracy = fitness(res.best.ft, data);
  row.iterations = res.trace.iterations_run;
  row.termination = res.trace.termination;
  for (const auto& st : res.trace.iterations) row.best_fitness_curve.push_back(st.best_fitness);
  row.trace = std::move(res.trace);
}

inline std::string pad_index(std::size_t i) {
  std::string s = std::to_string(i);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

// One generated tree per spec; learn it from split training data.
inline ExperimentReport run_accuracy_suite(const std::vector<GenSpec>& specs,
                                           const EaConfig& cfg, const SplitSpec& split_spec,
                                           int threads = 1) {
  ExperimentReport rep;
  rep.suite = "accuracy";
  rep.seed = cfg.seed;
  rep.cases.resize(specs.size());
  detail::parallel_cases(specs.size(), threads, [&](std::size_t i) {
    const detail::CaseSeeds seeds(cfg.seed, split_spec.seed, i);
    CaseResult& row = rep.cases[i];
    row.name = "case-" + detail::pad_index(i);
    row.num_bes = specs[i].num_bes;
    row.num_gates = specs[i].num_gates;
    const FaultTree ft = generate_ft(specs[i]);
    const Dataset data = detail::case_data(ft, seeds.sample);
    row.positive_observations = detail::positive_observations(data);
    auto [train, test] = split(data, {split_spec.train_fraction, seeds.split});
    EaConfig c = cfg;
    c.seed = seeds.ea;
    detail::run_case(row, data, train, test, c);
  });
  detail::finalize_report(rep);
  return rep;
}

// The accuracy protocol with training observations corrupted at each noise
// level.  Cases at the same spec index share every seed across levels, so
// level 0 reproduces the accuracy suite exactly.
inline ExperimentReport run_noise_suite(const std::vector<GenSpec>& specs,
                                        const std::vector<double>& noise_levels,
                                        const EaConfig& cfg, const SplitSpec& split_spec = {},
                                        int threads = 1) {
  if (noise_levels.empty()) throw input_error("no noise levels given");
  ExperimentReport rep;
  rep.suite = "noise";
  rep.seed = cfg.seed;
  rep.cases.resize(specs.size() * noise_levels.size());
  detail::parallel_cases(rep.cases.size(), threads, [&](std::size_t c) {
    const std::size_t i = c / noise_levels.size();
    const std::size_t l = c % noise_levels.size();
    const detail::CaseSeeds seeds(cfg.seed, split_spec.seed, i);
    CaseResult& row = rep.cases[c];
    row.name = "case-" + detail::pad_index(i) + "-noise-" + std::to_string(l);
    row.num_bes = specs[i].num_bes;
    row.num_gates = specs[i].num_gates;
    row.noise_level = noise_levels[l];
    const FaultTree ft = generate_ft(specs[i]);
    const Dataset data = detail::case_data(ft, seeds.sample);
    row.positive_observations = detail::positive_observations(data);
    auto [train, test] = split(data, {split_spec.train_fraction, seeds.split});
    const Dataset noisy =
        inject_noise(train, noise_levels[l], derive_seed(seeds.ea, 1000 + l));
    EaConfig cl = cfg;
    cl.seed = seeds.ea;
    detail::run_case(row, data, noisy, test, cl);
  });
  detail::finalize_report(rep);
  return rep;
}

// One fixed tree, several selection strategies, paired seeds: repetition j
// uses the same split and engine seed under every strategy.
inline ExperimentReport run_selection_suite(const GenSpec& spec,
                                            const std::vector<SelectionStrategy>& strategies,
                                            const EaConfig& cfg, int num_seeds = 10,
                                            const SplitSpec& split_spec = {}, int threads = 1) {
  if (strategies.empty()) throw input_error("no strategies given");
  if (num_seeds < 1) throw input_error("need at least one repetition");
  ExperimentReport rep;
  rep.suite = "selection";
  rep.seed = cfg.seed;
  const FaultTree ft = generate_ft(spec);
  rep.cases.resize(static_cast<std::size_t>(num_seeds) * strategies.size());
  detail::parallel_cases(rep.cases.size(), threads, [&](std::size_t c) {
    const std::size_t j = c / strategies.size();
    const std::size_t s = c % strategies.size();
    const detail::CaseSeeds seeds(cfg.seed, split_spec.seed, j);
    CaseResult& row = rep.cases[c];
    row.name = "seed-" + detail::pad_index(j) + "-" + strategy_name(strategies[s]);
    row.num_bes = spec.num_bes;
    row.num_gates = spec.num_gates;
    row.strategy = strategy_name(strategies[s]);
    const Dataset data = detail::case_data(ft, seeds.sample);
    row.positive_observations = detail::positive_observations(data);
    auto [train, test] = split(data, {split_spec.train_fraction, seeds.split});
    EaConfig cs = cfg;
    cs.seed = seeds.ea;
    cs.selection = strategies[s];
    detail::run_case(row, data, train, test, cs);
  });
  detail::finalize_report(rep);
  return rep;
}

// Learns each tree file from freshly sampled observations.  A file that
// fails to parse (or cannot be sampled) yields an error row; the remaining
// cases still run.  Flags cases whose sample has few positive top
// observations, since accuracy means little on them.
inline ExperimentReport run_benchmark_suite(const std::vector<std::string>& ft_files,
                                            const EaConfig& cfg,
                                            std::int64_t records_per_case = 100000,
                                            const SplitSpec& split_spec = {}, int threads = 1) {
  ExperimentReport rep;
  rep.suite = "benchmark";
  rep.seed = cfg.seed;
  rep.cases.resize(ft_files.size());
  detail::parallel_cases(ft_files.size(), threads, [&](std::size_t i) {
    const detail::CaseSeeds seeds(cfg.seed, split_spec.seed, i);
    CaseResult& row = rep.cases[i];
    row.name = ft_files[i];
    try {
      std::ifstream in(ft_files[i]);
      if (!in) throw input_error("cannot open '" + ft_files[i] + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      const FaultTree ft = parse_galileo(buf.str());
      row.num_bes = static_cast<int>(ft.basic_events.size());
      row.num_gates = static_cast<int>(ft.gate_count());
      const Dataset data = sample_dataset(ft, records_per_case, seeds.sample);
      row.positive_observations = detail::positive_observations(data);
      row.low_positive_warning = row.positive_observations < 100;
      auto [train, test] = split(data, {split_spec.train_fraction, seeds.split});
      EaConfig c = cfg;
      c.seed = seeds.ea;
      detail::run_case(row, data, train, test, c);
    } catch (const parse_error& e) {
      row.error = e.what();
    } catch (const input_error& e) {
      row.error = e.what();
    } catch (const capacity_error& e) {
      row.error = e.what();
    }
  });
  detail::finalize_report(rep);
  return rep;
}

}  // namespace ftevolve
