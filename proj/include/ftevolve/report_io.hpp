#pragma once

// CSV and JSON serialization for experiment reports.

#include <string>

#include <json.hpp>

#include "ftevolve/bench.hpp"
#include "ftevolve/fault_tree.hpp"

namespace ftevolve {

// One row per case.  Fitness curves and traces live in the JSON report.
inline std::string report_to_csv(const ExperimentReport& rep) {
  std::string out =
      "suite,name,num_bes,num_gates,noise_level,strategy,case_seed,train_fitness,"
      "test_accuracy,clean_accuracy,runtime_seconds,iterations,termination,"
      "positive_observations,low_positive_warning,error\n";
  for (const auto& c : rep.cases) {
    out += rep.suite;
    out += ',' + c.name;
    out += ',' + std::to_string(c.num_bes);
    out += ',' + std::to_string(c.num_gates);
    out += ',' + detail::format_double(c.noise_level);
    out += ',' + c.strategy;
    out += ',' + std::to_string(c.case_seed);
    if (c.error.empty()) {
      out += ',' + detail::format_double(c.train_fitness);
      out += ',' + detail::format_double(c.test_accuracy);
      out += ',' + detail::format_double(c.clean_accuracy);
      out += ',' + detail::format_double(c.runtime_seconds);
      out += ',' + std::to_string(c.iterations);
      out += ',';
      out += termination_name(c.termination);
    } else {
      out += ",,,,,,";
    }
    out += ',' + std::to_string(c.positive_observations);
    out += ',';
    out += c.low_positive_warning ? "1" : "0";
    out += ',';
    // Errors may contain commas; quote the cell.
    if (!c.error.empty()) {
      std::string quoted = "\"";
      for (char ch : c.error) {
        if (ch == '"') quoted += "\"\"";
        else quoted += ch;
      }
      quoted += '"';
      out += quoted;
    }
    out += '\n';
  }
  return out;
}

inline std::string report_to_json(const ExperimentReport& rep) {
  nlohmann::json doc;
  doc["suite"] = rep.suite;
  doc["seed"] = rep.seed;
  doc["cases"] = nlohmann::json::array();
  for (const auto& c : rep.cases) {
    nlohmann::json row;
    row["name"] = c.name;
    row["num_bes"] = c.num_bes;
    row["num_gates"] = c.num_gates;
    row["noise_level"] = c.noise_level;
    if (!c.strategy.empty()) row["strategy"] = c.strategy;
    row["case_seed"] = c.case_seed;
    if (c.error.empty()) {
      row["train_fitness"] = c.train_fitness;
      row["test_accuracy"] = c.test_accuracy;
      row["clean_accuracy"] = c.clean_accuracy;
      row["runtime_seconds"] = c.runtime_seconds;
      row["iterations"] = c.iterations;
      row["termination"] = termination_name(c.termination);
      row["best_fitness_curve"] = c.best_fitness_curve;
    } else {
      row["error"] = c.error;
    }
    row["positive_observations"] = c.positive_observations;
    row["low_positive_warning"] = c.low_positive_warning;
    doc["cases"].push_back(std::move(row));
  }
  nlohmann::json agg;
  if (!rep.mean_test_accuracy_by_bes.empty()) {
    nlohmann::json m;
    for (const auto& [bes, acc] : rep.mean_test_accuracy_by_bes)
      m[std::to_string(bes)] = acc;
    agg["mean_test_accuracy_by_bes"] = std::move(m);
  }
  if (!rep.mean_clean_accuracy_by_noise.empty()) {
    nlohmann::json m;
    for (const auto& [lvl, acc] : rep.mean_clean_accuracy_by_noise)
      m[detail::format_double(lvl)] = acc;
    agg["mean_clean_accuracy_by_noise"] = std::move(m);
  }
  if (!rep.median_test_accuracy_by_strategy.empty()) {
    nlohmann::json m;
    for (const auto& [name, acc] : rep.median_test_accuracy_by_strategy) m[name] = acc;
    agg["median_test_accuracy_by_strategy"] = std::move(m);
  }
  agg["mean_runtime_seconds"] = rep.mean_runtime_seconds;
  doc["aggregates"] = std::move(agg);
  return doc.dump(2) + "\n";
}

}  // namespace ftevolve
