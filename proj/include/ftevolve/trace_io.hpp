#pragma once

// Serialization of run traces: a flat CSV for plotting and a JSON document
// that round-trips everything except recorded individuals.

#include <string>
#include <vector>

#include <json.hpp>

#include "ftevolve/engine.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/individual.hpp"

namespace ftevolve {

inline Origin origin_from_name(const std::string& name) {
  for (Origin o : kAllOrigins)
    if (name == origin_name(o)) return o;
  throw input_error("unknown origin '" + name + "'");
}

// One row per iteration; survivor counts get one column per origin.
inline std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "iteration,best_fitness,mean_fitness,population";
  for (Origin o : kAllOrigins) {
    out += ",survivors_";
    out += origin_name(o);
  }
  out += '\n';
  for (const auto& st : trace.iterations) {
    out += std::to_string(st.iteration);
    out += ',' + detail::format_double(st.best_fitness);
    out += ',' + detail::format_double(st.mean_fitness);
    out += ',' + std::to_string(st.population_size);
    for (Origin o : kAllOrigins) out += ',' + std::to_string(st.survivor_counts.at(o));
    out += '\n';
  }
  return out;
}

inline std::string trace_to_json(const RunTrace& trace) {
  nlohmann::json doc;
  doc["iterations"] = nlohmann::json::array();
  for (const auto& st : trace.iterations) {
    nlohmann::json row;
    row["iteration"] = st.iteration;
    row["best_fitness"] = st.best_fitness;
    row["mean_fitness"] = st.mean_fitness;
    row["population"] = st.population_size;
    nlohmann::json survivors;
    for (Origin o : kAllOrigins) survivors[origin_name(o)] = st.survivor_counts.at(o);
    row["survivors"] = std::move(survivors);
    nlohmann::json origins = nlohmann::json::array();
    for (Origin o : st.selected_origins) origins.push_back(origin_name(o));
    row["selected_origins"] = std::move(origins);
    doc["iterations"].push_back(std::move(row));
  }
  doc["termination"] = {{"reason", termination_name(trace.termination)},
                        {"iterations", trace.iterations_run},
                        {"wall_seconds", trace.wall_seconds}};
  return doc.dump(2) + "\n";
}

// Rebuilds a trace from trace_to_json output.  Recorded individuals are not
// serialized, so they do not survive the round trip.
inline RunTrace trace_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error(std::string("malformed trace JSON: ") + e.what());
  }
  RunTrace trace;
  try {
    for (const auto& row : doc.at("iterations")) {
      IterationStats st;
      st.iteration = row.at("iteration").get<int>();
      st.best_fitness = row.at("best_fitness").get<double>();
      st.mean_fitness = row.at("mean_fitness").get<double>();
      st.population_size = row.at("population").get<int>();
      for (Origin o : kAllOrigins) st.survivor_counts[o] = 0;
      for (const auto& [key, value] : row.at("survivors").items())
        st.survivor_counts[origin_from_name(key)] = value.get<int>();
      for (const auto& name : row.at("selected_origins"))
        st.selected_origins.push_back(origin_from_name(name.get<std::string>()));
      trace.iterations.push_back(std::move(st));
    }
    const auto& term = doc.at("termination");
    trace.termination = termination_from_name(term.at("reason").get<std::string>());
    trace.iterations_run = term.at("iterations").get<int>();
    trace.wall_seconds = term.at("wall_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("malformed trace JSON: ") + e.what());
  }
  return trace;
}

// The operator-by-iteration survivor table as CSV, one row per origin.
inline std::string survival_stats_to_csv(const RunTrace& trace) {
  const auto table = operator_survival_stats(trace);
  std::string out = "operator";
  for (const auto& st : trace.iterations) out += ',' + std::to_string(st.iteration);
  out += '\n';
  for (Origin o : kAllOrigins) {
    out += origin_name(o);
    for (int n : table.at(o)) out += ',' + std::to_string(n);
    out += '\n';
  }
  return out;
}

}  // namespace ftevolve
