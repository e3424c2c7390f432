#pragma once

// Labeled boolean failure data.  A dataset is a multiset of observations
// over a fixed variable list; one variable is the observed top event.
// Records are kept merged (distinct value rows with multiplicities) and
// sorted, so equal datasets compare equal structurally.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"
#include "ftevolve/rng.hpp"

namespace ftevolve {

struct Record {
  std::vector<std::uint8_t> values;  // parallel to Dataset::variables, 0 or 1
  std::int64_t count = 1;

  friend bool operator==(const Record&, const Record&) = default;
};

struct Dataset {
  std::vector<std::string> variables;
  std::string top_variable;
  std::vector<Record> records;  // sorted by values, one row per distinct valuation

  std::size_t var_index(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i] == name) return i;
    throw input_error("unknown variable '" + name + "'");
  }

  std::int64_t total_observations() const {
    std::int64_t n = 0;
    for (const auto& r : records) n += r.count;
    return n;
  }

  std::size_t top_index() const { return var_index(top_variable); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Canonicalizes raw rows into a Dataset: merges duplicate valuations and
// sorts.  Rejects inconsistent row widths and non-positive counts.
inline Dataset make_dataset(std::vector<std::string> variables, std::string top_variable,
                            std::vector<Record> rows) {
  Dataset d;
  d.variables = std::move(variables);
  d.top_variable = std::move(top_variable);
  if (d.variables.empty()) throw input_error("dataset has no variables");
  {
    std::vector<std::string> names = d.variables;
    std::sort(names.begin(), names.end());
    auto dup = std::adjacent_find(names.begin(), names.end());
    if (dup != names.end()) throw input_error("duplicate variable '" + *dup + "'");
  }
  d.var_index(d.top_variable);  // throws when the top variable is missing

  std::map<std::vector<std::uint8_t>, std::int64_t> merged;
  for (auto& r : rows) {
    if (r.values.size() != d.variables.size())
      throw input_error("row width " + std::to_string(r.values.size()) + " does not match " +
                        std::to_string(d.variables.size()) + " variables");
    if (r.count <= 0) throw input_error("non-positive observation count");
    for (std::uint8_t v : r.values)
      if (v > 1) throw input_error("record values must be 0 or 1");
    merged[std::move(r.values)] += r.count;
  }
  if (merged.empty()) throw input_error("dataset has no observations");
  d.records.reserve(merged.size());
  for (auto& [values, count] : merged) d.records.push_back({values, count});
  return d;
}

// ---------------------------------------------------------------------------
// CSV

// Comma-separated values: a header of variable names, optionally ending in a
// literal `count` column, then one row of 0/1 cells (and a positive count)
// per line.  Rows with equal valuations are merged on load.
inline Dataset load_csv(std::string_view text, const std::string& top_variable) {
  auto split_line = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string cell(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start));
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(std::move(cell));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };

  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \r\t") == std::string::npos)
    lines.pop_back();
  if (lines.empty()) throw input_error("empty dataset");

  std::vector<std::string> header = split_line(lines[0]);
  bool has_count = !header.empty() && header.back() == "count";
  if (has_count) header.pop_back();
  if (header.empty()) throw input_error("header defines no variables");
  for (const auto& name : header)
    if (!detail::valid_name(name)) throw input_error("invalid variable name '" + name + "'");

  std::vector<Record> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].find_first_not_of(" \r\t") == std::string::npos) continue;
    std::vector<std::string> cells = split_line(lines[li]);
    const std::size_t expect = header.size() + (has_count ? 1 : 0);
    if (cells.size() != expect)
      throw input_error("line " + std::to_string(li + 1) + ": expected " +
                        std::to_string(expect) + " cells, found " + std::to_string(cells.size()));
    Record r;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (cells[i] == "0")
        r.values.push_back(0);
      else if (cells[i] == "1")
        r.values.push_back(1);
      else
        throw input_error("line " + std::to_string(li + 1) + ": cell value \"" + cells[i] +
                          "\" is not 0 or 1");
    }
    if (has_count) {
      const std::string& c = cells.back();
      bool digits = !c.empty() && c.find_first_not_of("0123456789") == std::string::npos;
      if (!digits)
        throw input_error("line " + std::to_string(li + 1) + ": count \"" + c +
                          "\" is not a positive integer");
      r.count = std::strtoll(c.c_str(), nullptr, 10);
      if (r.count <= 0)
        throw input_error("line " + std::to_string(li + 1) + ": count must be positive");
    }
    rows.push_back(std::move(r));
  }
  return make_dataset(std::move(header), top_variable, std::move(rows));
}

// Always writes the count column, so save/load round-trips exactly.
inline std::string save_csv(const Dataset& d) {
  std::string out;
  for (const auto& v : d.variables) {
    out += v;
    out += ',';
  }
  out += "count\n";
  for (const auto& r : d.records) {
    for (std::uint8_t v : r.values) {
      out += v ? '1' : '0';
      out += ',';
    }
    out += std::to_string(r.count);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and noise

struct SplitSpec {
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 1;
};

// Seeded split over distinct records: ceil(train_fraction * n) of the
// shuffled records form the training set, the rest the test set.  Counts
// travel with their record, so total observations are preserved.
inline std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw input_error("train_fraction must lie strictly between 0 and 1");
  const std::size_t n = d.records.size();
  if (n < 2) throw input_error("need at least two distinct records to split");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  rng.shuffle(order);

  const auto train_n =
      static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(n)));
  std::vector<Record> train_rows, test_rows;
  for (std::size_t i = 0; i < n; ++i)
    (i < train_n ? train_rows : test_rows).push_back(d.records[order[i]]);

  Dataset train = make_dataset(d.variables, d.top_variable, std::move(train_rows));
  Dataset test;
  if (test_rows.empty()) {
    test.variables = d.variables;
    test.top_variable = d.top_variable;
  } else {
    test = make_dataset(d.variables, d.top_variable, std::move(test_rows));
  }
  return {std::move(train), std::move(test)};
}

// Corrupts round(fraction * total) observations, chosen uniformly without
// replacement; each corrupted observation gets exactly one uniformly chosen
// variable flipped (the top variable included).  Total count is unchanged.
inline Dataset inject_noise(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw input_error("noise fraction must lie in [0,1]");
  const std::int64_t total = d.total_observations();
  std::int64_t remaining = std::llround(fraction * static_cast<double>(total));
  if (remaining == 0) return d;

  Rng rng(seed);
  const std::size_t width = d.variables.size();
  std::vector<Record> rows;
  std::int64_t left = total;
  for (const auto& r : d.records) {
    std::int64_t keep = r.count;
    for (std::int64_t s = 0; s < r.count; ++s) {
      // Sequential sampling: select this slot with probability remaining/left.
      if (remaining > 0 && rng.below(static_cast<std::uint64_t>(left)) <
                               static_cast<std::uint64_t>(remaining)) {
        Record noisy;
        noisy.values = r.values;
        noisy.values[rng.index(width)] ^= 1;
        noisy.count = 1;
        rows.push_back(std::move(noisy));
        --keep;
        --remaining;
      }
      --left;
    }
    if (keep > 0) rows.push_back({r.values, keep});
  }
  return make_dataset(d.variables, d.top_variable, std::move(rows));
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

// One record per assignment of the tree's basic events, labeled by the tree.
// Variables are the sorted basic events followed by the top variable.
// Capped at 20 basic events.
inline Dataset full_truth_table(const FaultTree& ft) {
  const std::size_t n = ft.basic_events.size();
  if (n == 0) throw input_error("tree has no basic events");
  if (n > 20)
    throw capacity_error("truth table over " + std::to_string(n) +
                         " basic events exceeds the 20-variable cap");

  if (ft.is_basic_event(ft.top))
    throw input_error("top '" + ft.top + "' is also a basic event");

  Dataset d;
  d.variables.assign(ft.basic_events.begin(), ft.basic_events.end());
  d.variables.push_back(ft.top);
  d.top_variable = ft.top;

  detail::CompiledTree eval(ft, detail::index_basic_events(ft));
  const std::uint64_t rows = std::uint64_t{1} << n;
  d.records.reserve(rows);
  std::vector<std::uint8_t> vals(n);
  for (std::uint64_t idx = 0; idx < rows; ++idx) {
    // High bit first, so emitted records are already in canonical order.
    for (std::size_t j = 0; j < n; ++j) vals[j] = (idx >> (n - 1 - j)) & 1;
    Record r;
    r.values = vals;
    r.values.push_back(eval.eval(vals.data()) ? 1 : 0);
    r.count = 1;
    d.records.push_back(std::move(r));
  }
  return d;
}

}  // namespace ftevolve
