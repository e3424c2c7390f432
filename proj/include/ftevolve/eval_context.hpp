#pragma once

// Count-weighted accuracy of a fault tree against a dataset: the fraction
// of observations whose recorded top value matches the tree's prediction.
// Record valuations are packed into 64-bit columns once, so evaluating a
// candidate tree costs a few word operations per gate input; this is the
// hot path of the search loop.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ftevolve/dataset.hpp"
#include "ftevolve/errors.hpp"
#include "ftevolve/fault_tree.hpp"

namespace ftevolve {

class EvalContext {
 public:
  explicit EvalContext(const Dataset& d)
      : records_(d.records.size()),
        words_((d.records.size() + 63) / 64),
        total_(d.total_observations()) {
    for (std::size_t i = 0; i < d.variables.size(); ++i) index_[d.variables[i]] = i;
    columns_.assign(d.variables.size(), std::vector<std::uint64_t>(words_, 0));
    counts_.reserve(records_);
    for (std::size_t r = 0; r < records_; ++r) {
      const Record& rec = d.records[r];
      counts_.push_back(rec.count);
      for (std::size_t v = 0; v < rec.values.size(); ++v)
        if (rec.values[v]) columns_[v][r >> 6] |= std::uint64_t{1} << (r & 63);
    }
    top_ = index_.at(d.top_variable);
    tail_mask_ = (records_ & 63) ? ((std::uint64_t{1} << (records_ & 63)) - 1) : ~std::uint64_t{0};
  }

  std::int64_t total_observations() const { return total_; }

  // Safe to call concurrently: all state is read-only after construction.
  double fitness(const FaultTree& ft) const {
    const std::vector<NodeId> order = topological_order(ft);
    std::map<NodeId, std::size_t> slot;
    std::vector<std::uint64_t> buf(order.size() * words_, 0);
    for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;

    std::vector<const std::uint64_t*> src;
    for (const NodeId& id : order) {
      const Gate& g = ft.gates.at(id);
      std::uint64_t* dst = buf.data() + slot.at(id) * words_;
      src.clear();
      for (const NodeId& in : g.inputs) {
        if (ft.is_gate(in)) {
          src.push_back(buf.data() + slot.at(in) * words_);
        } else {
          auto it = index_.find(in);
          if (it == index_.end())
            throw input_error("basic event '" + in + "' is not a dataset variable");
          src.push_back(columns_[it->second].data());
        }
      }
      if (src.empty()) continue;  // empty gate stays all-false
      if (src.size() == 1) {
        for (std::size_t w = 0; w < words_; ++w) dst[w] = src[0][w];
      } else if (g.kind.op == GateOp::And) {
        for (std::size_t w = 0; w < words_; ++w) dst[w] = src[0][w];
        for (std::size_t i = 1; i < src.size(); ++i)
          for (std::size_t w = 0; w < words_; ++w) dst[w] &= src[i][w];
      } else if (g.kind.op == GateOp::Or) {
        for (std::size_t w = 0; w < words_; ++w) dst[w] = src[0][w];
        for (std::size_t i = 1; i < src.size(); ++i)
          for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[i][w];
      } else {
        // At-least-k: dp[j] marks records with >= j true inputs so far.
        const int k = std::max(g.kind.k, 0);
        std::vector<std::uint64_t> dp(static_cast<std::size_t>(k) + 1);
        for (std::size_t w = 0; w < words_; ++w) {
          dp.assign(dp.size(), 0);
          dp[0] = ~std::uint64_t{0};
          for (const std::uint64_t* s : src) {
            const std::uint64_t x = s[w];
            for (int j = k; j >= 1; --j) dp[j] |= dp[j - 1] & x;
          }
          dst[w] = dp[static_cast<std::size_t>(k)];
        }
      }
    }

    const std::uint64_t* pred = buf.data() + slot.at(ft.top) * words_;
    const std::uint64_t* actual = columns_[top_].data();
    std::int64_t wrong = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t diff = pred[w] ^ actual[w];
      if (w + 1 == words_) diff &= tail_mask_;
      while (diff) {
        const int bit = std::countr_zero(diff);
        wrong += counts_[(w << 6) + static_cast<std::size_t>(bit)];
        diff &= diff - 1;
      }
    }
    return static_cast<double>(total_ - wrong) / static_cast<double>(total_);
  }

 private:
  std::size_t records_;
  std::size_t words_;
  std::int64_t total_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::uint64_t>> columns_;
  std::vector<std::int64_t> counts_;
  std::size_t top_ = 0;
  std::uint64_t tail_mask_ = 0;
};

// One-shot convenience wrapper; builds the packed columns per call.
inline double fitness(const FaultTree& ft, const Dataset& d) {
  return EvalContext(d).fitness(ft);
}

}  // namespace ftevolve
