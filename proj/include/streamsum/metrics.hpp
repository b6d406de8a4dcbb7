#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamsum/stream.hpp"
#include "streamsum/types.hpp"

namespace streamsum {

// Mean squared frequency-estimation error over an evaluation set (by
// convention: the distinct items that appeared in the stream's insertions).
template <class QueryFn>
double mse(QueryFn&& query, const ExactCounter& oracle, std::span<const ItemId> items) {
  if (items.empty()) throw std::invalid_argument("mse: empty evaluation set");
  double acc = 0.0;
  for (ItemId item : items) {
    double diff = static_cast<double>(query(item)) - static_cast<double>(oracle.freq(item));
    acc += diff * diff;
  }
  return acc / static_cast<double>(items.size());
}

template <class QueryFn>
std::int64_t max_abs_error(QueryFn&& query, const ExactCounter& oracle,
                           std::span<const ItemId> items) {
  std::int64_t worst = 0;
  for (ItemId item : items)
    worst = std::max(worst, std::abs(query(item) - oracle.freq(item)));
  return worst;
}

// True heavy hitters: items with frequency >= phi * (inserts - deletes).
// Sorted by id.
std::vector<ItemId> frequent_items(const ExactCounter& oracle, double phi);

struct SetMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // Absent when the corresponding denominator set is empty.
  std::optional<double> recall;
  std::optional<double> precision;
};

// Both arguments sorted by id.
SetMetrics set_metrics(const std::vector<ItemId>& reported,
                       const std::vector<ItemId>& truth);

// Exact ranks from an oracle snapshot: prefix sums over the sorted distinct
// items, rank_less(x) = number of stream items strictly below x.
class RankOracle {
 public:
  explicit RankOracle(const ExactCounter& oracle);
  std::int64_t rank_less(ItemId x) const;
  std::int64_t total() const { return total_; }

 private:
  std::vector<ItemId> items_;        // sorted
  std::vector<std::int64_t> prefix_; // prefix_[i] = mass strictly below items_[i]
  std::int64_t total_ = 0;
};

// Evaluation grid for rank sweeps: every point of a small universe
// (universe_bits <= 16), otherwise 4096 evenly spaced points plus every
// distinct stream item.
std::vector<ItemId> rank_grid(int universe_bits, const ExactCounter& oracle);

// Kolmogorov-Smirnov style divergence: the largest absolute rank gap over
// the grid, normalized by the net stream size.
template <class RankFn>
double ks_divergence(RankFn&& rank_estimate, const RankOracle& oracle,
                     std::span<const ItemId> grid) {
  if (oracle.total() <= 0)
    throw std::invalid_argument("ks_divergence: empty stream");
  if (grid.empty()) throw std::invalid_argument("ks_divergence: empty grid");
  std::int64_t worst = 0;
  for (ItemId x : grid)
    worst = std::max(worst, std::abs(rank_estimate(x) - oracle.rank_less(x)));
  return static_cast<double>(worst) / static_cast<double>(oracle.total());
}

}  // namespace streamsum
