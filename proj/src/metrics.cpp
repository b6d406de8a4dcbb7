#include "streamsum/metrics.hpp"

#include <algorithm>

namespace streamsum {

std::vector<ItemId> frequent_items(const ExactCounter& oracle, double phi) {
  double threshold = phi * static_cast<double>(oracle.f1());
  std::vector<ItemId> out;
  for (const auto& [item, count] : oracle.counts())
    if (count > 0 && static_cast<double>(count) >= threshold - 1e-9)
      out.push_back(item);
  std::sort(out.begin(), out.end());
  return out;
}

SetMetrics set_metrics(const std::vector<ItemId>& reported,
                       const std::vector<ItemId>& truth) {
  SetMetrics m;
  std::size_t i = 0, j = 0;
  while (i < reported.size() && j < truth.size()) {
    if (reported[i] == truth[j]) {
      ++m.tp;
      ++i;
      ++j;
    } else if (reported[i] < truth[j]) {
      ++m.fp;
      ++i;
    } else {
      ++m.fn;
      ++j;
    }
  }
  m.fp += reported.size() - i;
  m.fn += truth.size() - j;
  if (!truth.empty())
    m.recall = static_cast<double>(m.tp) / static_cast<double>(truth.size());
  if (!reported.empty())
    m.precision = static_cast<double>(m.tp) / static_cast<double>(reported.size());
  return m;
}

RankOracle::RankOracle(const ExactCounter& oracle) {
  for (const auto& [item, count] : oracle.counts())
    if (count > 0) items_.push_back(item);
  std::sort(items_.begin(), items_.end());
  prefix_.resize(items_.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    prefix_[i] = acc;
    acc += oracle.freq(items_[i]);
  }
  total_ = acc;
}

std::int64_t RankOracle::rank_less(ItemId x) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), x);
  if (it == items_.end()) return total_;
  return prefix_[static_cast<std::size_t>(it - items_.begin())];
}

std::vector<ItemId> rank_grid(int universe_bits, const ExactCounter& oracle) {
  std::vector<ItemId> grid;
  if (universe_bits <= 16) {
    ItemId universe = ItemId{1} << universe_bits;
    grid.reserve(universe + 1);
    for (ItemId x = 0; x <= universe; ++x) grid.push_back(x);
    return grid;
  }
  ItemId universe = universe_bits >= 64 ? ~ItemId{0} : (ItemId{1} << universe_bits);
  ItemId step = universe / 4096;
  for (ItemId x = 0; x < universe; x += step) grid.push_back(x);
  grid.push_back(universe);
  for (ItemId item : oracle.distinct_items()) grid.push_back(item);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace streamsum
