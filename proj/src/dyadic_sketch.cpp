#include "streamsum/dyadic_sketch.hpp"

#include <algorithm>
#include <stdexcept>

#include "streamsum/counter_rng.hpp"
#include "streamsum/numeric_util.hpp"

namespace streamsum {

DyadicSketch::DyadicSketch(int universe_bits, const LevelFactory& make_level)
    : universe_bits_(universe_bits) {
  if (universe_bits < 1 || universe_bits > 63)
    throw std::invalid_argument("DyadicSketch: universe_bits must be in [1, 63]");
  levels_.reserve(universe_bits);
  for (int h = 0; h < universe_bits; ++h) levels_.push_back(make_level(h));
}

void DyadicSketch::update(ItemId item, int weight) {
  if (weight != 1 && weight != -1)
    throw std::invalid_argument("DyadicSketch::update: weight must be +1 or -1");
  if (universe_bits_ < 64 && (item >> universe_bits_) != 0)
    throw std::out_of_range("DyadicSketch::update: item outside universe");
  for (int h = 0; h < universe_bits_; ++h) levels_[h]->update(item >> h, weight);
  if (weight == 1)
    ++inserted_;
  else
    ++deleted_;
}

std::int64_t DyadicSketch::rank_less(ItemId x) const {
  const ItemId universe = ItemId{1} << universe_bits_;
  if (x > universe)
    throw std::out_of_range("DyadicSketch::rank_less: point outside universe");
  // The whole universe is the single node of the omitted top level, whose
  // count is exactly the net stream size.
  if (x == universe) return std::max<std::int64_t>(net_count(), 0);
  std::int64_t rank = 0;
  ItemId y = x;
  for (int h = 0; h < universe_bits_; ++h) {
    // When y is odd, its left sibling's subtree [y-1 << h, y << h) lies
    // entirely inside [0, x): charge one node query at this level.
    if (y & 1) rank += levels_[h]->query(y - 1);
    y >>= 1;
  }
  return rank;
}

ItemId DyadicSketch::quantile(double q) const {
  if (!(q >= 0.0) || q > 1.0)
    throw std::invalid_argument("DyadicSketch::quantile: q must be in [0, 1]");
  std::int64_t net = net_count();
  if (net <= 0) throw std::out_of_range("DyadicSketch::quantile: empty sketch");
  std::int64_t target = std::max<std::int64_t>(1, ceil_snap(q * static_cast<double>(net)));
  ItemId lo = 0;
  ItemId hi = (ItemId{1} << universe_bits_) - 1;
  while (lo < hi) {
    ItemId mid = lo + (hi - lo) / 2;
    if (rank_less(mid + 1) >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::uint64_t DyadicSketch::counters() const {
  std::uint64_t total = 0;
  for (const auto& level : levels_) total += level->counters();
  return total;
}

std::uint64_t DyadicSketch::violations() const {
  std::uint64_t total = 0;
  for (const auto& level : levels_) total += level->violations();
  return total;
}

DyadicSketch make_dss(int universe_bits, double epsilon, double alpha) {
  double level_epsilon = epsilon / universe_bits;
  return DyadicSketch(universe_bits, [&](int) {
    SketchConfig cfg;
    cfg.epsilon = level_epsilon;
    cfg.alpha = alpha;
    cfg.policy = SketchPolicy::ActiveDelete;
    return std::make_unique<SpaceSavingEstimator>(cfg);
  });
}

DyadicSketch make_dcs(int universe_bits, double epsilon, double delta,
                      std::uint64_t seed) {
  double level_epsilon = epsilon / universe_bits;
  double level_delta = delta / universe_bits;
  return DyadicSketch(universe_bits, [&](int level) {
    return std::make_unique<LinearEstimator>(LinearKind::CountMedian, level_epsilon,
                                             level_delta, mix_seed(seed, level));
  });
}

}  // namespace streamsum
