#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "streamsum/linear_sketch.hpp"
#include "streamsum/space_saving.hpp"
#include "streamsum/types.hpp"

namespace streamsum {

// Anything that can absorb +/-1 updates and answer nonnegative point
// estimates can back a dyadic level.
class FrequencyEstimator {
 public:
  virtual ~FrequencyEstimator() = default;
  virtual void update(ItemId item, int weight) = 0;
  virtual std::int64_t query(ItemId item) const = 0;
  virtual std::uint64_t counters() const = 0;
  // Model-violating deletes absorbed so far (0 for randomized estimators).
  virtual std::uint64_t violations() const { return 0; }
};

class SpaceSavingEstimator final : public FrequencyEstimator {
 public:
  explicit SpaceSavingEstimator(SketchConfig config) : sketch_(config) {}
  void update(ItemId item, int weight) override { sketch_.update(item, weight); }
  std::int64_t query(ItemId item) const override { return sketch_.query(item); }
  std::uint64_t counters() const override { return sketch_.capacity(); }
  std::uint64_t violations() const override { return sketch_.violations(); }
  const SpaceSavingSketch& sketch() const { return sketch_; }

 private:
  SpaceSavingSketch sketch_;
};

class LinearEstimator final : public FrequencyEstimator {
 public:
  LinearEstimator(LinearKind kind, double epsilon, double delta, std::uint64_t seed)
      : sketch_(kind, epsilon, delta, seed) {}
  void update(ItemId item, int weight) override { sketch_.update(item, weight); }
  std::int64_t query(ItemId item) const override {
    return std::max<std::int64_t>(sketch_.query(item), 0);
  }
  std::uint64_t counters() const override { return sketch_.counters(); }
  const LinearSketch& sketch() const { return sketch_; }

 private:
  LinearSketch sketch_;
};

// Rank/quantile summary over the universe [0, 2^universe_bits): level h
// tracks the stream projected through x >> h, so any prefix [0, x) decomposes
// into at most one queried node per level. The top single-node level is
// dropped; a full-universe rank is answered from the exact net count
// instead, which is what that node would hold.
class DyadicSketch {
 public:
  using LevelFactory = std::function<std::unique_ptr<FrequencyEstimator>(int level)>;

  DyadicSketch(int universe_bits, const LevelFactory& make_level);

  // weight must be +1 or -1; pre: item < 2^universe_bits.
  void update(ItemId item, int weight);

  // Estimated number of stream items strictly below x; pre: x <= 2^bits.
  std::int64_t rank_less(ItemId x) const;
  // Estimated number of stream items <= x; pre: x < 2^bits.
  std::int64_t rank_leq(ItemId x) const { return rank_less(x + 1); }

  // Smallest x whose estimated rank_less(x + 1) reaches
  // max(1, ceil(q * (inserts - deletes))); q in [0, 1].
  ItemId quantile(double q) const;

  int universe_bits() const { return universe_bits_; }
  std::size_t level_count() const { return levels_.size(); }
  const FrequencyEstimator& level(std::size_t h) const { return *levels_[h]; }

  std::uint64_t inserted_total() const { return inserted_; }
  std::uint64_t deleted_total() const { return deleted_; }
  std::int64_t net_count() const {
    return static_cast<std::int64_t>(inserted_) - static_cast<std::int64_t>(deleted_);
  }
  std::uint64_t counters() const;
  std::uint64_t violations() const;

 private:
  int universe_bits_;
  std::vector<std::unique_ptr<FrequencyEstimator>> levels_;
  std::uint64_t inserted_ = 0;
  std::uint64_t deleted_ = 0;
};

// Deterministic rank sketch: one bounded-deletion ActiveDelete summary per
// level, each sized for a per-level budget of epsilon / universe_bits.
DyadicSketch make_dss(int universe_bits, double epsilon, double alpha);

// Randomized baseline: one CountMedian per level with per-level failure
// budget delta / universe_bits and the matching epsilon / universe_bits.
DyadicSketch make_dcs(int universe_bits, double epsilon, double delta,
                      std::uint64_t seed);

}  // namespace streamsum
