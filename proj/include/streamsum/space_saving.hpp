#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "streamsum/dual_heap_index.hpp"
#include "streamsum/types.hpp"

namespace streamsum {

// How deletions are handled.
//   InsertOnly   - classic counter replacement, deletes are rejected.
//   LazyDelete   - monitored deletes decrement the counter, unmonitored
//                  deletes are ignored.
//   ActiveDelete - monitored deletes decrement the counter; an unmonitored
//                  delete walks the charge off the largest-error entry,
//                  shrinking both its count and its error.
enum class SketchPolicy { InsertOnly, LazyDelete, ActiveDelete };

const char* to_string(SketchPolicy policy);

// Counters needed for the additive guarantee epsilon * (inserts - deletes)
// under deletion budget alpha (deletes <= (1 - 1/alpha) * inserts):
// InsertOnly and LazyDelete need ceil(alpha/epsilon) (alpha is pinned to 1
// for InsertOnly), ActiveDelete needs ceil(2*alpha/epsilon).
std::size_t capacity_for(double epsilon, double alpha, SketchPolicy policy);

struct SketchConfig {
  double epsilon = 0.01;
  double alpha = 1.0;
  SketchPolicy policy = SketchPolicy::InsertOnly;
  // 0 means "derive from (epsilon, alpha, policy)". An explicit value
  // overrides the formula, e.g. for space-matched comparisons.
  std::size_t capacity = 0;
  // In strict mode a detectable model violation throws ModelViolationError;
  // otherwise the delete is skipped and counted in violations().
  bool strict = false;
};

// Deterministic frequency/heavy-hitter summary over a bounded-deletion
// stream. Single writer; no internal synchronization.
class SpaceSavingSketch {
 public:
  explicit SpaceSavingSketch(SketchConfig config);

  void insert(ItemId item);
  void erase(ItemId item);
  // weight must be +1 (insert) or -1 (erase).
  void update(ItemId item, int weight);

  // Clamped point estimate: max(count, 0) for monitored items, 0 otherwise.
  std::int64_t query(ItemId item) const;

  // Raw entry (unclamped count) or nullptr when unmonitored.
  const CounterEntry* raw_entry(ItemId item) const { return index_.find(item); }

  std::int64_t min_count() const { return index_.min_count(); }
  std::int64_t max_error() const { return index_.max_error(); }

  // Entries with a positive clamped estimate, sorted by item id.
  std::vector<std::pair<ItemId, std::int64_t>> report_positive() const;
  // Entries with clamped estimate >= phi * (inserts - deletes), sorted by
  // item id. A degenerate threshold (<= 0) falls back to report_positive().
  std::vector<std::pair<ItemId, std::int64_t>> report_threshold(double phi) const;

  std::uint64_t inserted_total() const { return inserted_; }
  std::uint64_t deleted_total() const { return deleted_; }
  // Model-violating deletes absorbed in permissive mode.
  std::uint64_t violations() const { return violations_; }

  std::size_t size() const { return index_.size(); }
  std::size_t capacity() const { return index_.capacity(); }
  const SketchConfig& config() const { return config_; }
  const DualHeapIndex& index() const { return index_; }

  // Whether the configured capacity meets the guarantee formula.
  bool guarantee_grade() const;

  // Line-oriented dump "item,count,error", sorted by item id.
  void dump(std::ostream& out) const;

 private:
  void flag_violation(const char* what);

  SketchConfig config_;
  DualHeapIndex index_;
  std::uint64_t inserted_ = 0;
  std::uint64_t deleted_ = 0;
  std::uint64_t violations_ = 0;
};

}  // namespace streamsum
