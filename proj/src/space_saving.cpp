#include "streamsum/space_saving.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "streamsum/errors.hpp"
#include "streamsum/numeric_util.hpp"

namespace streamsum {

const char* to_string(SketchPolicy policy) {
  switch (policy) {
    case SketchPolicy::InsertOnly: return "insert_only";
    case SketchPolicy::LazyDelete: return "lazy_delete";
    case SketchPolicy::ActiveDelete: return "active_delete";
  }
  return "unknown";
}

std::size_t capacity_for(double epsilon, double alpha, SketchPolicy policy) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("capacity_for: epsilon must be in (0, 1]");
  if (!(alpha >= 1.0))
    throw std::invalid_argument("capacity_for: alpha must be >= 1");
  if (policy == SketchPolicy::InsertOnly) alpha = 1.0;
  double counters = policy == SketchPolicy::ActiveDelete ? 2.0 * alpha / epsilon
                                                         : alpha / epsilon;
  return static_cast<std::size_t>(ceil_snap(counters));
}

SpaceSavingSketch::SpaceSavingSketch(SketchConfig config)
    : config_(config),
      index_(config.capacity != 0
                 ? config.capacity
                 : capacity_for(config.epsilon, config.alpha, config.policy)) {
  if (config_.policy == SketchPolicy::InsertOnly) config_.alpha = 1.0;
  if (config_.capacity == 0) config_.capacity = index_.capacity();
}

bool SpaceSavingSketch::guarantee_grade() const {
  return index_.capacity() >=
         capacity_for(config_.epsilon, config_.alpha, config_.policy);
}

void SpaceSavingSketch::insert(ItemId item) {
  ++inserted_;
  if (index_.contains(item)) {
    index_.adjust(item, +1, 0);
  } else if (!index_.full()) {
    index_.insert_new(item);
  } else {
    index_.replace_min(item);
  }
}

void SpaceSavingSketch::flag_violation(const char* what) {
  if (config_.strict) throw ModelViolationError(what);
  ++violations_;
  ++deleted_;
}

void SpaceSavingSketch::erase(ItemId item) {
  if (config_.policy == SketchPolicy::InsertOnly)
    throw std::logic_error("SpaceSavingSketch::erase: insert-only sketch");
  if (index_.contains(item)) {
    ++deleted_;
    index_.adjust(item, -1, 0);
    return;
  }
  // A non-full sketch still monitors everything it has ever absorbed, so an
  // unmonitored item here was never inserted at all.
  if (!index_.full()) {
    flag_violation("delete of an item never inserted (sketch not full)");
    return;
  }
  if (config_.policy == SketchPolicy::LazyDelete) {
    ++deleted_;
    return;
  }
  // ActiveDelete: charge the delete to the entry with the most slack. Zero
  // slack is impossible under valid input, because a deletable unmonitored
  // item forces the summed error to be at least its remaining frequency.
  if (index_.max_error() == 0) {
    flag_violation("unmonitored delete with zero max error");
    return;
  }
  ++deleted_;
  index_.adjust(index_.max_error_item(), -1, -1);
}

void SpaceSavingSketch::update(ItemId item, int weight) {
  if (weight == 1) {
    insert(item);
  } else if (weight == -1) {
    erase(item);
  } else {
    throw std::invalid_argument("SpaceSavingSketch::update: weight must be +1 or -1");
  }
}

std::int64_t SpaceSavingSketch::query(ItemId item) const {
  const CounterEntry* e = index_.find(item);
  return e == nullptr ? 0 : std::max<std::int64_t>(e->count, 0);
}

std::vector<std::pair<ItemId, std::int64_t>> SpaceSavingSketch::report_positive() const {
  std::vector<std::pair<ItemId, std::int64_t>> out;
  for (const CounterEntry& e : index_.entries())
    if (e.count > 0) out.emplace_back(e.item, e.count);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<ItemId, std::int64_t>> SpaceSavingSketch::report_threshold(double phi) const {
  double net = static_cast<double>(inserted_) - static_cast<double>(deleted_);
  double threshold = phi * net;
  if (threshold <= 0.0) return report_positive();
  std::vector<std::pair<ItemId, std::int64_t>> out;
  for (const CounterEntry& e : index_.entries()) {
    std::int64_t estimate = std::max<std::int64_t>(e.count, 0);
    // The 1e-9 pad keeps integral thresholds from drifting above themselves
    // in floating point (e.g. phi=0.1 over 10 items must admit estimate 1).
    if (estimate > 0 && static_cast<double>(estimate) >= threshold - 1e-9)
      out.emplace_back(e.item, estimate);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SpaceSavingSketch::dump(std::ostream& out) const {
  auto entries = index_.entries();
  std::vector<CounterEntry> sorted(entries.begin(), entries.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CounterEntry& a, const CounterEntry& b) { return a.item < b.item; });
  for (const CounterEntry& e : sorted)
    out << e.item << ',' << e.count << ',' << e.error << '\n';
}

}  // namespace streamsum
