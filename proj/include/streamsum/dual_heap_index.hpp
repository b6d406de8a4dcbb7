#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "streamsum/types.hpp"

namespace streamsum {

// One monitored counter: the item, its estimated count, and the maximum
// possible overestimation picked up when the counter changed hands.
struct CounterEntry {
  ItemId item = 0;
  std::int64_t count = 0;
  std::int64_t error = 0;
};

// Fixed-capacity entry store indexed three ways at once: a min-heap keyed on
// count, a max-heap keyed on error, and an item -> slot dictionary. Either
// heap root is readable in O(1); any entry mutation re-sifts both heaps in
// O(log capacity). Entries live in stable slots, the heaps hold slot numbers,
// and per-slot position arrays make the heap indices addressable from the
// dictionary side.
class DualHeapIndex {
 public:
  explicit DualHeapIndex(std::size_t capacity);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return entries_.size() == capacity_; }
  bool contains(ItemId item) const { return slot_of_.count(item) != 0; }

  // nullptr when the item is unmonitored. The pointer is invalidated by the
  // next mutating call.
  const CounterEntry* find(ItemId item) const;

  // All monitored entries in slot order (arrival order, stable).
  std::span<const CounterEntry> entries() const { return entries_; }

  // Start monitoring a new item as (item, 1, 0). Pre: not full, unmonitored.
  void insert_new(ItemId item);

  // Apply (count_delta, error_delta) to a monitored item and re-sift.
  void adjust(ItemId item, std::int64_t count_delta, std::int64_t error_delta);

  // Overwrite the min-count root with (new_item, min_count + 1, min_count),
  // evicting whichever entry held the root. Pre: full, new_item unmonitored.
  void replace_min(ItemId new_item);

  std::int64_t min_count() const;
  ItemId min_count_item() const;
  std::int64_t max_error() const;
  ItemId max_error_item() const;

  // Full structural audit: both heap orders, heap/position array inverses,
  // and dictionary agreement. Throws std::logic_error on the first breach.
  // O(capacity); meant for tests and debug builds, not the hot path.
  void check_consistency() const;

 private:
  using Slot = std::uint32_t;

  void sift_count(std::size_t pos);
  void sift_error(std::size_t pos);

  std::size_t capacity_;
  std::vector<CounterEntry> entries_;
  std::vector<Slot> count_heap_;  // slot ids, min element at the root
  std::vector<Slot> error_heap_;  // slot ids, max element at the root
  std::vector<Slot> count_pos_;   // slot -> index in count_heap_
  std::vector<Slot> error_pos_;   // slot -> index in error_heap_
  std::unordered_map<ItemId, Slot> slot_of_;
};

}  // namespace streamsum
