#include "streamsum/dual_heap_index.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace streamsum {

namespace {

// Sift the node at `pos` both ways; `before(a, b)` says slot a belongs nearer
// the root than slot b. Covers increases and decreases with one call.
template <class Before>
void sift(std::vector<std::uint32_t>& heap, std::vector<std::uint32_t>& pos,
          std::size_t i, Before before) {
  auto swap_nodes = [&](std::size_t a, std::size_t b) {
    std::swap(heap[a], heap[b]);
    pos[heap[a]] = static_cast<std::uint32_t>(a);
    pos[heap[b]] = static_cast<std::uint32_t>(b);
  };
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!before(heap[i], heap[parent])) break;
    swap_nodes(i, parent);
    i = parent;
  }
  for (;;) {
    std::size_t l = 2 * i + 1;
    std::size_t r = 2 * i + 2;
    std::size_t best = i;
    if (l < heap.size() && before(heap[l], heap[best])) best = l;
    if (r < heap.size() && before(heap[r], heap[best])) best = r;
    if (best == i) break;
    swap_nodes(i, best);
    i = best;
  }
}

}  // namespace

DualHeapIndex::DualHeapIndex(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("DualHeapIndex: capacity must be positive");
  entries_.reserve(capacity);
  count_heap_.reserve(capacity);
  error_heap_.reserve(capacity);
  count_pos_.reserve(capacity);
  error_pos_.reserve(capacity);
  slot_of_.reserve(capacity);
}

const CounterEntry* DualHeapIndex::find(ItemId item) const {
  auto it = slot_of_.find(item);
  return it == slot_of_.end() ? nullptr : &entries_[it->second];
}

void DualHeapIndex::sift_count(std::size_t pos) {
  sift(count_heap_, count_pos_, pos,
       [this](Slot a, Slot b) { return entries_[a].count < entries_[b].count; });
}

void DualHeapIndex::sift_error(std::size_t pos) {
  sift(error_heap_, error_pos_, pos,
       [this](Slot a, Slot b) { return entries_[a].error > entries_[b].error; });
}

void DualHeapIndex::insert_new(ItemId item) {
  if (full()) throw std::logic_error("DualHeapIndex::insert_new: index is full");
  if (contains(item)) throw std::logic_error("DualHeapIndex::insert_new: item already monitored");
  Slot slot = static_cast<Slot>(entries_.size());
  entries_.push_back(CounterEntry{item, 1, 0});
  count_heap_.push_back(slot);
  error_heap_.push_back(slot);
  count_pos_.push_back(static_cast<Slot>(count_heap_.size() - 1));
  error_pos_.push_back(static_cast<Slot>(error_heap_.size() - 1));
  slot_of_.emplace(item, slot);
  sift_count(count_pos_[slot]);
  sift_error(error_pos_[slot]);
}

void DualHeapIndex::adjust(ItemId item, std::int64_t count_delta,
                           std::int64_t error_delta) {
  auto it = slot_of_.find(item);
  if (it == slot_of_.end()) throw std::out_of_range("DualHeapIndex::adjust: item not monitored");
  Slot slot = it->second;
  entries_[slot].count += count_delta;
  entries_[slot].error += error_delta;
  if (count_delta != 0) sift_count(count_pos_[slot]);
  if (error_delta != 0) sift_error(error_pos_[slot]);
}

void DualHeapIndex::replace_min(ItemId new_item) {
  if (!full()) throw std::logic_error("DualHeapIndex::replace_min: index not full");
  if (contains(new_item)) throw std::logic_error("DualHeapIndex::replace_min: item already monitored");
  Slot slot = count_heap_[0];
  CounterEntry& e = entries_[slot];
  slot_of_.erase(e.item);
  std::int64_t old_min = e.count;
  e = CounterEntry{new_item, old_min + 1, old_min};
  slot_of_.emplace(new_item, slot);
  sift_count(count_pos_[slot]);
  sift_error(error_pos_[slot]);
}

std::int64_t DualHeapIndex::min_count() const {
  if (entries_.empty()) throw std::out_of_range("DualHeapIndex::min_count: empty index");
  return entries_[count_heap_[0]].count;
}

ItemId DualHeapIndex::min_count_item() const {
  if (entries_.empty()) throw std::out_of_range("DualHeapIndex::min_count_item: empty index");
  return entries_[count_heap_[0]].item;
}

std::int64_t DualHeapIndex::max_error() const {
  if (entries_.empty()) throw std::out_of_range("DualHeapIndex::max_error: empty index");
  return entries_[error_heap_[0]].error;
}

ItemId DualHeapIndex::max_error_item() const {
  if (entries_.empty()) throw std::out_of_range("DualHeapIndex::max_error_item: empty index");
  return entries_[error_heap_[0]].item;
}

void DualHeapIndex::check_consistency() const {
  auto fail = [](const std::string& what) { throw std::logic_error("DualHeapIndex: " + what); };
  std::size_t n = entries_.size();
  if (n > capacity_) fail("size exceeds capacity");
  if (count_heap_.size() != n || error_heap_.size() != n) fail("heap size mismatch");
  if (count_pos_.size() != n || error_pos_.size() != n) fail("position array size mismatch");
  if (slot_of_.size() != n) fail("dictionary size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (count_heap_[i] >= n || error_heap_[i] >= n) fail("heap holds bad slot");
    if (count_pos_[count_heap_[i]] != i) fail("count position array out of sync");
    if (error_pos_[error_heap_[i]] != i) fail("error position array out of sync");
    if (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (entries_[count_heap_[i]].count < entries_[count_heap_[parent]].count)
        fail("min-heap order violated");
      if (entries_[error_heap_[i]].error > entries_[error_heap_[parent]].error)
        fail("max-heap order violated");
    }
  }
  for (const auto& [item, slot] : slot_of_) {
    if (slot >= n) fail("dictionary holds bad slot");
    if (entries_[slot].item != item) fail("dictionary item mismatch");
  }
}

}  // namespace streamsum
