#pragma once

// Deliberately naive reference implementations used to cross-check the real
// data structures. Everything here is linear-scan and written straight from
// the algorithm statements, sharing no code with the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "streamsum/stream.hpp"
#include "streamsum/types.hpp"

namespace refimpl {

struct NaiveEntry {
  streamsum::ItemId item = 0;
  long long count = 0;
  long long error = 0;
};

enum class NaivePolicy { InsertOnly, Lazy, Active };

// Flat-vector SpaceSaving. Ties (several min-count or max-error entries) are
// broken by lowest slot, which need not match the library's heap order, so
// exact-state comparisons are only meaningful on tie-free traces.
class NaiveSpaceSaving {
 public:
  NaiveSpaceSaving(std::size_t capacity, NaivePolicy policy)
      : capacity_(capacity), policy_(policy) {
    if (capacity == 0) throw std::invalid_argument("capacity must be positive");
  }

  void insert(streamsum::ItemId item) {
    for (NaiveEntry& e : entries_)
      if (e.item == item) {
        ++e.count;
        return;
      }
    if (entries_.size() < capacity_) {
      entries_.push_back({item, 1, 0});
      return;
    }
    std::size_t at = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (entries_[i].count < entries_[at].count) at = i;
    long long floor = entries_[at].count;
    entries_[at] = {item, floor + 1, floor};
  }

  void erase(streamsum::ItemId item) {
    for (NaiveEntry& e : entries_)
      if (e.item == item) {
        --e.count;
        return;
      }
    if (policy_ == NaivePolicy::Lazy) return;
    if (policy_ == NaivePolicy::InsertOnly)
      throw std::logic_error("insert-only reference got a delete");
    std::size_t at = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (entries_[i].error > entries_[at].error) at = i;
    --entries_[at].count;
    --entries_[at].error;
  }

  long long query(streamsum::ItemId item) const {
    for (const NaiveEntry& e : entries_)
      if (e.item == item) return std::max(e.count, 0LL);
    return 0;
  }

  bool monitored(streamsum::ItemId item) const {
    for (const NaiveEntry& e : entries_)
      if (e.item == item) return true;
    return false;
  }

  long long min_count() const {
    long long m = entries_.front().count;
    for (const NaiveEntry& e : entries_) m = std::min(m, e.count);
    return m;
  }

  long long max_error() const {
    long long m = entries_.front().error;
    for (const NaiveEntry& e : entries_) m = std::max(m, e.error);
    return m;
  }

  long long count_sum() const {
    long long s = 0;
    for (const NaiveEntry& e : entries_) s += e.count;
    return s;
  }

  const std::vector<NaiveEntry>& entries() const { return entries_; }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return entries_.size() == capacity_; }

 private:
  std::size_t capacity_;
  NaivePolicy policy_;
  std::vector<NaiveEntry> entries_;
};

// Brute-force rank/quantile oracle over a replayed stream.
class DyadicOracle {
 public:
  DyadicOracle(const std::vector<streamsum::StreamOp>& ops, int universe_bits)
      : universe_(streamsum::ItemId{1} << universe_bits) {
    for (const streamsum::StreamOp& op : ops) {
      if (op.kind == streamsum::OpKind::Insert) {
        ++freq_[op.item];
        ++total_;
      } else {
        --freq_[op.item];
        --total_;
      }
    }
  }

  long long rank_less(streamsum::ItemId x) const {
    long long r = 0;
    for (const auto& [item, f] : freq_)
      if (item < x) r += f;
    return r;
  }

  long long total() const { return total_; }

  // Smallest x with rank(x) >= max(1, ceil(q * total)).
  streamsum::ItemId quantile(double q) const {
    long long target =
        std::max(1LL, static_cast<long long>(std::ceil(q * static_cast<double>(total_))));
    long long cum = 0;
    for (const auto& [item, f] : freq_) {
      cum += f;
      if (cum >= target) return item;
    }
    return universe_ - 1;
  }

 private:
  streamsum::ItemId universe_;
  std::map<streamsum::ItemId, long long> freq_;
  long long total_ = 0;
};

}  // namespace refimpl
