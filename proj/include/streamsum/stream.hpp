#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamsum/types.hpp"

namespace streamsum {

enum class OpKind : std::uint8_t { Insert, Delete };

struct StreamOp {
  OpKind kind = OpKind::Insert;
  ItemId item = 0;
  bool operator==(const StreamOp&) const = default;
};

// Which insertion occurrences get deleted.
enum class DeletePattern { ShuffledUniform, TargetedLeastFrequent };
// Where the deletes land in the op sequence.
enum class DeleteOrdering { DeletesAfterInserts, Interleaved };

// An op sequence plus the metadata needed to reproduce and evaluate it. The
// declared alpha is I / (I - D), i.e. the tightest deletion budget the
// stream satisfies.
struct Stream {
  int universe_bits = 16;
  double alpha_declared = 1.0;
  std::uint64_t seed = 0;
  std::string generator;  // short name recorded in the file header
  std::vector<StreamOp> ops;
  std::uint64_t inserts = 0;
  std::uint64_t deletes = 0;

  std::int64_t net_count() const {
    return static_cast<std::int64_t>(inserts) - static_cast<std::int64_t>(deletes);
  }
};

// Exact ground truth. Remembers every item ever inserted (even at frequency
// zero) so evaluation sets stay well defined, and rejects deletes that would
// drive a frequency negative.
class ExactCounter {
 public:
  void insert(ItemId item);
  void erase(ItemId item);  // throws ModelViolationError on strict breach
  void apply(const StreamOp& op);

  std::int64_t freq(ItemId item) const;
  std::uint64_t inserted_total() const { return inserted_; }
  std::uint64_t deleted_total() const { return deleted_; }
  std::int64_t f1() const {
    return static_cast<std::int64_t>(inserted_) - static_cast<std::int64_t>(deleted_);
  }

  // All items that ever appeared in an insertion, sorted.
  std::vector<ItemId> distinct_items() const;
  const std::unordered_map<ItemId, std::int64_t>& counts() const { return counts_; }

 private:
  std::unordered_map<ItemId, std::int64_t> counts_;
  std::uint64_t inserted_ = 0;
  std::uint64_t deleted_ = 0;
};

// Replays every op through an ExactCounter; a strict-model breach raises
// ModelViolationError naming the op's position (as a file line number).
ExactCounter strict_replay(const Stream& stream);

// Inverse-CDF sampler over ranks 1..2^bits with mass proportional to
// rank^-s; rank r maps to item id r-1 (s = 0 degenerates to uniform).
// Table-backed, so universe_bits is capped at 20.
class ZipfSampler {
 public:
  ZipfSampler(int universe_bits, double s);
  ItemId sample(double unit) const;  // unit in [0, 1)

 private:
  std::vector<double> cdf_;
};

// i.i.d. insertions. Both generators are deterministic in (params, seed).
std::vector<StreamOp> gen_zipf(int universe_bits, double s,
                               std::uint64_t inserts, std::uint64_t seed);
// Item ids are Binomial(n, p) success counts; pre: 0 < p < 1, n < 2^bits.
std::vector<StreamOp> gen_binomial(int universe_bits, int n, double p,
                                   std::uint64_t inserts, std::uint64_t seed);

// Turns an insert-only prefix into a bounded-deletion stream with
// D = floor(ratio * I) deletes (ratio in [0, 1)). Every produced stream is
// strict: each prefix keeps all frequencies nonnegative.
Stream apply_deletions(const std::vector<StreamOp>& inserts, int universe_bits,
                       double ratio, DeletePattern pattern,
                       DeleteOrdering ordering, std::uint64_t seed,
                       const std::string& generator_name);

// Worst-case stream for counter-based sketches under deletion budget alpha:
// alpha/epsilon distinct items with identical exact counts, all insertions
// first, then (1 - 1/alpha) * I deletions aimed (via probe replays of the
// shared insert path) so that every sub-alpha/epsilon capacity still misses
// a frequent item afterwards. Pre: alpha/epsilon is integral.
Stream adversarial_stream(double epsilon, double alpha);

// Text format: "# universe_bits=<int> alpha=<float> seed=<u64> gen=<name>"
// then one "I <id>" or "D <id>" per line, LF endings. Writing then reading
// then writing again reproduces the bytes exactly.
void stream_write(const Stream& stream, std::ostream& out);
Stream stream_read(std::istream& in);
void stream_save(const Stream& stream, const std::string& path);
Stream stream_load(const std::string& path);

}  // namespace streamsum
