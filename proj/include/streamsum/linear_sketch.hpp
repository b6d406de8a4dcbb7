#pragma once

#include <cstdint>
#include <vector>

#include "streamsum/types.hpp"

namespace streamsum {

enum class LinearKind { CountMin, CountMedian };

const char* to_string(LinearKind kind);

struct LinearDims {
  std::size_t depth = 0;  // rows
  std::size_t width = 0;  // cells per row
};

// Formula sizing for a target additive error epsilon and failure
// probability delta:
//   CountMin    width ceil(e/epsilon), depth ceil(ln(1/delta))
//   CountMedian width ceil(3/epsilon), depth = smallest odd integer
//               >= ceil(log2(1/delta))  (odd so the median is a single cell)
LinearDims linear_dims(LinearKind kind, double epsilon, double delta);

// Hash-based turnstile baseline: a depth x width table of signed cells with
// one pairwise-independent multiply-shift hash per row (plus a +/-1 sign hash
// per row for CountMedian). All hash parameters are drawn from a
// counter-based generator, so a (dims, seed) pair pins the sketch exactly.
class LinearSketch {
 public:
  LinearSketch(LinearKind kind, double epsilon, double delta, std::uint64_t seed);
  LinearSketch(LinearKind kind, LinearDims dims, std::uint64_t seed);

  // weight must be +1 or -1.
  void update(ItemId item, int weight);

  // CountMin: minimum over rows, clamped at 0 (never underestimates on
  // insert-dominant strict input). CountMedian: median of the signed
  // per-row estimates; may be negative.
  std::int64_t query(ItemId item) const;

  LinearKind kind() const { return kind_; }
  std::size_t depth() const { return dims_.depth; }
  std::size_t width() const { return dims_.width; }
  std::size_t counters() const { return dims_.depth * dims_.width; }
  std::uint64_t space_bits() const { return static_cast<std::uint64_t>(counters()) * 64; }
  std::uint64_t seed() const { return seed_; }

  std::int64_t cell(std::size_t row, std::size_t col) const;
  std::size_t bucket(std::size_t row, ItemId item) const;
  int sign(std::size_t row, ItemId item) const;

 private:
  struct HashPair {
    std::uint64_t a = 1;
    std::uint64_t b = 0;
  };

  LinearKind kind_;
  LinearDims dims_;
  std::uint64_t seed_;
  std::vector<std::int64_t> table_;     // depth * width, row-major
  std::vector<HashPair> row_hash_;      // one per row
  std::vector<HashPair> sign_hash_;     // one per row (CountMedian only)
};

}  // namespace streamsum
