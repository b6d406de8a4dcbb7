#include "streamsum/linear_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "streamsum/counter_rng.hpp"
#include "streamsum/numeric_util.hpp"

namespace streamsum {

const char* to_string(LinearKind kind) {
  return kind == LinearKind::CountMin ? "count_min" : "count_median";
}

LinearDims linear_dims(LinearKind kind, double epsilon, double delta) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("linear_dims: epsilon must be in (0, 1]");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("linear_dims: delta must be in (0, 1)");
  LinearDims dims;
  if (kind == LinearKind::CountMin) {
    dims.width = static_cast<std::size_t>(ceil_snap(std::exp(1.0) / epsilon));
    dims.depth = static_cast<std::size_t>(ceil_snap(std::log(1.0 / delta)));
  } else {
    dims.width = static_cast<std::size_t>(ceil_snap(3.0 / epsilon));
    dims.depth = static_cast<std::size_t>(ceil_snap(std::log2(1.0 / delta)));
    if (dims.depth % 2 == 0) ++dims.depth;
  }
  dims.depth = std::max<std::size_t>(dims.depth, 1);
  dims.width = std::max<std::size_t>(dims.width, 1);
  return dims;
}

LinearSketch::LinearSketch(LinearKind kind, double epsilon, double delta,
                           std::uint64_t seed)
    : LinearSketch(kind, linear_dims(kind, epsilon, delta), seed) {}

LinearSketch::LinearSketch(LinearKind kind, LinearDims dims, std::uint64_t seed)
    : kind_(kind), dims_(dims), seed_(seed) {
  if (dims_.depth == 0 || dims_.width == 0)
    throw std::invalid_argument("LinearSketch: depth and width must be positive");
  if (kind_ == LinearKind::CountMedian && dims_.depth % 2 == 0)
    throw std::invalid_argument("LinearSketch: CountMedian needs odd depth");
  table_.assign(dims_.depth * dims_.width, 0);
  CounterRng rng(seed);
  row_hash_.resize(dims_.depth);
  for (auto& h : row_hash_) {
    h.a = rng.next() | 1;  // odd multiplier
    h.b = rng.next();
  }
  if (kind_ == LinearKind::CountMedian) {
    sign_hash_.resize(dims_.depth);
    for (auto& h : sign_hash_) {
      h.a = rng.next() | 1;
      h.b = rng.next();
    }
  }
}

std::size_t LinearSketch::bucket(std::size_t row, ItemId item) const {
  const HashPair& h = row_hash_[row];
  std::uint64_t z = h.a * item + h.b;
  // Top 32 bits scaled into [0, width): keeps arbitrary (non power-of-two)
  // widths uniform without modulo bias.
  return static_cast<std::size_t>(((z >> 32) * dims_.width) >> 32);
}

int LinearSketch::sign(std::size_t row, ItemId item) const {
  const HashPair& h = sign_hash_[row];
  std::uint64_t z = h.a * item + h.b;
  return (z >> 63) != 0 ? 1 : -1;
}

void LinearSketch::update(ItemId item, int weight) {
  if (weight != 1 && weight != -1)
    throw std::invalid_argument("LinearSketch::update: weight must be +1 or -1");
  for (std::size_t r = 0; r < dims_.depth; ++r) {
    std::int64_t delta = weight;
    if (kind_ == LinearKind::CountMedian) delta *= sign(r, item);
    table_[r * dims_.width + bucket(r, item)] += delta;
  }
}

std::int64_t LinearSketch::query(ItemId item) const {
  if (kind_ == LinearKind::CountMin) {
    std::int64_t best = table_[bucket(0, item)];
    for (std::size_t r = 1; r < dims_.depth; ++r)
      best = std::min(best, table_[r * dims_.width + bucket(r, item)]);
    return std::max<std::int64_t>(best, 0);
  }
  std::vector<std::int64_t> values(dims_.depth);
  for (std::size_t r = 0; r < dims_.depth; ++r)
    values[r] = sign(r, item) * table_[r * dims_.width + bucket(r, item)];
  auto mid = values.begin() + values.size() / 2;
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::int64_t LinearSketch::cell(std::size_t row, std::size_t col) const {
  return table_.at(row * dims_.width + col);
}

}  // namespace streamsum
