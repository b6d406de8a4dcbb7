#pragma once

#include <cmath>
#include <cstdint>

namespace streamsum {

// Ratios like 2*alpha/epsilon are mathematically integral for typical
// parameters (e.g. 2*2/0.01 = 400) but land a few ulps off in binary floating
// point. Snap values that sit within a relative 1e-9 of an integer before
// rounding so sizing formulas stay exact.
inline bool near_integer(double x) {
  double r = std::nearbyint(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(r));
}

inline std::int64_t ceil_snap(double x) {
  if (near_integer(x)) return static_cast<std::int64_t>(std::llround(x));
  return static_cast<std::int64_t>(std::ceil(x));
}

inline std::int64_t floor_snap(double x) {
  if (near_integer(x)) return static_cast<std::int64_t>(std::llround(x));
  return static_cast<std::int64_t>(std::floor(x));
}

// v <= bound, resolving floating-point fuzz on an integral bound in the
// mathematical direction: for integer v this is v <= floor(bound).
inline bool int_leq(std::int64_t v, double bound) {
  return v <= floor_snap(bound);
}

// v < bound over integers: v <= ceil(bound) - 1.
inline bool int_less(std::int64_t v, double bound) {
  if (near_integer(bound)) return v <= std::llround(bound) - 1;
  return static_cast<double>(v) < bound;
}

}  // namespace streamsum
