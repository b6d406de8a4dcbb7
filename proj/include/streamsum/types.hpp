#pragma once

#include <cstdint>

namespace streamsum {

// Items are opaque 64-bit identifiers. Callers with richer keys are expected
// to map them onto this space before feeding a sketch.
using ItemId = std::uint64_t;

}  // namespace streamsum
