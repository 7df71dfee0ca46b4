#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

#include "ncdsearch/common.hpp"

namespace ncdsearch {

// Upper tolerance on NCD; greedy parsing can overshoot the ideal bound of 1.
inline constexpr double kNcdCeiling = 1.1;

// A byte string together with its (already known) compressed size.
struct SizedBytes {
  ByteView bytes;
  BitCost size;
};

// Compressed sizes keyed by a caller-chosen identifier. Concurrent lookups
// proceed under a shared lock; inserts are serialized.
class SizeCache {
 public:
  std::optional<BitCost> find(std::uint64_t key) const;
  void insert(std::uint64_t key, BitCost size);
  BitCost get_or_compute(std::uint64_t key, ByteView bytes);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, BitCost> sizes_;
};

// Normalized compression distance
//   max{C(xy) - C(x), C(yx) - C(y)} / max{C(x), C(y)}
// clamped below at 0. Both concatenation orders are always evaluated.
// Throws Error(kInvalidArgument) when both inputs are empty.
double ncd(ByteView x, ByteView y);
double ncd(const SizedBytes& x, const SizedBytes& y);
double ncd(ByteView x, std::uint64_t x_key, ByteView y, std::uint64_t y_key, SizeCache& cache);

// The ratio itself, given all four compressed sizes.
double ncd_from_sizes(BitCost cx, BitCost cy, BitCost cxy, BitCost cyx);

}  // namespace ncdsearch
