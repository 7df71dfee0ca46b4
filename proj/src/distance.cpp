#include "ncdsearch/distance.hpp"

#include <algorithm>
#include <mutex>

#include "ncdsearch/compressor.hpp"

namespace ncdsearch {

std::optional<BitCost> SizeCache::find(std::uint64_t key) const {
  std::shared_lock lock(mutex_);
  if (auto it = sizes_.find(key); it != sizes_.end()) return it->second;
  return std::nullopt;
}

void SizeCache::insert(std::uint64_t key, BitCost size) {
  std::unique_lock lock(mutex_);
  sizes_.emplace(key, size);
}

BitCost SizeCache::get_or_compute(std::uint64_t key, ByteView bytes) {
  if (auto hit = find(key)) return *hit;
  const auto size = compressed_size(bytes);
  insert(key, size);
  return size;
}

std::size_t SizeCache::size() const {
  std::shared_lock lock(mutex_);
  return sizes_.size();
}

double ncd_from_sizes(BitCost cx, BitCost cy, BitCost cxy, BitCost cyx) {
  const auto denom = std::max(cx.bits, cy.bits);
  if (denom == 0) throw Error(ErrorCode::kInvalidArgument, "ncd undefined for two empty inputs");
  const auto forward = static_cast<std::int64_t>(cxy.bits) - static_cast<std::int64_t>(cx.bits);
  const auto backward = static_cast<std::int64_t>(cyx.bits) - static_cast<std::int64_t>(cy.bits);
  const auto numer = std::max<std::int64_t>({forward, backward, 0});
  return static_cast<double>(numer) / static_cast<double>(denom);
}

double ncd(const SizedBytes& x, const SizedBytes& y) {
  if (x.bytes.empty() && y.bytes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ncd undefined for two empty inputs");
  }
  return ncd_from_sizes(x.size, y.size, concat_size(x.bytes, y.bytes),
                        concat_size(y.bytes, x.bytes));
}

double ncd(ByteView x, ByteView y) {
  return ncd(SizedBytes{x, compressed_size(x)}, SizedBytes{y, compressed_size(y)});
}

double ncd(ByteView x, std::uint64_t x_key, ByteView y, std::uint64_t y_key, SizeCache& cache) {
  return ncd(SizedBytes{x, cache.get_or_compute(x_key, x)},
             SizedBytes{y, cache.get_or_compute(y_key, y)});
}

}  // namespace ncdsearch
