#include "ncdsearch/compressor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace ncdsearch {
namespace {

// Hash chains over 3-byte prefixes. Chains are never truncated, so every
// earlier position is a candidate regardless of distance.
class MatchFinder {
 public:
  void reset(std::size_t n) {
    unsigned bits = 10;
    while (bits < 16 && (std::size_t{1} << bits) < n) ++bits;
    shift_ = 32 - bits;
    head_.assign(std::size_t{1} << bits, -1);
    prev_.resize(n);
  }

  std::uint32_t bucket(const std::uint8_t* p) const {
    const std::uint32_t v = p[0] | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16);
    return (v * 2654435761u) >> shift_;
  }

  void insert(const std::uint8_t* s, std::int32_t pos) {
    const auto h = bucket(s + pos);
    prev_[pos] = head_[h];
    head_[h] = pos;
  }

  std::int32_t first(const std::uint8_t* p) const { return head_[bucket(p)]; }
  std::int32_t next(std::int32_t pos) const { return prev_[pos]; }

 private:
  unsigned shift_ = 22;
  std::vector<std::int32_t> head_;
  std::vector<std::int32_t> prev_;
};

std::size_t common_prefix(const std::uint8_t* a, const std::uint8_t* b, std::size_t limit) {
  std::size_t n = 0;
  while (n + 8 <= limit) {
    std::uint64_t x, y;
    std::memcpy(&x, a + n, 8);
    std::memcpy(&y, b + n, 8);
    if (x != y) return n + (std::countr_zero(x ^ y) >> 3);
    n += 8;
  }
  while (n < limit && a[n] == b[n]) ++n;
  return n;
}

MatchFinder& thread_finder() {
  thread_local MatchFinder finder;
  return finder;
}

template <class Emit>
void greedy_parse(ByteView data, Emit&& emit) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(data.data());
  const std::size_t n = data.size();
  if (n == 0) return;

  auto& finder = thread_finder();
  finder.reset(n);

  std::size_t inserted = 0;
  std::size_t pos = 0;
  while (pos < n) {
    for (; inserted < pos; ++inserted) {
      if (inserted + 2 < n) finder.insert(s, static_cast<std::int32_t>(inserted));
    }

    std::size_t best_len = 0;
    std::size_t best_off = 0;
    if (pos + kMinMatch <= n) {
      const std::size_t limit = n - pos;
      for (auto cand = finder.first(s + pos); cand >= 0; cand = finder.next(cand)) {
        if (best_len != 0 && s[cand + best_len] != s[pos + best_len]) continue;
        const auto len = common_prefix(s + cand, s + pos, limit);
        if (len > best_len) {
          best_len = len;
          best_off = pos - static_cast<std::size_t>(cand);
          if (len == limit) break;
        }
      }
    }

    if (match_pays(static_cast<std::uint32_t>(best_off), static_cast<std::uint32_t>(best_len))) {
      emit(Phrase::make_match(static_cast<std::uint32_t>(best_off),
                              static_cast<std::uint32_t>(best_len)));
      pos += best_len;
    } else {
      emit(Phrase::make_literal(s[pos]));
      ++pos;
    }
  }
}

}  // namespace

std::vector<Phrase> lz_parse(ByteView data) {
  std::vector<Phrase> phrases;
  greedy_parse(data, [&](const Phrase& p) { phrases.push_back(p); });
  return phrases;
}

Bytes lz_decode(std::span<const Phrase> phrases) {
  Bytes out;
  for (const auto& p : phrases) {
    if (p.kind == Phrase::Kind::kLiteral) {
      out.push_back(static_cast<char>(p.literal));
      continue;
    }
    if (p.offset == 0 || p.offset > out.size()) {
      throw Error(ErrorCode::kCorrupt, "match offset reaches before start of output");
    }
    const std::size_t from = out.size() - p.offset;
    for (std::uint32_t i = 0; i < p.length; ++i) out.push_back(out[from + i]);
  }
  return out;
}

BitCost total_cost(std::span<const Phrase> phrases) {
  BitCost total;
  for (const auto& p : phrases) total += phrase_cost(p);
  return total;
}

BitCost compressed_size(ByteView data) {
  BitCost total;
  greedy_parse(data, [&](const Phrase& p) { total += phrase_cost(p); });
  return total;
}

BitCost concat_size(ByteView x, ByteView y) {
  thread_local Bytes joined;
  joined.assign(x);
  joined.append(y);
  return compressed_size(joined);
}

}  // namespace ncdsearch
