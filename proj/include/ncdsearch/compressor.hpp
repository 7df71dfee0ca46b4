#pragma once

// Windowless Lempel-Ziv parser and its bit-cost model.
//
// The parse is greedy: at every position the longest match of the remaining
// input anywhere in the already consumed prefix is taken (no window limit),
// ties going to the smallest offset. A match is emitted only if it is at least
// kMinMatch bytes long and its encoded cost does not exceed the cost of coding
// the same bytes as literals; otherwise a single literal is emitted.
//
// Cost model:
//   literal = 1 flag bit + 8 bits
//   match   = 1 flag bit + gamma(offset) + gamma(length)
// where gamma(v) = 2 * floor(log2 v) + 1 is the Elias-gamma code length.

#include <cstdint>
#include <span>
#include <vector>

#include "ncdsearch/common.hpp"

namespace ncdsearch {

inline constexpr std::uint32_t kMinMatch = 3;
inline constexpr std::uint64_t kLiteralBits = 9;

struct Phrase {
  enum class Kind : std::uint8_t { kLiteral, kMatch };

  Kind kind = Kind::kLiteral;
  std::uint8_t literal = 0;
  std::uint32_t offset = 0;  // distance back from the phrase start
  std::uint32_t length = 0;

  static constexpr Phrase make_literal(std::uint8_t byte) { return {Kind::kLiteral, byte, 0, 0}; }
  static constexpr Phrase make_match(std::uint32_t offset, std::uint32_t length) {
    return {Kind::kMatch, 0, offset, length};
  }

  constexpr std::uint32_t span() const { return kind == Kind::kLiteral ? 1 : length; }
  friend constexpr bool operator==(const Phrase&, const Phrase&) = default;
};

// Elias-gamma code length of v >= 1.
constexpr std::uint64_t gamma_bits(std::uint64_t v) {
  std::uint64_t log2 = 0;
  while (v >>= 1) ++log2;
  return 2 * log2 + 1;
}

constexpr BitCost phrase_cost(const Phrase& p) {
  if (p.kind == Phrase::Kind::kLiteral) return BitCost{kLiteralBits};
  return BitCost{1 + gamma_bits(p.offset) + gamma_bits(p.length)};
}

// True if a match of this shape is worth emitting under the cost model.
constexpr bool match_pays(std::uint32_t offset, std::uint32_t length) {
  return length >= kMinMatch &&
         1 + gamma_bits(offset) + gamma_bits(length) <= kLiteralBits * length;
}

std::vector<Phrase> lz_parse(ByteView data);

// Inverse of lz_parse. Self-overlapping matches are copied byte by byte.
// Throws Error(kCorrupt) if a match reaches before the start of the output.
Bytes lz_decode(std::span<const Phrase> phrases);

BitCost total_cost(std::span<const Phrase> phrases);

// C(x): cost of the greedy parse, computed without materializing phrases.
BitCost compressed_size(ByteView data);

// C(x||y).
BitCost concat_size(ByteView x, ByteView y);

}  // namespace ncdsearch
