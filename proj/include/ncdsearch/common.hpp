#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ncdsearch {

// Documents and queries are opaque octet strings; text is never decoded.
using ByteView = std::string_view;
using Bytes = std::string;

// Size of a compressed representation, in bits.
struct BitCost {
  std::uint64_t bits = 0;

  constexpr BitCost& operator+=(BitCost other) {
    bits += other.bits;
    return *this;
  }
  friend constexpr BitCost operator+(BitCost a, BitCost b) { return BitCost{a.bits + b.bits}; }
  friend constexpr auto operator<=>(BitCost, BitCost) = default;
};

enum class ErrorCode {
  kConfig,            // invalid parameter or configuration
  kInvalidArgument,   // precondition violated by the caller
  kConflict,          // duplicate document id with different content
  kNotFound,          // missing file, directory or document
  kVersionMismatch,   // on-disk format version not understood
  kCorrupt,           // checksum failure or unparsable data
  kIo,                // read/write failure
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ncdsearch
