#pragma once

// Slow, obviously-correct reference implementations. They share no code with
// the library beyond its value types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "ncdsearch/compressor.hpp"

namespace testing {

// Elias-gamma length by counting binary digits.
inline std::uint64_t gamma_oracle(std::uint64_t v) {
  std::uint64_t digits = 0;
  for (auto t = v; t > 0; t >>= 1) ++digits;
  return 2 * digits - 1;
}

// Quadratic greedy reference: try every earlier start position, nearest
// first, and keep the first longest match.
inline std::vector<ncdsearch::Phrase> naive_parse(std::string_view s) {
  using ncdsearch::Phrase;
  std::vector<Phrase> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t best_len = 0, best_off = 0;
    for (std::size_t off = 1; off <= i; ++off) {
      std::size_t len = 0;
      while (i + len < s.size() && s[i + len - off] == s[i + len]) ++len;
      if (len > best_len) {
        best_len = len;
        best_off = off;
      }
    }
    const bool pays = best_len >= 3 && 1 + gamma_oracle(best_off) + gamma_oracle(best_len) <= 9 * best_len;
    if (pays) {
      out.push_back(Phrase::make_match(static_cast<std::uint32_t>(best_off), static_cast<std::uint32_t>(best_len)));
      i += best_len;
    } else {
      out.push_back(Phrase::make_literal(static_cast<std::uint8_t>(s[i])));
      ++i;
    }
  }
  return out;
}

inline std::uint64_t oracle_cost(const std::vector<ncdsearch::Phrase>& phrases) {
  std::uint64_t bits = 0;
  for (const auto& p : phrases) {
    bits += p.kind == ncdsearch::Phrase::Kind::kLiteral ? 9 : 1 + gamma_oracle(p.offset) + gamma_oracle(p.length);
  }
  return bits;
}

inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// max |x - M| / MAD by full sorts.
inline double statistic_oracle(const std::vector<double>& x) {
  const double m = sorted_median(x);
  std::vector<double> dev;
  double worst = 0.0;
  for (double v : x) {
    dev.push_back(std::fabs(v - m));
    worst = std::max(worst, std::fabs(v - m));
  }
  return worst / sorted_median(dev);
}

// Smallest observed statistic t with #{T <= t} >= (1000 - alpha_milli) / 1000 * R,
// in exact integer arithmetic.
inline double quantile_oracle(const std::vector<double>& stats, int alpha_milli) {
  const auto r = static_cast<long long>(stats.size());
  double best = std::numeric_limits<double>::infinity();
  for (double t : stats) {
    long long count = 0;
    for (double u : stats) count += u <= t;
    if (count * 1000 >= (1000 - alpha_milli) * r) best = std::min(best, t);
  }
  return best;
}

}  // namespace testing
