#pragma once

// Hampel identifier for lower outliers.
//
// A value x of a sample with median M and median absolute deviation S is a
// lower outlier when (M - x) / S > g(N; alpha). The threshold g is the
// (1 - alpha) quantile of max_i |X_i - M| / S over clean standard-normal
// samples of size N, estimated by Monte Carlo.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "ncdsearch/common.hpp"

namespace ncdsearch {

struct RobustStats {
  double median = 0.0;
  double mad = 0.0;  // median of |x_i - median|, unscaled
  std::size_t n = 0;
};

// Throws Error(kInvalidArgument) on an empty sample.
RobustStats robust_stats(std::span<const double> sample);

// max_i |x_i - M| / S. Reorders `sample`. Returns +inf when S == 0.
double hampel_statistic(std::span<double> sample);

// Random stream for Monte Carlo replicate r. Depends only on (seed, r), so
// replicates can be drawn in any order or in parallel.
std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate);

// Draws one standard-normal sample of size n from `rng`, redrawing whenever
// the sample's MAD is zero.
void draw_clean_sample(std::mt19937_64& rng, std::span<double> out);

// The ceil((1 - alpha) * R)-th smallest of R sorted statistics.
double upper_quantile(std::span<const double> sorted, double alpha);

// Monte Carlo estimate of g(n; alpha), 0 < alpha < 1, n >= 3, replicates >= 1.
double estimate_g(int n, double alpha, int replicates, std::uint64_t seed);

struct OutlierVerdict {
  std::vector<std::size_t> flagged;  // ascending sample indices
  double g_used = 0.0;
  RobustStats stats;
};

// Relative MAD floor used when more than half the sample ties at the median.
inline constexpr double kMadFloor = 1e-9;

// Flags every index with x_i < M and (M - x_i) / S > g. For the finite
// thresholds produced by estimate_g (always positive) the first condition is
// implied; it matters only for g = -inf, which flags everything strictly below
// the median. A zero MAD is replaced by kMadFloor * max(|M|, 1).
// Throws Error(kInvalidArgument) for samples with fewer than 3 values.
OutlierVerdict hampel_lower(std::span<const double> sample, double g);

// Cache of g(N; alpha) for fixed replicate count and seed. The sorted Monte
// Carlo statistics are kept per N, so every alpha for a given N costs one
// simulation. Reads take a shared lock; inserts are serialized.
class GTable {
 public:
  static constexpr int kDefaultReplicates = 10000;
  static constexpr std::uint64_t kDefaultSeed = 20080101;

  explicit GTable(int replicates = kDefaultReplicates, std::uint64_t seed = kDefaultSeed);
  GTable(const GTable& other);
  GTable& operator=(const GTable&) = delete;

  // alpha == 0 gives +inf (nothing flagged), alpha == 1 gives -inf.
  // Throws Error(kInvalidArgument) for alpha outside [0, 1] or n < 3.
  double g(int n, double alpha);

  int replicates() const { return replicates_; }
  std::uint64_t seed() const { return seed_; }

  struct Row {
    int n;
    double alpha;
    double g;
  };
  std::vector<Row> rows() const;  // sorted by (n, alpha)

  // Versioned JSON: {"format", "format_version", "replicates", "seed", "rows": [{n, alpha, g}]}.
  void save(const std::filesystem::path& path) const;
  static GTable load(const std::filesystem::path& path);

 private:
  std::shared_ptr<const std::vector<double>> statistics_for(int n);

  int replicates_;
  std::uint64_t seed_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<int, double>, double> entries_;
  std::map<int, std::shared_ptr<const std::vector<double>>> statistics_;
};

inline constexpr int kGTableFormatVersion = 1;

}  // namespace ncdsearch
