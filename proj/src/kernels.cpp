#include "ncdsearch/kernels.hpp"

#include "ncdsearch/compressor.hpp"
#include "ncdsearch/outliers.hpp"

namespace ncdsearch::kernels {
namespace {

double replicate_statistic(int n, std::uint64_t seed, std::uint64_t r, std::vector<double>& scratch) {
  auto rng = replicate_stream(seed, r);
  scratch.resize(static_cast<std::size_t>(n));
  draw_clean_sample(rng, scratch);
  return hampel_statistic(scratch);
}

}  // namespace

std::vector<BitCost> compressed_sizes_serial(std::span<const ByteView> items) {
  std::vector<BitCost> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = compressed_size(items[i]);
  return out;
}

std::vector<BitCost> compressed_sizes(std::span<const ByteView> items) {
  std::vector<BitCost> out(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = compressed_size(items[i]);
  return out;
}

std::vector<double> distances_serial(const SizedBytes& query, std::span<const SizedBytes> targets) {
  std::vector<double> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) out[i] = ncd(query, targets[i]);
  return out;
}

std::vector<double> distances(const SizedBytes& query, std::span<const SizedBytes> targets) {
  std::vector<double> out(targets.size());
  const auto n = static_cast<std::ptrdiff_t>(targets.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ncd(query, targets[i]);
  return out;
}

std::vector<double> hampel_statistics_serial(int n, int replicates, std::uint64_t seed) {
  std::vector<double> out(static_cast<std::size_t>(replicates));
  std::vector<double> scratch;
  for (int r = 0; r < replicates; ++r) {
    out[static_cast<std::size_t>(r)] = replicate_statistic(n, seed, static_cast<std::uint64_t>(r), scratch);
  }
  return out;
}

std::vector<double> hampel_statistics(int n, int replicates, std::uint64_t seed) {
  std::vector<double> out(static_cast<std::size_t>(replicates));
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (int r = 0; r < replicates; ++r) {
      out[static_cast<std::size_t>(r)] = replicate_statistic(n, seed, static_cast<std::uint64_t>(r), scratch);
    }
  }
  return out;
}

}  // namespace ncdsearch::kernels
