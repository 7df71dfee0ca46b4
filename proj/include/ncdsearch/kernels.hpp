#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version with
// identical results; the parallel versions use OpenMP and write every result
// to its own slot, so output never depends on thread scheduling.

#include <cstdint>
#include <span>
#include <vector>

#include "ncdsearch/common.hpp"
#include "ncdsearch/distance.hpp"

namespace ncdsearch::kernels {

std::vector<BitCost> compressed_sizes_serial(std::span<const ByteView> items);
std::vector<BitCost> compressed_sizes(std::span<const ByteView> items);

// NCD from one query to each target.
std::vector<double> distances_serial(const SizedBytes& query, std::span<const SizedBytes> targets);
std::vector<double> distances(const SizedBytes& query, std::span<const SizedBytes> targets);

// Hampel statistic max_i |X_i - M| / S for `replicates` standard-normal
// samples of size n, replicate r drawing from replicate_stream(seed, r).
std::vector<double> hampel_statistics_serial(int n, int replicates, std::uint64_t seed);
std::vector<double> hampel_statistics(int n, int replicates, std::uint64_t seed);

}  // namespace ncdsearch::kernels
