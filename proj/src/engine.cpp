#include "ncdsearch/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "ncdsearch/compressor.hpp"
#include "ncdsearch/kernels.hpp"

namespace ncdsearch {
namespace {

std::vector<SizedBytes> bin_targets(SizeBin bin, const CorpusIndex& index) {
  const auto blocks = index.blocks(bin);
  std::vector<SizedBytes> targets;
  targets.reserve(blocks.size());
  for (const auto& b : blocks) targets.push_back(SizedBytes{index.block_bytes(b), b.cached_size});
  return targets;
}

// Candidate bins for a unit; falls back to the neighbourhood of the largest
// populated bin when none of the regular candidates hold any blocks.
std::vector<SizeBin> bins_to_search(SizeBin unit_bin, const CorpusIndex& index) {
  const int n_max = index.config().n_max_bins;
  auto bins = candidate_bins(bin_for_length(unit_bin.nominal_bytes(), n_max), n_max);
  const bool any = std::any_of(bins.begin(), bins.end(), [&](SizeBin b) { return !index.blocks(b).empty(); });
  if (any) return bins;
  for (int k = n_max; k >= 1; --k) {
    if (!index.blocks(SizeBin{k}).empty()) return candidate_bins(SizeBin{k}, n_max);
  }
  return {};
}

}  // namespace

SizeBin bin_for_length(std::size_t bytes, int n_max) {
  const auto k = static_cast<int>((bytes + kBinUnitBytes - 1) / kBinUnitBytes);
  return SizeBin{std::clamp(k, 1, n_max)};
}

std::vector<QueryUnit> segment_query(ByteView query, const IngestConfig& config) {
  if (query.empty()) throw Error(ErrorCode::kInvalidArgument, "query is empty");
  config.validate();
  const SizeBin largest{config.n_max_bins};
  std::vector<QueryUnit> units;
  for (const auto& r : chunk(query, largest, config)) {
    units.push_back(QueryUnit{Bytes(query.substr(r.begin, r.size())), bin_for_length(r.size(), config.n_max_bins),
                              static_cast<std::uint32_t>(units.size()), r});
  }
  return units;
}

std::vector<SizeBin> candidate_bins(SizeBin unit_bin, int n_max) {
  std::vector<SizeBin> bins;
  for (int k = unit_bin.k - 1; k <= unit_bin.k + 2; ++k) {
    if (k >= 1 && k <= n_max) bins.push_back(SizeBin{k});
  }
  return bins;
}

DistanceSample sample_distances(const QueryUnit& unit, BitCost unit_size, SizeBin bin,
                                const CorpusIndex& index) {
  const auto targets = bin_targets(bin, index);
  return DistanceSample{unit.ordinal, bin, kernels::distances(SizedBytes{unit.bytes, unit_size}, targets)};
}

DistanceSample sample_distances_serial(const QueryUnit& unit, BitCost unit_size, SizeBin bin,
                                       const CorpusIndex& index) {
  const auto targets = bin_targets(bin, index);
  return DistanceSample{unit.ordinal, bin, kernels::distances_serial(SizedBytes{unit.bytes, unit_size}, targets)};
}

ScoredQuery score(ByteView query_bytes, const CorpusIndex& index) {
  ScoredQuery scored;
  scored.units = segment_query(query_bytes, index.config());
  for (const auto& unit : scored.units) {
    const auto unit_size = compressed_size(unit.bytes);
    for (const auto bin : bins_to_search(unit.bin, index)) {
      scored.samples.push_back(sample_distances(unit, unit_size, bin, index));
    }
  }
  return scored;
}

QueryResult vote(const ScoredQuery& scored, const CorpusIndex& index, double alpha, GTable& gtable) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in [0, 1], got " + std::to_string(alpha));
  }
  QueryResult result;
  result.alpha = alpha;
  result.unit_count = scored.units.size();

  const auto documents = index.documents();
  std::vector<int> votes(documents.size(), 0);
  std::vector<double> best(documents.size(), std::numeric_limits<double>::infinity());

  for (const auto& sample : scored.samples) {
    const auto blocks = index.blocks(sample.bin);
    if (sample.distances.size() < kMinSampleSize) {
      if (!sample.distances.empty()) {
        spdlog::debug("unit {} bin {}: {} blocks, skipped", sample.unit_ordinal, sample.bin.k,
                      sample.distances.size());
      }
      result.skipped.push_back(SkippedSample{sample.unit_ordinal, sample.bin, sample.distances.size()});
      continue;
    }
    ++result.sample_count;
    const double g = gtable.g(static_cast<int>(sample.distances.size()), alpha);
    for (const auto i : hampel_lower(sample.distances, g).flagged) {
      const auto& block = blocks[i];
      result.flagged.push_back(FlaggedBlock{block, sample.distances[i], sample.unit_ordinal});
      ++votes[block.doc_index];
      best[block.doc_index] = std::min(best[block.doc_index], sample.distances[i]);
    }
  }

  std::sort(result.flagged.begin(), result.flagged.end(), [](const FlaggedBlock& a, const FlaggedBlock& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.block.block_id != b.block.block_id) return a.block.block_id < b.block.block_id;
    return a.unit_ordinal < b.unit_ordinal;
  });

  std::vector<std::size_t> voted;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (votes[d] > 0) {
      voted.push_back(d);
      result.votes.emplace(documents[d].doc_id, votes[d]);
    }
  }
  std::sort(voted.begin(), voted.end(), [&](std::size_t a, std::size_t b) {
    if (votes[a] != votes[b]) return votes[a] > votes[b];
    if (best[a] != best[b]) return best[a] < best[b];
    return documents[a].doc_id < documents[b].doc_id;
  });
  for (const auto d : voted) result.ranking.push_back(documents[d].doc_id);

  for (const auto& f : result.flagged) {
    result.highlights[documents[f.block.doc_index].doc_id].push_back(f.block.range);
  }
  for (auto& [doc, ranges] : result.highlights) {
    std::sort(ranges.begin(), ranges.end());
    ranges.erase(std::unique(ranges.begin(), ranges.end()), ranges.end());
  }
  return result;
}

QueryResult query(ByteView query_bytes, double alpha, const CorpusIndex& index, GTable& gtable) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in [0, 1], got " + std::to_string(alpha));
  }
  return vote(score(query_bytes, index), index, alpha, gtable);
}

}  // namespace ncdsearch
