#pragma once

// Query evaluation: the query is cut into units, each unit is compared with
// every block of its own size bin, the previous bin and the two following
// bins, and in each of those distance samples the lower outliers vote for the
// documents their blocks belong to.
//
// Evaluation is split in two phases so that a threshold sweep reuses the
// distances: score() does all compression work, vote() only flags and counts.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncdsearch/common.hpp"
#include "ncdsearch/corpus.hpp"
#include "ncdsearch/outliers.hpp"

namespace ncdsearch {

struct QueryUnit {
  Bytes bytes;
  SizeBin bin;
  std::uint32_t ordinal = 0;
  ByteRange range;  // position inside the original query
};

// Queries up to n_max KB form a single unit; longer ones are chunked into
// n_max KB units with the index's overlap. A unit's bin is
// ceil(size / 1 KB) clamped to [1, n_max].
std::vector<QueryUnit> segment_query(ByteView query, const IngestConfig& config);

SizeBin bin_for_length(std::size_t bytes, int n_max);

// {k-1, k, k+1, k+2} intersected with [1, n_max], ascending.
std::vector<SizeBin> candidate_bins(SizeBin unit_bin, int n_max);

// Distances from one query unit to all blocks of one bin, in block_id order
// (distances[i] belongs to index.blocks(bin)[i]).
struct DistanceSample {
  std::uint32_t unit_ordinal = 0;
  SizeBin bin;
  std::vector<double> distances;
};

DistanceSample sample_distances(const QueryUnit& unit, BitCost unit_size, SizeBin bin,
                                const CorpusIndex& index);
DistanceSample sample_distances_serial(const QueryUnit& unit, BitCost unit_size, SizeBin bin,
                                       const CorpusIndex& index);

struct ScoredQuery {
  std::vector<QueryUnit> units;
  std::vector<DistanceSample> samples;
};

// Throws Error(kInvalidArgument) for an empty query.
ScoredQuery score(ByteView query, const CorpusIndex& index);

// Bins with fewer blocks than this contribute no votes.
inline constexpr std::size_t kMinSampleSize = 3;

struct FlaggedBlock {
  Block block;
  double distance = 0.0;
  std::uint32_t unit_ordinal = 0;
};

struct SkippedSample {
  std::uint32_t unit_ordinal = 0;
  SizeBin bin;
  std::size_t size = 0;
};

struct QueryResult {
  double alpha = 0.0;
  // Sorted by (distance, block_id, unit_ordinal).
  std::vector<FlaggedBlock> flagged;
  // Documents with at least one vote.
  std::map<std::string, int> votes;
  // By votes descending, then best flagged distance, then doc_id.
  std::vector<std::string> ranking;
  // Sorted, de-duplicated ranges of flagged blocks per document.
  std::map<std::string, std::vector<ByteRange>> highlights;
  std::vector<SkippedSample> skipped;
  std::size_t unit_count = 0;
  std::size_t sample_count = 0;  // samples large enough to vote
};

// Throws Error(kInvalidArgument) if alpha is outside [0, 1].
QueryResult vote(const ScoredQuery& scored, const CorpusIndex& index, double alpha, GTable& gtable);

QueryResult query(ByteView query_bytes, double alpha, const CorpusIndex& index, GTable& gtable);

}  // namespace ncdsearch
