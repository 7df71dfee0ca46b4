#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ncdsearch/common.hpp"

namespace ncdsearch {

inline constexpr std::size_t kBinUnitBytes = 1024;

// A size interval of the index: blocks of nominally k KB.
struct SizeBin {
  int k = 1;

  constexpr std::size_t nominal_bytes() const { return static_cast<std::size_t>(k) * kBinUnitBytes; }
  friend constexpr auto operator<=>(SizeBin, SizeBin) = default;
};

// Half-open [begin, end) byte offsets into a document.
struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  constexpr std::size_t size() const { return end - begin; }
  friend constexpr bool operator==(ByteRange, ByteRange) = default;
  friend constexpr auto operator<=>(ByteRange, ByteRange) = default;
};

struct IngestConfig {
  int n_max_bins = 32;
  double overlap_fraction = 0.10;
  // Trailing blocks shorter than this fraction of the nominal size are
  // re-anchored to end at the document end.
  double min_remainder_fraction = 0.5;

  // Throws Error(kConfig) on out-of-range values.
  void validate() const;
  friend bool operator==(const IngestConfig&, const IngestConfig&) = default;
};

// Distance between consecutive block starts: round(nominal * (1 - overlap)), at least 1.
std::size_t chunk_step(std::size_t nominal_bytes, double overlap_fraction);

// Sliding-window division of a document of `length` bytes into blocks of at
// most `nominal_bytes`. Block i starts at i * step. When the final block would
// be shorter than `min_remainder` bytes it is replaced by a full-size block
// ending at the document end. Documents no longer than one block yield a single
// block. Throws Error(kConfig) if overlap_fraction is outside [0.01, 0.99].
std::vector<ByteRange> chunk(std::size_t length, std::size_t nominal_bytes, double overlap_fraction,
                             std::size_t min_remainder);
std::vector<ByteRange> chunk(ByteView data, SizeBin bin, const IngestConfig& config);

// Input to ingestion.
struct SourceDocument {
  std::string doc_id;
  std::string name;
  Bytes text;
  std::vector<std::string> subjects;
  std::string source_uri;
};

struct DocumentRecord {
  std::string doc_id;
  std::string name;
  std::uint64_t byte_length = 0;
  std::vector<std::string> subjects;  // sorted, unique
  std::string source_uri;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

struct Block {
  std::uint64_t block_id = 0;
  std::uint32_t doc_index = 0;  // position in CorpusIndex::documents()
  SizeBin bin;
  std::uint32_t ordinal = 0;
  ByteRange range;
  BitCost cached_size;

  friend bool operator==(const Block&, const Block&) = default;
};

// Documents plus their blocks, partitioned by size bin. Blocks hold byte
// ranges into the stored document text, never copies.
class CorpusIndex {
 public:
  explicit CorpusIndex(IngestConfig config = {});

  const IngestConfig& config() const { return config_; }

  std::span<const DocumentRecord> documents() const { return documents_; }
  std::optional<std::size_t> document_index(std::string_view doc_id) const;
  ByteView document_text(std::size_t doc_index) const { return texts_.at(doc_index); }

  std::span<const Block> blocks(SizeBin bin) const;
  ByteView block_bytes(const Block& block) const;
  std::size_t block_count() const;
  std::uint64_t next_block_id() const { return next_block_id_; }

  // Chunks the document in every bin and stores the blocks with their
  // compressed sizes. Returns false (and changes nothing) if an identical
  // document with the same id is already present. Throws Error(kConflict) if
  // the id exists with different bytes, Error(kInvalidArgument) if empty.
  bool ingest(const SourceDocument& doc);

  // Batch form; block compression runs in parallel.
  std::size_t ingest(std::span<const SourceDocument> docs);

  // Rebuilds an index from persisted parts, checking structural invariants.
  // Throws Error(kCorrupt) on inconsistency.
  static CorpusIndex restore(IngestConfig config, std::vector<DocumentRecord> documents,
                             std::vector<Bytes> texts, std::vector<std::vector<Block>> bins,
                             std::uint64_t next_block_id);

  friend bool operator==(const CorpusIndex&, const CorpusIndex&);

 private:
  std::vector<Block> plan_blocks(std::uint32_t doc_index);

  IngestConfig config_;
  std::vector<DocumentRecord> documents_;
  std::vector<Bytes> texts_;
  std::vector<std::vector<Block>> bins_;  // bins_[k - 1]
  std::unordered_map<std::string, std::size_t> by_id_;
  std::uint64_t next_block_id_ = 0;
};

// On-disk layout of a corpus directory:
//   manifest.json   format tag, version, CRC-32 of the body, body
//   blobs/NNNNNN.txt  verbatim document bytes
inline constexpr int kCorpusFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";

void persist(const CorpusIndex& index, const std::filesystem::path& dir);

// Throws Error(kNotFound) for a missing manifest or blob,
// Error(kVersionMismatch) for an unknown format version and
// Error(kCorrupt) for checksum or structure failures.
CorpusIndex load(const std::filesystem::path& dir);

// Plain-text documents in a directory: every *.txt file, sorted by name.
// doc_id is the file stem. An optional sidecar <file>.meta.json may carry
// "name" and "subjects".
std::vector<SourceDocument> read_document_directory(const std::filesystem::path& dir);

std::uint32_t crc32_of(ByteView data);

}  // namespace ncdsearch
