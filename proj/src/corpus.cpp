#include "ncdsearch/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncdsearch/kernels.hpp"

namespace ncdsearch {

void IngestConfig::validate() const {
  if (n_max_bins < 1 || n_max_bins > 1024) {
    throw Error(ErrorCode::kConfig, "n_max_bins must be in [1, 1024], got " + std::to_string(n_max_bins));
  }
  if (!(overlap_fraction >= 0.01 && overlap_fraction <= 0.99)) {
    throw Error(ErrorCode::kConfig,
                "overlap_fraction must be in [0.01, 0.99], got " + std::to_string(overlap_fraction));
  }
  if (!(min_remainder_fraction > 0.0 && min_remainder_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfig, "min_remainder_fraction must be in (0, 1]");
  }
}

std::size_t chunk_step(std::size_t nominal_bytes, double overlap_fraction) {
  const auto step = std::llround(static_cast<double>(nominal_bytes) * (1.0 - overlap_fraction));
  return static_cast<std::size_t>(std::max<long long>(1, step));
}

std::vector<ByteRange> chunk(std::size_t length, std::size_t nominal_bytes, double overlap_fraction,
                             std::size_t min_remainder) {
  if (!(overlap_fraction >= 0.01 && overlap_fraction <= 0.99)) {
    throw Error(ErrorCode::kConfig, "overlap must be in [0.01, 0.99], got " + std::to_string(overlap_fraction));
  }
  if (nominal_bytes == 0) throw Error(ErrorCode::kConfig, "nominal block size must be positive");
  if (length == 0) throw Error(ErrorCode::kInvalidArgument, "cannot chunk an empty document");

  if (length <= nominal_bytes) return {ByteRange{0, length}};

  const auto step = chunk_step(nominal_bytes, overlap_fraction);
  std::vector<ByteRange> ranges;
  for (std::size_t start = 0;; start += step) {
    const auto end = std::min(start + nominal_bytes, length);
    ranges.push_back({start, end});
    if (end == length) break;
  }
  if (auto& last = ranges.back(); last.size() < min_remainder) {
    last = {length - nominal_bytes, length};
  }
  return ranges;
}

std::vector<ByteRange> chunk(ByteView data, SizeBin bin, const IngestConfig& config) {
  const auto nominal = bin.nominal_bytes();
  const auto min_remainder =
      static_cast<std::size_t>(std::llround(static_cast<double>(nominal) * config.min_remainder_fraction));
  return chunk(data.size(), nominal, config.overlap_fraction, min_remainder);
}

CorpusIndex::CorpusIndex(IngestConfig config) : config_(config) {
  config_.validate();
  bins_.resize(static_cast<std::size_t>(config_.n_max_bins));
}

std::optional<std::size_t> CorpusIndex::document_index(std::string_view doc_id) const {
  if (auto it = by_id_.find(std::string(doc_id)); it != by_id_.end()) return it->second;
  return std::nullopt;
}

std::span<const Block> CorpusIndex::blocks(SizeBin bin) const {
  if (bin.k < 1 || bin.k > config_.n_max_bins) return {};
  return bins_[static_cast<std::size_t>(bin.k - 1)];
}

ByteView CorpusIndex::block_bytes(const Block& block) const {
  return ByteView(texts_.at(block.doc_index)).substr(block.range.begin, block.range.size());
}

std::size_t CorpusIndex::block_count() const {
  std::size_t n = 0;
  for (const auto& bin : bins_) n += bin.size();
  return n;
}

std::vector<Block> CorpusIndex::plan_blocks(std::uint32_t doc_index) {
  std::vector<Block> planned;
  const ByteView text = texts_[doc_index];
  for (int k = 1; k <= config_.n_max_bins; ++k) {
    const auto ranges = chunk(text, SizeBin{k}, config_);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      planned.push_back(Block{next_block_id_++, doc_index, SizeBin{k}, static_cast<std::uint32_t>(i),
                              ranges[i], BitCost{}});
    }
  }
  return planned;
}

bool CorpusIndex::ingest(const SourceDocument& doc) {
  return ingest(std::span<const SourceDocument>(&doc, 1)) == 1;
}

std::size_t CorpusIndex::ingest(std::span<const SourceDocument> docs) {
  // Validate the whole batch before touching any state.
  std::unordered_map<std::string, const SourceDocument*> batch;
  for (const auto& doc : docs) {
    if (doc.text.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "document '" + doc.doc_id + "' is empty");
    }
    if (doc.doc_id.empty()) throw Error(ErrorCode::kInvalidArgument, "document id must not be empty");
    const Bytes* existing = nullptr;
    if (auto idx = document_index(doc.doc_id)) existing = &texts_[*idx];
    if (auto it = batch.find(doc.doc_id); it != batch.end()) existing = &it->second->text;
    if (existing && *existing != doc.text) {
      throw Error(ErrorCode::kConflict, "document '" + doc.doc_id + "' already exists with different content");
    }
    batch.emplace(doc.doc_id, &doc);
  }

  std::vector<Block> planned;
  std::size_t added = 0;
  for (const auto& doc : docs) {
    if (document_index(doc.doc_id)) continue;
    const auto doc_index = static_cast<std::uint32_t>(documents_.size());
    std::vector<std::string> subjects = doc.subjects;
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    documents_.push_back(DocumentRecord{doc.doc_id, doc.name.empty() ? doc.doc_id : doc.name,
                                        doc.text.size(), std::move(subjects), doc.source_uri});
    texts_.push_back(doc.text);
    by_id_.emplace(doc.doc_id, doc_index);
    auto blocks = plan_blocks(doc_index);
    planned.insert(planned.end(), blocks.begin(), blocks.end());
    ++added;
  }

  std::vector<ByteView> views;
  views.reserve(planned.size());
  for (const auto& b : planned) views.push_back(block_bytes(b));
  const auto sizes = kernels::compressed_sizes(views);
  for (std::size_t i = 0; i < planned.size(); ++i) {
    planned[i].cached_size = sizes[i];
    bins_[static_cast<std::size_t>(planned[i].bin.k - 1)].push_back(planned[i]);
  }
  // Keep every bin in block_id order regardless of batch composition.
  for (auto& bin : bins_) {
    std::sort(bin.begin(), bin.end(), [](const Block& a, const Block& b) { return a.block_id < b.block_id; });
  }
  return added;
}

CorpusIndex CorpusIndex::restore(IngestConfig config, std::vector<DocumentRecord> documents,
                                 std::vector<Bytes> texts, std::vector<std::vector<Block>> bins,
                                 std::uint64_t next_block_id) {
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorrupt, std::string("stored config invalid: ") + e.what());
  }
  CorpusIndex index(config);
  if (documents.size() != texts.size()) throw Error(ErrorCode::kCorrupt, "document/blob count mismatch");
  if (bins.size() != static_cast<std::size_t>(config.n_max_bins)) {
    throw Error(ErrorCode::kCorrupt, "bin count does not match n_max_bins");
  }
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].byte_length != texts[i].size() || texts[i].empty()) {
      throw Error(ErrorCode::kCorrupt, "byte_length mismatch for '" + documents[i].doc_id + "'");
    }
    if (!index.by_id_.emplace(documents[i].doc_id, i).second) {
      throw Error(ErrorCode::kCorrupt, "duplicate doc_id '" + documents[i].doc_id + "'");
    }
  }
  for (std::size_t k = 0; k < bins.size(); ++k) {
    std::uint64_t last_id = 0;
    for (std::size_t j = 0; j < bins[k].size(); ++j) {
      const auto& b = bins[k][j];
      if (b.doc_index >= documents.size() || b.bin.k != static_cast<int>(k + 1) ||
          b.range.begin >= b.range.end || b.range.end > texts[b.doc_index].size() ||
          b.range.size() > b.bin.nominal_bytes() || b.block_id >= next_block_id ||
          (j > 0 && b.block_id <= last_id)) {
        throw Error(ErrorCode::kCorrupt, "inconsistent block " + std::to_string(b.block_id));
      }
      last_id = b.block_id;
    }
  }
  index.documents_ = std::move(documents);
  index.texts_ = std::move(texts);
  index.bins_ = std::move(bins);
  index.next_block_id_ = next_block_id;
  return index;
}

bool operator==(const CorpusIndex& a, const CorpusIndex& b) {
  return a.config_ == b.config_ && a.documents_ == b.documents_ && a.texts_ == b.texts_ &&
         a.bins_ == b.bins_ && a.next_block_id_ == b.next_block_id_;
}

}  // namespace ncdsearch
