#pragma once

// JSON shapes shared by the CLI and the HTTP service.

#include <string>

#include <json.hpp>

#include "ncdsearch/corpus.hpp"
#include "ncdsearch/engine.hpp"

namespace ncdsearch {

// {
//   "query_id", "alpha", "units", "samples", "skipped_samples",
//   "ranking":   [{"doc_id", "name", "votes", "best_ncd"}],
//   "votes":     {doc_id: n},
//   "flagged":   [{"ncd", "doc_id", "file", "bin", "bin_bytes", "ordinal", "byte_range": [b, e], "unit"}],
//   "flagged_total",
//   "highlights": {doc_id: [[b, e], ...]}
// }
// `flagged` is truncated to max_blocks entries; everything else is complete.
nlohmann::json query_result_json(const QueryResult& result, const CorpusIndex& index, std::size_t max_blocks,
                                 const std::string& query_id = {});

nlohmann::json document_json(const CorpusIndex& index, std::size_t doc_index, bool with_text);

// Human-readable rendering for the terminal.
std::string query_result_text(const QueryResult& result, const CorpusIndex& index, std::size_t max_blocks);

nlohmann::json error_json(std::string_view code, std::string_view message);

// Serializes with invalid UTF-8 replaced by U+FFFD instead of throwing.
std::string dump_json(const nlohmann::json& value, int indent = -1);

}  // namespace ncdsearch
