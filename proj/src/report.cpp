#include "ncdsearch/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ncdsearch {
using nlohmann::json;

namespace {

std::unordered_map<std::string, double> best_distances(const QueryResult& result, const CorpusIndex& index) {
  std::unordered_map<std::string, double> best;
  for (const auto& f : result.flagged) {
    const auto& id = index.documents()[f.block.doc_index].doc_id;
    auto [it, inserted] = best.emplace(id, f.distance);
    if (!inserted) it->second = std::min(it->second, f.distance);
  }
  return best;
}

}  // namespace

json query_result_json(const QueryResult& result, const CorpusIndex& index, std::size_t max_blocks,
                       const std::string& query_id) {
  const auto docs = index.documents();
  const auto best = best_distances(result, index);

  json ranking = json::array();
  for (const auto& id : result.ranking) {
    const auto d = *index.document_index(id);
    ranking.push_back(
        {{"doc_id", id}, {"name", docs[d].name}, {"votes", result.votes.at(id)}, {"best_ncd", best.at(id)}});
  }

  json flagged = json::array();
  for (std::size_t i = 0; i < result.flagged.size() && i < max_blocks; ++i) {
    const auto& f = result.flagged[i];
    const auto& doc = docs[f.block.doc_index];
    flagged.push_back({{"ncd", f.distance},
                       {"doc_id", doc.doc_id},
                       {"file", doc.name},
                       {"bin", f.block.bin.k},
                       {"bin_bytes", f.block.bin.nominal_bytes()},
                       {"ordinal", f.block.ordinal},
                       {"block_id", f.block.block_id},
                       {"byte_range", {f.block.range.begin, f.block.range.end}},
                       {"unit", f.unit_ordinal}});
  }

  json highlights = json::object();
  for (const auto& [id, ranges] : result.highlights) {
    json spans = json::array();
    for (const auto& r : ranges) spans.push_back({r.begin, r.end});
    highlights[id] = std::move(spans);
  }

  json votes = json::object();
  for (const auto& [id, n] : result.votes) votes[id] = n;

  return json{{"query_id", query_id},
              {"alpha", result.alpha},
              {"units", result.unit_count},
              {"samples", result.sample_count},
              {"skipped_samples", result.skipped.size()},
              {"ranking", std::move(ranking)},
              {"votes", std::move(votes)},
              {"flagged", std::move(flagged)},
              {"flagged_total", result.flagged.size()},
              {"highlights", std::move(highlights)}};
}

json document_json(const CorpusIndex& index, std::size_t doc_index, bool with_text) {
  const auto& d = index.documents()[doc_index];
  json out = {{"doc_id", d.doc_id},
              {"name", d.name},
              {"byte_length", d.byte_length},
              {"subjects", d.subjects},
              {"source_uri", d.source_uri}};
  // Raw bytes; serialize with error_handler_t::replace for non-UTF-8 input.
  if (with_text) out["text"] = std::string(index.document_text(doc_index));
  return out;
}

std::string query_result_text(const QueryResult& result, const CorpusIndex& index, std::size_t max_blocks) {
  std::ostringstream out;
  const auto docs = index.documents();
  const auto best = best_distances(result, index);
  char line[512];

  out << "alpha " << result.alpha << ", " << result.unit_count << " query unit(s), " << result.sample_count
      << " distance sample(s)\n";
  if (result.ranking.empty()) {
    out << "no documents retrieved\n";
    return out.str();
  }
  out << "\nrank  votes  best_ncd  document\n";
  for (std::size_t i = 0; i < result.ranking.size(); ++i) {
    const auto& id = result.ranking[i];
    const auto& doc = docs[*index.document_index(id)];
    std::snprintf(line, sizeof line, "%4zu  %5d  %8.4f  %s\n", i + 1, result.votes.at(id), best.at(id),
                  doc.name.c_str());
    out << line;
  }
  out << "\nflagged blocks (" << std::min(max_blocks, result.flagged.size()) << " of " << result.flagged.size()
      << ")\n";
  for (std::size_t i = 0; i < result.flagged.size() && i < max_blocks; ++i) {
    const auto& f = result.flagged[i];
    std::snprintf(line, sizeof line, "  ncd %.4f  %s  database %dKB, block %u  [%zu, %zu)\n", f.distance,
                  docs[f.block.doc_index].name.c_str(), f.block.bin.k, f.block.ordinal, f.block.range.begin,
                  f.block.range.end);
    out << line;
  }
  return out.str();
}

json error_json(std::string_view code, std::string_view message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

std::string dump_json(const json& value, int indent) {
  return value.dump(indent, ' ', false, json::error_handler_t::replace);
}

}  // namespace ncdsearch
