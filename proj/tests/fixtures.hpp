#pragma once

#include <random>
#include <string>
#include <vector>

#include "ncdsearch/corpus.hpp"
#include "support.hpp"

namespace testing {

// 29 unrelated 8 KB documents plus one that contains the query verbatim.
struct PlantedCorpus {
  std::vector<ncdsearch::SourceDocument> documents;
  std::string query;
  std::string planted_id;
  std::size_t planted_offset = 0;
};

inline PlantedCorpus planted_corpus(std::uint64_t seed, std::size_t query_bytes = 2048) {
  std::mt19937_64 rng(seed);
  PlantedCorpus out;
  out.planted_id = "doc17";
  for (int i = 0; i < 30; ++i) {
    ncdsearch::SourceDocument d;
    d.doc_id = "doc" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    d.name = "Document " + std::to_string(i);
    d.text = random_words(rng, 8192);
    d.subjects = {i % 3 == 0 ? "red" : "blue"};
    out.documents.push_back(std::move(d));
  }
  auto& planted = out.documents[17];
  out.planted_offset = 3000;
  out.query = planted.text.substr(out.planted_offset, query_bytes);
  return out;
}

}  // namespace testing
