#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "ncdsearch/corpus.hpp"
#include "ncdsearch/outliers.hpp"

namespace ncdsearch {

inline constexpr const char* kVersion = "0.1.0";

struct EngineConfig {
  int n_max_bins = 32;
  double overlap_fraction = 0.10;
  double alpha = 0.05;
  int max_blocks_shown = 50;
  int gtable_replicates = GTable::kDefaultReplicates;
  std::uint64_t rng_seed = GTable::kDefaultSeed;

  // Throws Error(kConfig).
  void validate() const;
  IngestConfig ingest_config() const;
};

// Key-value text: one `key = value` per line, `#` starts a comment.
// Keys are the EngineConfig field names. Unknown keys and unparsable values
// throw Error(kConfig). Keys absent from the text keep their value in `base`.
EngineConfig parse_config(std::string_view text, EngineConfig base = {});
EngineConfig load_config(const std::filesystem::path& path, EngineConfig base = {});

}  // namespace ncdsearch
