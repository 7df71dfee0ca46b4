#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#ifndef NCDSEARCH_DATA_DIR
#define NCDSEARCH_DATA_DIR "data"
#endif

namespace testing {

inline std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::string out(n, '\0');
  for (auto& c : out) c = static_cast<char>(rng() & 0xFF);
  return out;
}

// Bytes drawn from a small alphabet, so that repeats and matches are common.
inline std::string random_over(std::mt19937_64& rng, std::size_t n, std::string_view alphabet) {
  std::string out(n, '\0');
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (auto& c : out) c = alphabet[pick(rng)];
  return out;
}

// Pseudo-English: words from a fixed vocabulary, separated by spaces.
inline std::string random_words(std::mt19937_64& rng, std::size_t n) {
  static const char* const kWords[] = {"the",   "of",     "and",    "to",      "in",     "government", "people",
                                       "state", "nation", "public", "congress", "upon",   "year",       "great",
                                       "law",   "power",  "peace",  "country",  "duty",   "interest",   "which"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
  std::string out;
  while (out.size() < n) {
    out += kWords[pick(rng)];
    out += ' ';
  }
  out.resize(n);
  return out;
}

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ncdsearch-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path data_dir() { return NCDSEARCH_DATA_DIR; }

}  // namespace testing
