#include "ncdsearch/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace ncdsearch {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::kConfig, "invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

}  // namespace

void EngineConfig::validate() const {
  ingest_config().validate();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kConfig, "alpha must be in [0, 1]");
  if (max_blocks_shown < 0) throw Error(ErrorCode::kConfig, "max_blocks_shown must be >= 0");
  if (gtable_replicates < 1000) throw Error(ErrorCode::kConfig, "gtable_replicates must be >= 1000");
}

IngestConfig EngineConfig::ingest_config() const {
  IngestConfig c;
  c.n_max_bins = n_max_bins;
  c.overlap_fraction = overlap_fraction;
  return c;
}

EngineConfig parse_config(std::string_view text, EngineConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "n_max_bins") {
      base.n_max_bins = parse_number<int>(key, value);
    } else if (key == "overlap_fraction") {
      base.overlap_fraction = parse_number<double>(key, value);
    } else if (key == "alpha") {
      base.alpha = parse_number<double>(key, value);
    } else if (key == "max_blocks_shown") {
      base.max_blocks_shown = parse_number<int>(key, value);
    } else if (key == "gtable_replicates") {
      base.gtable_replicates = parse_number<int>(key, value);
    } else if (key == "rng_seed") {
      base.rng_seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw Error(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
    }
  }
  return base;
}

EngineConfig load_config(const std::filesystem::path& path, EngineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

}  // namespace ncdsearch
