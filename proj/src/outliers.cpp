#include "ncdsearch/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "ncdsearch/kernels.hpp"

namespace ncdsearch {
namespace {

// Median of `v`, reordering it. Mean of the two central values for even sizes.
double median_inplace(std::span<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RobustStats robust_stats(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorCode::kInvalidArgument, "robust_stats of an empty sample");
  std::vector<double> work(sample.begin(), sample.end());
  const double m = median_inplace(work);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = std::fabs(sample[i] - m);
  return RobustStats{m, median_inplace(work), sample.size()};
}

double hampel_statistic(std::span<double> sample) {
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  const double x_min = *lo;
  const double x_max = *hi;
  const double m = median_inplace(sample);
  for (auto& x : sample) x = std::fabs(x - m);
  const double s = median_inplace(sample);
  if (s == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(x_max - m, m - x_min) / s;
}

std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t replicate) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(replicate + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

void draw_clean_sample(std::mt19937_64& rng, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> work(out.size());
  for (;;) {
    for (auto& x : out) x = normal(rng);
    std::copy(out.begin(), out.end(), work.begin());
    const double m = median_inplace(work);
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = std::fabs(out[i] - m);
    if (median_inplace(work) > 0.0) return;
  }
}

double upper_quantile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty set");
  const double r = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * r - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

double estimate_g(int n, double alpha, int replicates, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "estimate_g needs n >= 3");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "estimate_g needs 0 < alpha < 1");
  if (replicates < 1) throw Error(ErrorCode::kInvalidArgument, "estimate_g needs replicates >= 1");
  auto stats = kernels::hampel_statistics(n, replicates, seed);
  std::sort(stats.begin(), stats.end());
  return upper_quantile(stats, alpha);
}

OutlierVerdict hampel_lower(std::span<const double> sample, double g) {
  if (sample.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "hampel_lower needs at least 3 values");
  }
  OutlierVerdict verdict;
  verdict.g_used = g;
  verdict.stats = robust_stats(sample);
  const double m = verdict.stats.median;
  const double s = verdict.stats.mad > 0.0 ? verdict.stats.mad : kMadFloor * std::max(std::fabs(m), 1.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i] < m && (m - sample[i]) / s > g) verdict.flagged.push_back(i);
  }
  return verdict;
}

GTable::GTable(int replicates, std::uint64_t seed) : replicates_(replicates), seed_(seed) {
  if (replicates_ < 1) throw Error(ErrorCode::kConfig, "g-table replicates must be positive");
}

GTable::GTable(const GTable& other) : replicates_(other.replicates_), seed_(other.seed_) {
  std::shared_lock lock(other.mutex_);
  entries_ = other.entries_;
  statistics_ = other.statistics_;
}

std::shared_ptr<const std::vector<double>> GTable::statistics_for(int n) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = statistics_.find(n); it != statistics_.end()) return it->second;
  }
  auto stats = kernels::hampel_statistics(n, replicates_, seed_);
  std::sort(stats.begin(), stats.end());
  auto shared = std::make_shared<const std::vector<double>>(std::move(stats));
  std::unique_lock lock(mutex_);
  return statistics_.emplace(n, std::move(shared)).first->second;
}

double GTable::g(int n, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be in [0, 1]");
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  if (alpha == 1.0) return -std::numeric_limits<double>::infinity();
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "g undefined for n < 3");
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find({n, alpha}); it != entries_.end()) return it->second;
  }
  const double value = upper_quantile(*statistics_for(n), alpha);
  std::unique_lock lock(mutex_);
  entries_.emplace(std::make_pair(n, alpha), value);
  return value;
}

std::vector<GTable::Row> GTable::rows() const {
  std::shared_lock lock(mutex_);
  std::vector<Row> out;
  out.reserve(entries_.size());
  for (const auto& [key, g] : entries_) out.push_back(Row{key.first, key.second, g});
  return out;
}

void GTable::save(const std::filesystem::path& path) const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows()) rows_json.push_back({{"n", row.n}, {"alpha", row.alpha}, {"g", row.g}});
  const nlohmann::json doc = {{"format", "ncdsearch-gtable"},
                              {"format_version", kGTableFormatVersion},
                              {"replicates", replicates_},
                              {"seed", seed_},
                              {"rows", std::move(rows_json)}};
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << doc.dump(1) << "\n";
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

GTable GTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open g-table " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto doc = nlohmann::json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || doc.value("format", "") != "ncdsearch-gtable") {
    throw Error(ErrorCode::kCorrupt, "not a g-table: " + path.string());
  }
  if (doc.value("format_version", -1) != kGTableFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported g-table version in " + path.string());
  }
  try {
    GTable table(doc.at("replicates").get<int>(), doc.at("seed").get<std::uint64_t>());
    for (const auto& row : doc.at("rows")) {
      table.entries_.emplace(std::make_pair(row.at("n").get<int>(), row.at("alpha").get<double>()),
                             row.at("g").get<double>());
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("malformed g-table: ") + e.what());
  }
}

}  // namespace ncdsearch
