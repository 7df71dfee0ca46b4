// Serial versus OpenMP kernels, plus single-call compressor and query costs.
//
//   bench_kernels [--benchmark_filter=...]
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "ncdsearch/compressor.hpp"
#include "ncdsearch/corpus.hpp"
#include "ncdsearch/engine.hpp"
#include "ncdsearch/kernels.hpp"

using namespace ncdsearch;

namespace {

std::string words(std::mt19937_64& rng, std::size_t n) {
  static const char* const kWords[] = {"the", "of", "and", "to", "in", "nation", "people", "congress", "states",
                                       "war", "peace", "treaty", "duty", "public", "union", "law"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kWords) - 1);
  std::string out;
  while (out.size() < n) {
    out += kWords[pick(rng)];
    out += ' ';
  }
  out.resize(n);
  return out;
}

std::vector<std::string> blocks(std::size_t count, std::size_t bytes) {
  std::mt19937_64 rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(words(rng, bytes));
  return out;
}

std::vector<ByteView> views(const std::vector<std::string>& items) {
  return {items.begin(), items.end()};
}

template <bool Parallel>
void BM_CompressedSizes(benchmark::State& state) {
  const auto items = blocks(64, static_cast<std::size_t>(state.range(0)));
  const auto v = views(items);
  for (auto _ : state) {
    auto sizes = Parallel ? kernels::compressed_sizes(v) : kernels::compressed_sizes_serial(v);
    benchmark::DoNotOptimize(sizes);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(64 * state.range(0)));
}

template <bool Parallel>
void BM_Distances(benchmark::State& state) {
  const auto items = blocks(64, static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(2);
  const auto q = words(rng, static_cast<std::size_t>(state.range(0)));
  const SizedBytes query{q, compressed_size(q)};
  std::vector<SizedBytes> targets;
  for (const auto& b : items) targets.push_back({b, compressed_size(b)});
  for (auto _ : state) {
    auto d = Parallel ? kernels::distances(query, targets) : kernels::distances_serial(query, targets);
    benchmark::DoNotOptimize(d);
  }
}

template <bool Parallel>
void BM_HampelStatistics(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto s = Parallel ? kernels::hampel_statistics(n, 2000, 7) : kernels::hampel_statistics_serial(n, 2000, 7);
    benchmark::DoNotOptimize(s);
  }
}

void BM_Query2KB(benchmark::State& state) {
  std::mt19937_64 rng(3);
  CorpusIndex index;
  for (int i = 0; i < 10; ++i) {
    SourceDocument d;
    d.doc_id = "d" + std::to_string(i);
    d.text = words(rng, 16 * 1024);
    index.ingest(d);
  }
  const auto q = std::string(index.document_text(7).substr(5000, 2048));
  GTable table(1000, 1);
  for (auto _ : state) {
    auto r = query(q, 0.05, index, table);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_CompressedSizes<false>)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompressedSizes<true>)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Distances<false>)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Distances<true>)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HampelStatistics<false>)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HampelStatistics<true>)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Query2KB)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
