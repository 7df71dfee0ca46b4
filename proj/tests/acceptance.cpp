// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [data_dir]
//
// data_dir defaults to the bundled data directory and must contain
// sotu/corpus with the 30 desk-corpus addresses.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "ncdsearch/compressor.hpp"
#include "ncdsearch/corpus.hpp"
#include "ncdsearch/distance.hpp"
#include "ncdsearch/evaluation.hpp"
#include "ncdsearch/outliers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ncdsearch;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) outcome_.pass = false;
    if (!outcome_.detail.empty()) outcome_.detail += "; ";
    outcome_.detail += what + (ok ? "" : " [fail]");
  }
  Outcome take() { return std::move(outcome_); }

 private:
  Outcome outcome_;
};

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int failures = 0;

void criterion(const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = seconds_since(start);
  if (time_limit_s > 0 && elapsed > time_limit_s) {
    o.pass = false;
    o.detail += "; runtime over " + fmt(time_limit_s, 0) + " s [fail]";
  }
  failures += !o.pass;
  std::printf("%s  %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), elapsed);
  std::fflush(stdout);
}

std::string mixed_input(std::mt19937_64& rng, std::size_t n, int kind) {
  switch (kind % 3) {
    case 0:
      return testing::random_bytes(rng, n);
    case 1:
      return testing::random_over(rng, n, "abcd");
    default:
      return testing::random_words(rng, n);
  }
}

Outcome compressor_correctness() {
  Checks c;
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> len(1, 64 * 1024);
  int round_trip_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto s = mixed_input(rng, len(rng), t);
    const auto phrases = lz_parse(s);
    round_trip_bad += lz_decode(phrases) != s || total_cost(phrases) != compressed_size(s);
  }
  c.expect(round_trip_bad == 0, "round trip " + std::to_string(1000 - round_trip_bad) + "/1000");

  // A, then 40 KB of noise, then A again: the second A must be one match
  // reaching back past the noise.
  const auto a = testing::random_bytes(rng, 4096);
  const auto b = testing::random_bytes(rng, 40 * 1024);
  const auto aba = a + b + a;
  bool found = false;
  std::size_t pos = 0;
  for (const auto& p : lz_parse(aba)) {
    if (pos == a.size() + b.size()) {
      found = p == Phrase::make_match(static_cast<std::uint32_t>(a.size() + b.size()), 4096);
    }
    pos += p.span();
  }
  c.expect(found, "A|B|A long-range match");

  std::uniform_int_distribution<std::size_t> small(0, 300);
  int oracle_bad = 0;
  for (int t = 0; t < 1200; ++t) {
    const auto s = t % 2 ? testing::random_over(rng, small(rng), "ab") : testing::random_words(rng, small(rng));
    const auto expected = testing::naive_parse(s);
    oracle_bad += lz_parse(s) != expected || compressed_size(s).bits != testing::oracle_cost(expected);
  }
  c.expect(oracle_bad == 0, "quadratic oracle " + std::to_string(1200 - oracle_bad) + "/1200");
  return c.take();
}

Outcome ncd_properties() {
  Checks c;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> len(1, 32 * 1024);
  double lo = 1e9, hi = -1e9, worst_self = 0.0;
  int asymmetric = 0;
  for (int t = 0; t < 200; ++t) {
    // Half the pairs share a content kind, so distances spread below 1.
    const auto x = mixed_input(rng, len(rng), t);
    const auto y = mixed_input(rng, len(rng), t % 2 ? t : t + 1);
    const double d = ncd(x, y);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    asymmetric += d != ncd(y, x);
    worst_self = std::max(worst_self, ncd(x, x));
  }
  c.expect(lo >= 0.0 && hi <= 1.1, "range [" + fmt(lo) + ", " + fmt(hi) + "]");
  c.expect(asymmetric == 0, "asymmetric pairs " + std::to_string(asymmetric));
  c.expect(worst_self <= 0.05, "max NCD(x,x) " + fmt(worst_self, 4));
  double min_random = 2.0;
  for (int t = 0; t < 200; ++t) {
    min_random = std::min(min_random, ncd(testing::random_bytes(rng, 4096), testing::random_bytes(rng, 4096)));
  }
  c.expect(min_random >= 0.9, "min NCD of random 4KB pairs " + fmt(min_random, 4));
  return c.take();
}

Outcome chunker_example() {
  Checks c;
  const std::size_t kb = 1024;
  const auto blocks = chunk(40 * kb, 10 * kb, 0.10, static_cast<std::size_t>(std::llround(10 * kb * 0.5)));
  std::size_t stored = 0;
  for (const auto& r : blocks) stored += r.size();
  c.expect(blocks.size() == 5, std::to_string(blocks.size()) + " blocks");
  c.expect(stored >= 40 * kb && stored <= 50 * kb, "stored " + std::to_string(stored) + " bytes");
  return c.take();
}

Outcome hampel_calibration() {
  Checks c;
  const int n = 200;
  const double alpha = 0.05;
  const double g = estimate_g(n, alpha, 10000, 1);
  std::mt19937_64 rng(303);
  std::normal_distribution<double> normal;
  int flagged_samples = 0;
  std::vector<double> x(n);
  for (int t = 0; t < 1000; ++t) {
    for (auto& v : x) v = normal(rng);
    flagged_samples += !hampel_lower(x, g).flagged.empty();
  }
  const double rate = flagged_samples / 1000.0;
  c.expect(rate >= alpha / 4 && rate <= alpha, "flag rate " + fmt(rate) + " at g=" + fmt(g));

  const double g2 = estimate_g(n, alpha, 10000, 2);
  const double rel = std::fabs(g - g2) / g;
  c.expect(rel <= 0.05, "seed drift " + fmt(100 * rel, 2) + "%");

  int mismatches = 0, cases = 0;
  for (int size : {5, 12, 31}) {
    for (int replicates : {1, 7, 20, 50}) {
      std::vector<double> stats;
      for (int r = 0; r < replicates; ++r) {
        auto stream = replicate_stream(99, static_cast<std::uint64_t>(r));
        std::normal_distribution<double> draw(0.0, 1.0);
        std::vector<double> sample(static_cast<std::size_t>(size));
        for (auto& v : sample) v = draw(stream);
        stats.push_back(testing::statistic_oracle(sample));
      }
      for (int milli : {10, 50, 100, 500, 900}) {
        ++cases;
        mismatches += estimate_g(size, milli / 1000.0, replicates, 99) != testing::quantile_oracle(stats, milli);
      }
    }
  }
  c.expect(mismatches == 0, "small-R oracle " + std::to_string(cases - mismatches) + "/" + std::to_string(cases));
  return c.take();
}

struct ExperimentRun {
  ExperimentSet set;
  CorpusIndex index;
  Retrievals retrievals;
  RocReport report;
  std::string csv;
  double seconds = 0.0;
};

ExperimentRun run_experiment(int experiment, const std::vector<SourceDocument>& corpus,
                             const std::vector<SourceDocument>& external) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentOptions options;
  options.max_queries = 20;
  options.seed = 1;
  ExperimentRun run;
  run.set = experiment == 1   ? make_experiment1(corpus, options)
            : experiment == 2 ? make_experiment2(corpus, options)
                              : make_experiment3(corpus, external, options);
  run.index.ingest(run.set.corpus);
  GTable gtable;
  const auto grid = default_alpha_grid();
  run.retrievals = retrieve(run.index, run.set.queries, grid, gtable);
  run.report = roc_from_retrievals(run.index, run.set.queries, run.retrievals);
  std::ostringstream csv;
  write_roc_csv(csv, run.report);
  run.csv = csv.str();
  run.seconds = seconds_since(start);
  return run;
}

std::size_t alpha_index(const RocReport& report, double alpha) {
  for (std::size_t i = 0; i < report.alpha_grid.size(); ++i) {
    if (report.alpha_grid[i] == alpha) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "alpha not on the grid");
}

// Counts queries whose source document gets a vote and ranks within `top`.
int sources_within(const ExperimentRun& run, double alpha, std::size_t top) {
  const auto a = alpha_index(run.report, alpha);
  int hits = 0;
  for (const auto& q : run.report.queries) {
    const auto rank = q.points[a].best_relevant_rank;
    hits += rank >= 1 && static_cast<std::size_t>(rank) <= top;
  }
  return hits;
}

Outcome experiment1(const ExperimentRun& run) {
  Checks c;
  const int queries = static_cast<int>(run.report.queries.size());
  const int first = sources_within(run, 0.05, 1);
  c.expect(queries == 20, std::to_string(queries) + " queries on " + std::to_string(run.index.documents().size()) +
                              " documents");
  c.expect(first * 10 >= queries * 9, "source first " + std::to_string(first) + "/" + std::to_string(queries));
  const double auc = run.report.mean_auc.value_or(0.0);
  c.expect(auc > 0.95, "mean AUC " + fmt(auc, 4));
  c.expect(run.seconds < 600.0, "experiment " + fmt(run.seconds, 1) + " s");
  return c.take();
}

Outcome experiment2(const ExperimentRun& run) {
  Checks c;
  const int queries = static_cast<int>(run.report.queries.size());
  const int top3 = sources_within(run, 0.05, 3);
  c.expect(top3 * 10 >= queries * 6, "source in top 3 " + std::to_string(top3) + "/" + std::to_string(queries));
  const double auc = run.report.mean_auc.value_or(0.0);
  c.expect(auc > 0.6, "mean AUC " + fmt(auc, 4));
  return c.take();
}

Outcome roc_sanity(const std::vector<const ExperimentRun*>& runs) {
  Checks c;
  int non_monotone = 0, bad_origin = 0;
  for (const auto* run : runs) {
    for (const auto& q : run->report.queries) {
      const auto& p = q.points;
      bad_origin += run->report.alpha_grid.front() != 0.0 || p.front().tp != 0 || p.front().fp != 0;
      for (std::size_t i = 1; i < p.size(); ++i) non_monotone += p[i].tp < p[i - 1].tp || p[i].fp < p[i - 1].fp;
    }
  }
  c.expect(non_monotone == 0, "non-monotone steps " + std::to_string(non_monotone));
  c.expect(bad_origin == 0, "curves off (0,0) at alpha 0: " + std::to_string(bad_origin));

  const auto& base = *runs.front();
  double sum = 0.0;
  int trials = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto shuffled = shuffle_relevance(base.set.queries, base.index, seed);
    const auto null_report = roc_from_retrievals(base.index, shuffled, base.retrievals);
    if (null_report.mean_auc) {
      sum += *null_report.mean_auc;
      ++trials;
    }
  }
  const double null_auc = trials > 0 ? sum / trials : -1.0;
  c.expect(null_auc >= 0.4 && null_auc <= 0.6, "shuffled-label mean AUC " + fmt(null_auc, 4) + " over " +
                                                   std::to_string(trials) + " shuffles");
  return c.take();
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  omp_set_num_threads(1);
  const std::filesystem::path data = argc > 1 ? std::filesystem::path(argv[1]) : testing::data_dir();

  criterion("compressor correctness", 120, compressor_correctness);
  criterion("NCD properties", 120, ncd_properties);
  criterion("chunker 40KB example", 0, chunker_example);
  criterion("Hampel calibration", 0, hampel_calibration);

  std::vector<SourceDocument> corpus, external;
  try {
    corpus = read_document_directory(data / "sotu" / "corpus");
    external = read_document_directory(data / "sotu" / "external");
  } catch (const std::exception& e) {
    std::printf("cannot read desk corpus under %s: %s\n", data.string().c_str(), e.what());
  }

  std::vector<ExperimentRun> first(3);
  criterion("experiment 1 (in corpus)", 600, [&] {
    first[0] = run_experiment(1, corpus, external);
    return experiment1(first[0]);
  });
  criterion("experiment 2 (excised)", 600, [&] {
    first[1] = run_experiment(2, corpus, external);
    return experiment2(first[1]);
  });
  criterion("ROC sanity", 0, [&] {
    first[2] = run_experiment(3, corpus, external);
    return roc_sanity({&first[0], &first[1], &first[2]});
  });
  criterion("determinism", 0, [&] {
    Checks c;
    for (int e = 1; e <= 3; ++e) {
      const auto again = run_experiment(e, corpus, external);
      const auto& before = first[static_cast<std::size_t>(e - 1)].csv;
      c.expect(!before.empty() && again.csv == before,
               "experiment " + std::to_string(e) + " CSV " + std::to_string(again.csv.size()) + " bytes");
    }
    return c.take();
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
