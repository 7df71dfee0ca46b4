#include "ncdsearch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <spdlog/spdlog.h>

namespace ncdsearch {
namespace {

std::string pad2(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

// Documents long enough for a fragment, in seeded random order.
std::vector<std::size_t> pick_documents(std::span<const SourceDocument> corpus, const ExperimentOptions& options,
                                        std::vector<std::string>& warnings) {
  if (options.fragment_length < kBinUnitBytes) {
    throw Error(ErrorCode::kConfig, "fragment_length must be at least 1024 bytes");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> picked;
  for (const auto i : order) {
    if (corpus[i].text.size() < options.fragment_length) {
      warnings.push_back("document '" + corpus[i].doc_id + "' shorter than fragment length, skipped");
      continue;
    }
    picked.push_back(i);
    if (options.max_queries != 0 && picked.size() == options.max_queries) break;
  }
  return picked;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

ExperimentSet make_experiment1(std::span<const SourceDocument> corpus, const ExperimentOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "experiment needs a non-empty corpus");
  ExperimentSet set;
  set.kind = ExperimentKind::kFragmentInCorpus;
  set.corpus.assign(corpus.begin(), corpus.end());
  const auto picked = pick_documents(corpus, options, set.warnings);
  for (const auto i : picked) {
    const auto& doc = corpus[i];
    LabeledQuery q;
    q.query_id = "e1-q" + pad2(set.queries.size()) + "-" + doc.doc_id;
    q.kind = set.kind;
    q.text = doc.text.substr(0, options.fragment_length);
    q.source = doc.doc_id;
    q.source_range = {0, options.fragment_length};
    q.relevant_doc_ids = {doc.doc_id};
    set.queries.push_back(std::move(q));
  }
  return set;
}

ExperimentSet make_experiment2(std::span<const SourceDocument> corpus, const ExperimentOptions& options) {
  auto set = make_experiment1(corpus, options);
  set.kind = ExperimentKind::kFragmentExcised;
  for (auto& q : set.queries) {
    q.kind = set.kind;
    q.query_id.replace(0, 2, "e2");
  }
  std::vector<SourceDocument> excised;
  for (const auto& doc : set.corpus) {
    if (doc.text.size() <= options.fragment_length) {
      // Nothing would remain; keep the document whole but never query it.
      auto it = std::find_if(set.queries.begin(), set.queries.end(),
                             [&](const LabeledQuery& q) { return q.source == doc.doc_id; });
      if (it != set.queries.end()) {
        set.warnings.push_back("document '" + doc.doc_id + "' consists only of its fragment, query dropped");
        set.queries.erase(it);
      }
      excised.push_back(doc);
      continue;
    }
    auto copy = doc;
    copy.text.erase(0, options.fragment_length);
    excised.push_back(std::move(copy));
  }
  set.corpus = std::move(excised);
  return set;
}

ExperimentSet make_experiment3(std::span<const SourceDocument> corpus, std::span<const SourceDocument> external,
                               const ExperimentOptions& options) {
  if (options.fragment_length < kBinUnitBytes) {
    throw Error(ErrorCode::kConfig, "fragment_length must be at least 1024 bytes");
  }
  if (options.fragments_per_doc < 1) throw Error(ErrorCode::kConfig, "fragments_per_doc must be positive");
  ExperimentSet set;
  set.kind = ExperimentKind::kSubjectAffinity;
  set.corpus.assign(corpus.begin(), corpus.end());
  for (const auto& ext : external) {
    for (const auto& doc : corpus) {
      if (doc.doc_id == ext.doc_id) {
        throw Error(ErrorCode::kInvalidArgument, "external document '" + ext.doc_id + "' is also in the corpus");
      }
    }
  }

  const auto wanted = static_cast<std::size_t>(options.fragments_per_doc);
  for (const auto& ext : external) {
    const auto len = ext.text.size();
    const auto count = std::min(wanted, len / options.fragment_length);
    if (count < wanted) {
      set.warnings.push_back("document '" + ext.doc_id + "' yields " + std::to_string(count) + " of " +
                             std::to_string(wanted) + " fragments");
    }
    const auto span = len - options.fragment_length;
    for (std::size_t f = 0; f < count; ++f) {
      const auto start = count == 1 ? 0 : f * span / (count - 1);
      LabeledQuery q;
      q.query_id = "e3-" + ext.doc_id + "-f" + std::to_string(f);
      q.kind = set.kind;
      q.text = ext.text.substr(start, options.fragment_length);
      q.source = ext.doc_id;
      q.source_range = {start, start + options.fragment_length};
      q.relevant_subjects.insert(ext.subjects.begin(), ext.subjects.end());
      set.queries.push_back(std::move(q));
      if (options.max_queries != 0 && set.queries.size() == options.max_queries) return set;
    }
  }
  return set;
}

std::set<std::string> relevant_documents(const LabeledQuery& query, const CorpusIndex& index) {
  if (query.kind != ExperimentKind::kSubjectAffinity) return query.relevant_doc_ids;
  std::set<std::string> out;
  for (const auto& doc : index.documents()) {
    for (const auto& s : doc.subjects) {
      if (query.relevant_subjects.count(s)) {
        out.insert(doc.doc_id);
        break;
      }
    }
  }
  return out;
}

std::vector<LabeledQuery> shuffle_relevance(std::span<const LabeledQuery> queries, const CorpusIndex& index,
                                            std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& d : index.documents()) ids.push_back(d.doc_id);
  std::mt19937_64 rng(seed);
  std::vector<LabeledQuery> out(queries.begin(), queries.end());
  for (auto& q : out) {
    const auto n = std::min(relevant_documents(q, index).size(), ids.size());
    std::shuffle(ids.begin(), ids.end(), rng);
    q.kind = ExperimentKind::kFragmentInCorpus;
    q.relevant_subjects.clear();
    q.relevant_doc_ids = std::set<std::string>(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

std::vector<double> default_alpha_grid() { return {0, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1}; }

void validate_alpha_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0 || grid.back() != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "alpha grid must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::kInvalidArgument, "alpha grid must be strictly increasing");
  }
}

Retrievals retrieve(const CorpusIndex& index, std::span<const LabeledQuery> queries,
                    std::span<const double> alpha_grid, GTable& gtable) {
  validate_alpha_grid(alpha_grid);
  Retrievals out;
  out.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  for (const auto& q : queries) {
    const auto scored = score(q.text, index);
    auto& per_alpha = out.rankings.emplace_back();
    for (const double alpha : alpha_grid) per_alpha.push_back(vote(scored, index, alpha, gtable).ranking);
    spdlog::debug("{}: scored {} samples", q.query_id, scored.samples.size());
  }
  return out;
}

double trapezoid_auc(std::vector<std::pair<double, double>> points) {
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].first - points[i - 1].first) * (points[i].second + points[i - 1].second) / 2.0;
  }
  return area;
}

RocReport roc_from_retrievals(const CorpusIndex& index, std::span<const LabeledQuery> queries,
                              const Retrievals& retrievals) {
  if (retrievals.rankings.size() != queries.size()) {
    throw Error(ErrorCode::kInvalidArgument, "retrievals do not match queries");
  }
  RocReport report;
  report.kind = queries.empty() ? ExperimentKind::kFragmentInCorpus : queries.front().kind;
  report.alpha_grid = retrievals.alpha_grid;
  const std::size_t n_docs = index.documents().size();

  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& q = queries[qi];
    const auto relevant = relevant_documents(q, index);
    const std::size_t n_irrelevant = n_docs - relevant.size();

    QueryRoc qr;
    qr.query_id = q.query_id;
    qr.source = q.source;
    std::vector<std::pair<double, double>> curve;
    for (std::size_t ai = 0; ai < retrievals.alpha_grid.size(); ++ai) {
      const auto& ranking = retrievals.rankings[qi][ai];
      RocPoint p;
      p.alpha = retrievals.alpha_grid[ai];
      for (std::size_t r = 0; r < ranking.size(); ++r) {
        if (relevant.count(ranking[r])) {
          ++p.tp;
          if (p.best_relevant_rank == 0) p.best_relevant_rank = static_cast<int>(r + 1);
        } else {
          ++p.fp;
        }
      }
      p.fn = relevant.size() - p.tp;
      p.tn = n_irrelevant - p.fp;
      if (!relevant.empty()) p.sensitivity = static_cast<double>(p.tp) / static_cast<double>(relevant.size());
      p.one_minus_specificity = n_irrelevant ? static_cast<double>(p.fp) / static_cast<double>(n_irrelevant) : 0.0;
      if (p.sensitivity) curve.emplace_back(p.one_minus_specificity, *p.sensitivity);
      qr.points.push_back(p);
    }
    if (relevant.empty()) {
      report.warnings.push_back("query '" + q.query_id + "' has no relevant documents, excluded from AUC");
    } else {
      qr.auc = trapezoid_auc(std::move(curve));
      auc_sum += *qr.auc;
      ++auc_count;
    }
    report.queries.push_back(std::move(qr));
  }
  if (auc_count) report.mean_auc = auc_sum / static_cast<double>(auc_count);
  return report;
}

RocReport roc(const CorpusIndex& index, std::span<const LabeledQuery> queries, std::span<const double> alpha_grid,
              GTable& gtable) {
  return roc_from_retrievals(index, queries, retrieve(index, queries, alpha_grid, gtable));
}

void write_roc_csv(std::ostream& out, const RocReport& report, bool header) {
  if (header) out << "experiment,query_id,alpha,tp,fp,tn,fn,sensitivity,one_minus_specificity\n";
  const int kind = static_cast<int>(report.kind);
  for (const auto& q : report.queries) {
    for (const auto& p : q.points) {
      out << kind << ',' << q.query_id << ',' << format_double(p.alpha, "%.6g") << ',' << p.tp << ',' << p.fp << ','
          << p.tn << ',' << p.fn << ',' << (p.sensitivity ? format_double(*p.sensitivity, "%.6f") : "nan") << ','
          << format_double(p.one_minus_specificity, "%.6f") << '\n';
    }
  }
}

nlohmann::json roc_summary(const RocReport& report, double reference_alpha) {
  using nlohmann::json;
  json queries = json::array();
  std::size_t first = 0, top3 = 0;
  for (const auto& q : report.queries) {
    json entry = {{"query_id", q.query_id}, {"source", q.source}};
    entry["auc"] = q.auc ? json(*q.auc) : json(nullptr);
    for (const auto& p : q.points) {
      if (p.alpha == reference_alpha) {
        entry["best_relevant_rank"] = p.best_relevant_rank;
        entry["retrieved"] = p.tp + p.fp;
        first += p.best_relevant_rank == 1;
        top3 += p.best_relevant_rank >= 1 && p.best_relevant_rank <= 3;
      }
    }
    queries.push_back(std::move(entry));
  }
  return json{{"experiment", static_cast<int>(report.kind)},
              {"alpha_grid", report.alpha_grid},
              {"reference_alpha", reference_alpha},
              {"query_count", report.queries.size()},
              {"relevant_ranked_first", first},
              {"relevant_in_top3", top3},
              {"mean_auc", report.mean_auc ? json(*report.mean_auc) : json(nullptr)},
              {"diagonal", {{"points", {{0.0, 0.0}, {1.0, 1.0}}}, {"auc", 0.5}}},
              {"queries", std::move(queries)},
              {"warnings", report.warnings}};
}

}  // namespace ncdsearch
