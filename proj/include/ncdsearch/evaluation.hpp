#pragma once

// Retrieval experiments and ROC analysis.
//
// Experiment 1: the leading fragment of a corpus document is the query; the
//               source document is the only relevant one.
// Experiment 2: as 1, but every document has its leading fragment excised
//               before indexing. Labels are unchanged.
// Experiment 3: evenly spaced fragments of out-of-corpus documents; relevant
//               documents are those sharing a subject label with the source.
//
// A document counts as retrieved at threshold alpha iff it received a vote.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncdsearch/corpus.hpp"
#include "ncdsearch/engine.hpp"
#include "ncdsearch/outliers.hpp"

namespace ncdsearch {

enum class ExperimentKind { kFragmentInCorpus = 1, kFragmentExcised = 2, kSubjectAffinity = 3 };

struct LabeledQuery {
  std::string query_id;
  ExperimentKind kind = ExperimentKind::kFragmentInCorpus;
  Bytes text;
  std::string source;  // id of the document the fragment was cut from
  ByteRange source_range;
  // Experiments 1 and 2.
  std::set<std::string> relevant_doc_ids;
  // Experiment 3.
  std::set<std::string> relevant_subjects;
};

struct ExperimentOptions {
  std::size_t fragment_length = 2048;
  std::size_t max_queries = 0;  // 0 = one query per eligible document
  std::uint64_t seed = 1;
  int fragments_per_doc = 5;    // experiment 3
};

struct ExperimentSet {
  ExperimentKind kind = ExperimentKind::kFragmentInCorpus;
  std::vector<SourceDocument> corpus;  // documents to ingest
  std::vector<LabeledQuery> queries;
  std::vector<std::string> warnings;
};

ExperimentSet make_experiment1(std::span<const SourceDocument> corpus, const ExperimentOptions& options);
ExperimentSet make_experiment2(std::span<const SourceDocument> corpus, const ExperimentOptions& options);
ExperimentSet make_experiment3(std::span<const SourceDocument> corpus, std::span<const SourceDocument> external,
                               const ExperimentOptions& options);

// Corpus documents relevant to the query, by id or by shared subject.
std::set<std::string> relevant_documents(const LabeledQuery& query, const CorpusIndex& index);

// Replaces every query's relevant set with as many documents drawn at random.
std::vector<LabeledQuery> shuffle_relevance(std::span<const LabeledQuery> queries, const CorpusIndex& index,
                                            std::uint64_t seed);

std::vector<double> default_alpha_grid();

struct RocPoint {
  double alpha = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> sensitivity;  // undefined without relevant documents
  double one_minus_specificity = 0.0;
  int best_relevant_rank = 0;  // 1-based rank of the first relevant document, 0 if none retrieved
};

struct QueryRoc {
  std::string query_id;
  std::string source;
  std::vector<RocPoint> points;  // in alpha order
  std::optional<double> auc;
};

struct RocReport {
  ExperimentKind kind = ExperimentKind::kFragmentInCorpus;
  std::vector<double> alpha_grid;
  std::vector<QueryRoc> queries;
  std::optional<double> mean_auc;
  std::vector<std::string> warnings;
};

// The ranking of every query at every alpha of the grid. Distances are
// computed once per query.
struct Retrievals {
  std::vector<double> alpha_grid;
  std::vector<std::vector<std::vector<std::string>>> rankings;  // [query][alpha] -> ranking
};

// Throws Error(kInvalidArgument) unless the grid is strictly increasing and
// contains both 0 and 1.
void validate_alpha_grid(std::span<const double> alpha_grid);

Retrievals retrieve(const CorpusIndex& index, std::span<const LabeledQuery> queries,
                    std::span<const double> alpha_grid, GTable& gtable);

RocReport roc_from_retrievals(const CorpusIndex& index, std::span<const LabeledQuery> queries,
                              const Retrievals& retrievals);

RocReport roc(const CorpusIndex& index, std::span<const LabeledQuery> queries, std::span<const double> alpha_grid,
              GTable& gtable);

// Trapezoid area under (one_minus_specificity, sensitivity) points, closed
// with the (0, 0) and (1, 1) end points and sorted by false-positive rate.
double trapezoid_auc(std::vector<std::pair<double, double>> points);

// CSV columns: experiment,query_id,alpha,tp,fp,tn,fn,sensitivity,one_minus_specificity
void write_roc_csv(std::ostream& out, const RocReport& report, bool header = true);

// Mean and per-query AUC, plus how often a relevant document ranked first and
// within the top three at reference_alpha, and the random diagonal (AUC 0.5)
// for comparison.
nlohmann::json roc_summary(const RocReport& report, double reference_alpha);

}  // namespace ncdsearch
