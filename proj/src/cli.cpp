#include "ncdsearch/cli.hpp"

#include <omp.h>

#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ncdsearch/config.hpp"
#include "ncdsearch/corpus.hpp"
#include "ncdsearch/engine.hpp"
#include "ncdsearch/evaluation.hpp"
#include "ncdsearch/report.hpp"
#include "ncdsearch/service.hpp"

namespace ncdsearch {
namespace fs = std::filesystem;

namespace {

constexpr const char* kGTableFile = "gtable.json";

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    default:
      return kExitData;
  }
}

// Command-line overrides for EngineConfig. Each is applied only when the flag
// was present, so a config file can supply the rest.
struct ConfigFlags {
  std::string config_file;
  int n_max_bins = 0;
  double overlap_fraction = 0.0;
  double alpha = 0.0;
  int max_blocks_shown = 0;
  int gtable_replicates = 0;
  std::uint64_t rng_seed = 0;

  CLI::Option* n_max_opt = nullptr;
  CLI::Option* overlap_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* max_blocks_opt = nullptr;
  CLI::Option* replicates_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App& app, bool ingest_options, bool query_options) {
    app.add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    if (ingest_options) {
      n_max_opt = app.add_option("--n-max-bins", n_max_bins, "number of size bins (default 32)");
      overlap_opt = app.add_option("--overlap", overlap_fraction, "block overlap fraction (default 0.10)");
    }
    if (query_options) {
      alpha_opt = app.add_option("--alpha", alpha, "outlier significance level in [0, 1] (default 0.05)");
      max_blocks_opt = app.add_option("--max-blocks", max_blocks_shown, "flagged blocks to show (default 50)");
      replicates_opt =
          app.add_option("--gtable-replicates", gtable_replicates, "Monte Carlo replicates for g (default 10000)");
      seed_opt = app.add_option("--rng-seed", rng_seed, "Monte Carlo seed");
    }
  }

  EngineConfig resolve() const {
    EngineConfig c = config_file.empty() ? EngineConfig{} : load_config(config_file);
    auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(n_max_opt)) c.n_max_bins = n_max_bins;
    if (given(overlap_opt)) c.overlap_fraction = overlap_fraction;
    if (given(alpha_opt)) c.alpha = alpha;
    if (given(max_blocks_opt)) c.max_blocks_shown = max_blocks_shown;
    if (given(replicates_opt)) c.gtable_replicates = gtable_replicates;
    if (given(seed_opt)) c.rng_seed = rng_seed;
    c.validate();
    return c;
  }
};

std::shared_ptr<GTable> open_gtable(const fs::path& corpus_dir, const EngineConfig& config) {
  const auto path = corpus_dir / kGTableFile;
  if (fs::exists(path)) {
    try {
      auto cached = GTable::load(path);
      if (cached.replicates() == config.gtable_replicates && cached.seed() == config.rng_seed) {
        return std::make_shared<GTable>(cached);
      }
      spdlog::debug("ignoring {}: built with different replicates or seed", path.string());
    } catch (const Error& e) {
      spdlog::warn("ignoring unreadable {}: {}", path.string(), e.what());
    }
  }
  return std::make_shared<GTable>(config.gtable_replicates, config.rng_seed);
}

void save_gtable(const GTable& table, const fs::path& corpus_dir) {
  try {
    table.save(corpus_dir / kGTableFile);
  } catch (const Error& e) {
    spdlog::warn("could not cache g table: {}", e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kConfig, "invalid alpha '" + item + "'");
    }
  }
  validate_alpha_grid(grid);
  return grid;
}

int cmd_ingest(const fs::path& input_dir, const fs::path& corpus_dir, const EngineConfig& config,
               std::ostream& out) {
  if (!fs::is_directory(input_dir)) throw Error(ErrorCode::kNotFound, "input directory not found: " + input_dir.string());
  auto docs = read_document_directory(input_dir);
  std::erase_if(docs, [](const SourceDocument& d) {
    if (!d.text.empty()) return false;
    spdlog::warn("skipping empty document '{}'", d.doc_id);
    return true;
  });

  std::optional<CorpusIndex> index;
  if (fs::exists(corpus_dir / kManifestFile)) {
    index.emplace(load(corpus_dir));
    const auto& existing = index->config();
    if (existing.n_max_bins != config.n_max_bins || existing.overlap_fraction != config.overlap_fraction) {
      spdlog::warn("existing corpus keeps its own configuration (n_max_bins={}, overlap={})", existing.n_max_bins,
                   existing.overlap_fraction);
    }
  } else {
    index.emplace(config.ingest_config());
  }
  const auto added = index->ingest(docs);
  persist(*index, corpus_dir);

  out << added << " documents ingested";
  if (added != docs.size()) out << " (" << docs.size() - added << " unchanged)";
  out << "\ncorpus: " << index->documents().size() << " documents, " << index->block_count() << " blocks\n";
  for (int k = 1; k <= index->config().n_max_bins; ++k) {
    const auto n = index->blocks(SizeBin{k}).size();
    if (n > 0) out << "  bin " << k << "KB: " << n << " blocks\n";
  }
  return kExitOk;
}

int cmd_query(const fs::path& corpus_dir, const std::string& text, const std::string& file, const std::string& format,
              const EngineConfig& config, std::ostream& out) {
  const std::string query_text = file.empty() ? text : read_file(file);
  if (query_text.empty()) throw Error(ErrorCode::kInvalidArgument, "query is empty");
  const auto index = load(corpus_dir);
  auto gtable = open_gtable(corpus_dir, config);
  const auto result = query(query_text, config.alpha, index, *gtable);
  save_gtable(*gtable, corpus_dir);

  const auto max_blocks = static_cast<std::size_t>(config.max_blocks_shown);
  if (format == "json") {
    out << dump_json(query_result_json(result, index, max_blocks, "cli"), 2) << "\n";
  } else {
    out << query_result_text(result, index, max_blocks);
  }
  return kExitOk;
}

struct EvalArgs {
  int experiment = 1;
  std::string docs;
  std::string external;
  std::string out_dir;
  std::size_t fragment_length = 2048;
  std::size_t queries = 20;
  std::uint64_t seed = 1;
  std::string alphas;
  std::optional<double> reference_alpha;
  int null_trials = 0;
};

int cmd_eval(const EvalArgs& args, const EngineConfig& config, std::ostream& out) {
  ExperimentOptions options;
  options.fragment_length = args.fragment_length;
  options.max_queries = args.queries;
  options.seed = args.seed;
  const auto grid = args.alphas.empty() ? default_alpha_grid() : parse_alpha_list(args.alphas);

  const auto corpus = read_document_directory(args.docs);
  ExperimentSet set;
  if (args.experiment == 1) {
    set = make_experiment1(corpus, options);
  } else if (args.experiment == 2) {
    set = make_experiment2(corpus, options);
  } else {
    if (args.external.empty()) throw Error(ErrorCode::kConfig, "experiment 3 needs --external");
    const auto external = read_document_directory(args.external);
    set = make_experiment3(corpus, external, options);
  }
  for (const auto& w : set.warnings) spdlog::warn("{}", w);

  CorpusIndex index(config.ingest_config());
  index.ingest(set.corpus);
  GTable gtable(config.gtable_replicates, config.rng_seed);
  const auto retrievals = retrieve(index, set.queries, grid, gtable);
  const auto report = roc_from_retrievals(index, set.queries, retrievals);

  auto summary = roc_summary(report, args.reference_alpha.value_or(config.alpha));
  summary["seed"] = args.seed;
  summary["fragment_length"] = args.fragment_length;
  if (args.null_trials > 0) {
    nlohmann::json null_aucs = nlohmann::json::array();
    double sum = 0.0;
    int counted = 0;
    for (int t = 0; t < args.null_trials; ++t) {
      const auto shuffled = shuffle_relevance(set.queries, index, args.seed + 1000 + static_cast<std::uint64_t>(t));
      const auto null_report = roc_from_retrievals(index, shuffled, retrievals);
      if (null_report.mean_auc) {
        null_aucs.push_back(*null_report.mean_auc);
        sum += *null_report.mean_auc;
        ++counted;
      }
    }
    summary["null_trials"] = null_aucs;
    if (counted > 0) summary["null_mean_auc"] = sum / counted;
  }

  const fs::path out_dir = args.out_dir;
  fs::create_directories(out_dir);
  const auto csv_path = out_dir / ("roc_exp" + std::to_string(args.experiment) + ".csv");
  const auto json_path = out_dir / ("summary_exp" + std::to_string(args.experiment) + ".json");
  std::ostringstream csv;
  write_roc_csv(csv, report);
  write_file(csv_path, csv.str());
  write_file(json_path, dump_json(summary, 2) + "\n");

  out << "experiment " << args.experiment << ": " << report.queries.size() << " queries, "
      << index.documents().size() << " corpus documents\n";
  out << "mean AUC: ";
  if (report.mean_auc) {
    out << *report.mean_auc << "\n";
  } else {
    out << "undefined\n";
  }
  out << "wrote " << csv_path.string() << "\nwrote " << json_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Keyword-free document search by normalized compression distance", "ncdsearch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  int threads = 0;
  bool verbose = false;
  app.add_option("--threads", threads, "OpenMP threads (default: runtime choice)")->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", verbose, "debug logging");

  auto* ingest = app.add_subcommand("ingest", "index a directory of .txt documents");
  std::string input_dir, corpus_dir;
  ConfigFlags ingest_flags;
  ingest->add_option("input_dir", input_dir, "directory of .txt files with optional .meta.json sidecars")->required();
  ingest->add_option("corpus_dir", corpus_dir, "corpus directory to create or update")->required();
  ingest_flags.add_to(*ingest, true, false);

  auto* query_cmd = app.add_subcommand("query", "search a corpus");
  std::string query_text, query_file, format = "text";
  ConfigFlags query_flags;
  query_cmd->add_option("corpus_dir", corpus_dir, "corpus directory")->required();
  auto* text_opt = query_cmd->add_option("--text", query_text, "query text");
  auto* file_opt = query_cmd->add_option("--file", query_file, "file whose contents are the query");
  text_opt->excludes(file_opt);
  query_cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
  query_flags.add_to(*query_cmd, false, true);

  auto* eval = app.add_subcommand("eval", "run a retrieval experiment and write ROC artifacts");
  EvalArgs eval_args;
  ConfigFlags eval_flags;
  eval->add_option("--experiment", eval_args.experiment, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  eval->add_option("--docs", eval_args.docs, "corpus document directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--external", eval_args.external, "out-of-corpus documents (experiment 3)")
      ->check(CLI::ExistingDirectory);
  eval->add_option("--out", eval_args.out_dir, "output directory")->required();
  eval->add_option("--fragment-length", eval_args.fragment_length, "query fragment bytes (default 2048)");
  eval->add_option("--queries", eval_args.queries, "number of queries, 0 for all (default 20)");
  eval->add_option("--seed", eval_args.seed, "experiment seed (default 1)");
  eval->add_option("--alphas", eval_args.alphas, "comma-separated alpha grid from 0 to 1");
  eval->add_option("--reference-alpha", eval_args.reference_alpha, "alpha reported in the summary");
  eval->add_option("--null-trials", eval_args.null_trials, "shuffled-label null trials to add to the summary")
      ->check(CLI::NonNegativeNumber);
  eval_flags.add_to(*eval, true, true);

  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP/JSON API");
  std::string host = "127.0.0.1";
  int port = 8080;
  ConfigFlags serve_flags;
  serve_cmd->add_option("corpus_dir", corpus_dir, "corpus directory")->required();
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port")->check(CLI::Range(1, 65535));
  serve_flags.add_to(*serve_cmd, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (ingest->parsed()) return cmd_ingest(input_dir, corpus_dir, ingest_flags.resolve(), out);
    if (query_cmd->parsed()) {
      if (!text_opt->count() && !file_opt->count()) {
        err << "error: query needs --text or --file\n";
        return kExitUsage;
      }
      return cmd_query(corpus_dir, query_text, query_file, format, query_flags.resolve(), out);
    }
    if (eval->parsed()) return cmd_eval(eval_args, eval_flags.resolve(), out);
    if (serve_cmd->parsed()) {
      const auto config = serve_flags.resolve();
      auto index = std::make_shared<const CorpusIndex>(load(corpus_dir));
      SearchService service(index, config, open_gtable(corpus_dir, config));
      out << "serving " << index->documents().size() << " documents on http://" << host << ":" << port << "\n"
          << std::flush;
      serve(service, host, port);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ncdsearch
