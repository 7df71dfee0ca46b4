#include "ncdsearch/service.hpp"

#include <httplib.h>

#include <spdlog/spdlog.h>

#include "ncdsearch/report.hpp"

namespace ncdsearch {
using nlohmann::json;

namespace {

ApiResponse error(int status, std::string_view code, std::string_view message) {
  return ApiResponse{status, error_json(code, message)};
}

ApiResponse not_loaded() { return error(409, "corpus_not_loaded", "no corpus is loaded"); }

void send(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(dump_json(api.body), "application/json");
}

}  // namespace

SearchService::SearchService(std::shared_ptr<const CorpusIndex> index, EngineConfig config,
                             std::shared_ptr<GTable> gtable)
    : index_(std::move(index)), config_(config), gtable_(std::move(gtable)) {
  config_.validate();
  if (!gtable_) gtable_ = std::make_shared<GTable>(config_.gtable_replicates, config_.rng_seed);
}

ApiResponse SearchService::health() const {
  json body = {{"status", "ok"}, {"version", kVersion}, {"corpus_loaded", index_ != nullptr}};
  if (index_) {
    body["documents"] = index_->documents().size();
    body["blocks"] = index_->block_count();
    body["n_max_bins"] = index_->config().n_max_bins;
    body["overlap_fraction"] = index_->config().overlap_fraction;
  }
  body["default_alpha"] = config_.alpha;
  body["max_blocks_shown"] = config_.max_blocks_shown;
  return ApiResponse{200, std::move(body)};
}

ApiResponse SearchService::post_query(std::string_view body) {
  if (!index_) return not_loaded();
  const auto request = json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) return error(400, "bad_request", "body must be a JSON object");
  const auto text_it = request.find("text");
  if (text_it == request.end() || !text_it->is_string() || text_it->get_ref<const std::string&>().empty()) {
    return error(400, "bad_request", "'text' must be a non-empty string");
  }
  double alpha = config_.alpha;
  if (auto it = request.find("alpha"); it != request.end() && !it->is_null()) {
    if (!it->is_number()) return error(400, "bad_request", "'alpha' must be a number");
    alpha = it->get<double>();
    if (!(alpha >= 0.0 && alpha <= 1.0)) return error(400, "bad_request", "'alpha' must be in [0, 1]");
  }
  std::size_t max_blocks = static_cast<std::size_t>(config_.max_blocks_shown);
  if (auto it = request.find("max_blocks"); it != request.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      return error(400, "bad_request", "'max_blocks' must be a non-negative integer");
    }
    max_blocks = it->get<std::size_t>();
  }

  const auto result = query(text_it->get_ref<const std::string&>(), alpha, *index_, *gtable_);

  std::string query_id;
  {
    std::lock_guard lock(session_mutex_);
    query_id = "q" + std::to_string(next_query_++);
    recent_.push_back(Remembered{query_id, result.highlights});
    while (recent_.size() > kRememberedQueries) recent_.pop_front();
  }
  return ApiResponse{200, query_result_json(result, *index_, max_blocks, query_id)};
}

ApiResponse SearchService::list_documents() const {
  if (!index_) return not_loaded();
  json docs = json::array();
  for (std::size_t i = 0; i < index_->documents().size(); ++i) docs.push_back(document_json(*index_, i, false));
  return ApiResponse{200, json{{"documents", std::move(docs)}}};
}

ApiResponse SearchService::get_document(std::string_view doc_id) const {
  if (!index_) return not_loaded();
  const auto idx = index_->document_index(doc_id);
  if (!idx) return error(404, "not_found", "unknown document '" + std::string(doc_id) + "'");
  return ApiResponse{200, document_json(*index_, *idx, true)};
}

ApiResponse SearchService::get_highlights(std::string_view doc_id, std::string_view query_id) const {
  if (!index_) return not_loaded();
  if (!index_->document_index(doc_id)) {
    return error(404, "not_found", "unknown document '" + std::string(doc_id) + "'");
  }
  std::lock_guard lock(session_mutex_);
  const Remembered* match = nullptr;
  if (query_id.empty()) {
    if (!recent_.empty()) match = &recent_.back();
  } else {
    for (const auto& r : recent_) {
      if (r.query_id == query_id) match = &r;
    }
  }
  if (!match) return error(404, "not_found", "unknown or expired query '" + std::string(query_id) + "'");

  json spans = json::array();
  if (auto it = match->highlights.find(std::string(doc_id)); it != match->highlights.end()) {
    for (const auto& r : it->second) spans.push_back({r.begin, r.end});
  }
  return ApiResponse{200, json{{"doc_id", doc_id}, {"query_id", match->query_id}, {"highlights", std::move(spans)}}};
}

void SearchService::mount(httplib::Server& server) {
  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, post_query(req.body));
    } catch (const Error& e) {
      send(res, error(400, to_string(e.code()), e.what()));
    }
  });
  server.Get("/docs", [this](const httplib::Request&, httplib::Response& res) { send(res, list_documents()); });
  server.Get(R"(/docs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_document(req.matches[1].str()));
  });
  server.Get(R"(/docs/([^/]+)/highlights)", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_highlights(req.matches[1].str(), req.get_param_value("query_id")));
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send(res, error(res.status, "http_error", httplib::status_message(res.status)));
  });
}

void serve(SearchService& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  spdlog::info("listening on {}:{}", host, port);
  if (!server.listen(host, port)) throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace ncdsearch
