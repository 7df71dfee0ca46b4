#pragma once

// Read-only HTTP/JSON API over a loaded corpus.
//
//   POST /query                               {text, alpha?, max_blocks?} -> query result
//   GET  /docs                                document list
//   GET  /docs/{id}                           metadata and full text
//   GET  /docs/{id}/highlights?query_id=...   spans flagged by a recent query
//   GET  /health                              version and corpus statistics
//
// Errors carry {"error": {"code", "message"}} with status 400 (malformed
// request), 404 (unknown document or query) or 409 (no corpus loaded).

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "ncdsearch/config.hpp"
#include "ncdsearch/corpus.hpp"
#include "ncdsearch/engine.hpp"
#include "ncdsearch/outliers.hpp"

namespace httplib {
class Server;
}

namespace ncdsearch {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class SearchService {
 public:
  // A null index gives a service that answers 409 to every corpus request.
  SearchService(std::shared_ptr<const CorpusIndex> index, EngineConfig config, std::shared_ptr<GTable> gtable);

  ApiResponse health() const;
  ApiResponse post_query(std::string_view body);
  ApiResponse list_documents() const;
  ApiResponse get_document(std::string_view doc_id) const;
  // Empty query_id selects the most recent query.
  ApiResponse get_highlights(std::string_view doc_id, std::string_view query_id) const;

  // Registers all routes on `server`.
  void mount(httplib::Server& server);

  static constexpr std::size_t kRememberedQueries = 64;

 private:
  struct Remembered {
    std::string query_id;
    std::map<std::string, std::vector<ByteRange>> highlights;
  };

  std::shared_ptr<const CorpusIndex> index_;
  EngineConfig config_;
  std::shared_ptr<GTable> gtable_;

  mutable std::mutex session_mutex_;
  std::deque<Remembered> recent_;
  std::uint64_t next_query_ = 1;
};

// Blocks serving on host:port until the server is stopped.
// Throws Error(kIo) if the socket cannot be bound.
void serve(SearchService& service, const std::string& host, int port);

}  // namespace ncdsearch
