#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncdsearch/corpus.hpp"

namespace ncdsearch {
namespace fs = std::filesystem;

namespace {

Bytes slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace

std::vector<SourceDocument> read_document_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::kNotFound, "not a directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<SourceDocument> docs;
  for (const auto& path : files) {
    SourceDocument doc;
    doc.doc_id = path.stem().string();
    doc.name = doc.doc_id;
    doc.text = slurp(path);
    doc.source_uri = "file://" + fs::absolute(path).string();

    const auto sidecar = fs::path(path).concat(".meta.json");
    if (fs::exists(sidecar)) {
      const auto meta = nlohmann::json::parse(slurp(sidecar), nullptr, false);
      if (meta.is_discarded() || !meta.is_object()) {
        throw Error(ErrorCode::kCorrupt, "malformed metadata sidecar " + sidecar.string());
      }
      if (meta.contains("name") && meta["name"].is_string()) doc.name = meta["name"].get<std::string>();
      if (meta.contains("subjects") && meta["subjects"].is_array()) {
        for (const auto& s : meta["subjects"]) {
          if (s.is_string()) doc.subjects.push_back(s.get<std::string>());
        }
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace ncdsearch
