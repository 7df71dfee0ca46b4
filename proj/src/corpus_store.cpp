#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ncdsearch/corpus.hpp"

namespace ncdsearch {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "ncdsearch-corpus";

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return std::move(buf).str();
}

void write_file(const fs::path& path, ByteView bytes) {
  // Write-then-rename so a crashed persist never leaves a torn manifest.
  const auto tmp = fs::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string hex32(std::uint32_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

std::string blob_name(std::size_t doc_index) {
  std::ostringstream s;
  s << "blobs/" << std::setw(6) << std::setfill('0') << doc_index << ".txt";
  return s.str();
}

}  // namespace

std::uint32_t crc32_of(ByteView data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + done), chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void persist(const CorpusIndex& index, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "blobs", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  const auto& cfg = index.config();
  json body;
  body["config"] = {{"n_max_bins", cfg.n_max_bins},
                    {"overlap_fraction", cfg.overlap_fraction},
                    {"min_remainder_fraction", cfg.min_remainder_fraction}};
  body["next_block_id"] = index.next_block_id();

  json docs = json::array();
  const auto records = index.documents();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& d = records[i];
    const auto text = index.document_text(i);
    const auto blob = blob_name(i);
    write_file(dir / blob, text);
    docs.push_back({{"doc_id", d.doc_id},
                    {"name", d.name},
                    {"byte_length", d.byte_length},
                    {"subjects", d.subjects},
                    {"source_uri", d.source_uri},
                    {"blob", blob},
                    {"crc32", hex32(crc32_of(text))}});
  }
  body["documents"] = std::move(docs);

  json bins = json::array();
  for (int k = 1; k <= cfg.n_max_bins; ++k) {
    json rows = json::array();
    for (const auto& b : index.blocks(SizeBin{k})) {
      rows.push_back({b.block_id, records[b.doc_index].doc_id, b.ordinal, b.range.begin, b.range.end,
                      b.cached_size.bits});
    }
    bins.push_back({{"k", k}, {"nominal_bytes", SizeBin{k}.nominal_bytes()}, {"blocks", std::move(rows)}});
  }
  body["bins"] = std::move(bins);

  const auto body_text = body.dump();
  json manifest;
  manifest["format"] = kFormatTag;
  manifest["format_version"] = kCorpusFormatVersion;
  manifest["block_columns"] = {"block_id", "doc_id", "ordinal", "begin", "end", "bits"};
  manifest["checksum"] = "crc32:" + hex32(crc32_of(body_text));
  manifest["body"] = std::move(body);
  write_file(dir / kManifestFile, manifest.dump() + "\n");
}

CorpusIndex load(const fs::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::kNotFound, "no corpus manifest at " + manifest_path.string());
  }
  const auto raw = read_file(manifest_path);
  json manifest = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    throw Error(ErrorCode::kCorrupt, "manifest is not valid JSON: " + manifest_path.string());
  }
  if (manifest.value("format", "") != kFormatTag) {
    throw Error(ErrorCode::kCorrupt, "not a corpus manifest: " + manifest_path.string());
  }
  const auto version_it = manifest.find("format_version");
  if (version_it == manifest.end() || !version_it->is_number_integer() ||
      version_it->get<int>() != kCorpusFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported corpus format version " + (version_it == manifest.end() ? "<none>" : version_it->dump()) +
                    ", expected " + std::to_string(kCorpusFormatVersion));
  }
  if (!manifest.contains("body") || !manifest["checksum"].is_string()) {
    throw Error(ErrorCode::kCorrupt, "manifest lacks body or checksum");
  }
  const auto& body = manifest["body"];
  const auto expected = manifest["checksum"].get<std::string>();
  const auto actual = "crc32:" + hex32(crc32_of(body.dump()));
  if (expected != actual) {
    throw Error(ErrorCode::kCorrupt, "manifest checksum mismatch (stored " + expected + ", computed " + actual + ")");
  }

  try {
    IngestConfig cfg;
    cfg.n_max_bins = body.at("config").at("n_max_bins").get<int>();
    cfg.overlap_fraction = body.at("config").at("overlap_fraction").get<double>();
    cfg.min_remainder_fraction = body.at("config").at("min_remainder_fraction").get<double>();

    std::vector<DocumentRecord> records;
    std::vector<Bytes> texts;
    std::unordered_map<std::string, std::uint32_t> doc_index;
    for (const auto& d : body.at("documents")) {
      DocumentRecord rec{d.at("doc_id").get<std::string>(), d.at("name").get<std::string>(),
                         d.at("byte_length").get<std::uint64_t>(),
                         d.at("subjects").get<std::vector<std::string>>(),
                         d.at("source_uri").get<std::string>()};
      const auto blob_path = dir / d.at("blob").get<std::string>();
      if (!fs::exists(blob_path)) throw Error(ErrorCode::kNotFound, "missing blob " + blob_path.string());
      auto text = read_file(blob_path);
      if ("crc32:" + hex32(crc32_of(text)) != "crc32:" + d.at("crc32").get<std::string>()) {
        throw Error(ErrorCode::kCorrupt, "blob checksum mismatch for '" + rec.doc_id + "'");
      }
      doc_index.emplace(rec.doc_id, static_cast<std::uint32_t>(records.size()));
      records.push_back(std::move(rec));
      texts.push_back(std::move(text));
    }

    std::vector<std::vector<Block>> bins;
    for (const auto& bin : body.at("bins")) {
      const SizeBin k{bin.at("k").get<int>()};
      auto& rows = bins.emplace_back();
      for (const auto& row : bin.at("blocks")) {
        const auto it = doc_index.find(row.at(1).get<std::string>());
        if (it == doc_index.end()) throw Error(ErrorCode::kCorrupt, "block references unknown document");
        rows.push_back(Block{row.at(0).get<std::uint64_t>(), it->second, k, row.at(2).get<std::uint32_t>(),
                             ByteRange{row.at(3).get<std::size_t>(), row.at(4).get<std::size_t>()},
                             BitCost{row.at(5).get<std::uint64_t>()}});
      }
    }
    return CorpusIndex::restore(cfg, std::move(records), std::move(texts), std::move(bins),
                                body.at("next_block_id").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace ncdsearch
