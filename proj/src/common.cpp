#include "ncdsearch/common.hpp"

namespace ncdsearch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kCorrupt: return "corrupt";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace ncdsearch
