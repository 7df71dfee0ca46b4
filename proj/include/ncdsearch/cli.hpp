#pragma once

#include <iosfwd>

namespace ncdsearch {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `ncdsearch` tool with injectable streams, so tests can
// drive every subcommand in-process.
//
//   ncdsearch ingest <input_dir> <corpus_dir>
//   ncdsearch query  <corpus_dir> (--text T | --file F) [--alpha A] [--max-blocks N] [--format text|json]
//   ncdsearch eval   --experiment 1|2|3 --docs D [--external E] --out O [...]
//   ncdsearch serve  <corpus_dir> [--host H] [--port P]
//
// Every subcommand accepts --config FILE; flags given on the command line
// override values from the file.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncdsearch
