#pragma once

#include <string>
#include <vector>

namespace mmdec::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Parses and runs one subcommand: synth, preprocess, train, finetune,
// evaluate, ensemble, composite or report.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace mmdec::cli
