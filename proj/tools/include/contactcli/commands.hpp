#pragma once

#include <string>
#include <vector>

#include "contactcli/config.hpp"

namespace contactcli {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> outputs;  // file names inside output_dir
  std::vector<std::string> caveats;
  std::string error;  // set when exit_code != 0
};

// Dispatches one command, writes its result files and a manifest.json that
// references every emitted file. Exit codes: 0 success, 2 schema violation,
// 3 resource exhaustion beyond retry caps (partial results flagged).
RunResult run(const std::string& command, const RunConfig& config);

// Re-runs the config embedded in a manifest; byte-identical numeric outputs.
RunResult run_from_manifest(const std::string& manifest_path,
                            const std::string& output_dir_override = "");

}  // namespace contactcli
