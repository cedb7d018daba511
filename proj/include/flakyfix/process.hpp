#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flakyfix {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
  double seconds = 0.0;
};

// Runs argv[0] (resolved through PATH) in its own process group so a timeout
// kills every descendant. Throws ToolchainMissing when the executable cannot
// be started.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          const std::map<std::string, std::string>& env = {},
                          std::optional<double> timeout_s = std::nullopt);

}  // namespace flakyfix
