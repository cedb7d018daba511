#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flakyfix/go_adapter.hpp"
#include "flakyfix/llm.hpp"
#include "flakyfix/orchestrator.hpp"

namespace flakyfix {

enum class BackendKind { replay, http, scripted };

struct Settings {
  PipelineConfig pipeline;
  BackendKind backend = BackendKind::replay;
  std::string transcript;  // replay input, record output, or scripted rules
  std::string record_to;   // when set, every exchange is appended here
  HttpBackendConfig http;
  GoToolchainConfig go;
  std::filesystem::path workspace = ".";
  std::filesystem::path out = "flakyfix-out";
  bool keep_work = false;
};

// Values in a JSON config document override the defaults. Throws ConfigError
// naming the key.
void apply_config_json(Settings& settings, const std::string& json_text);
void validate(const Settings& settings);

// Directory-safe form of a ticket.
std::string ticket_slug(const TestId& test);

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitNotReproduced = 2,
  kExitNotFixed = 3,
  kExitConfig = 4,
  kExitInstrumentation = 5,
};

int run_cli(int argc, char** argv);

}  // namespace flakyfix
