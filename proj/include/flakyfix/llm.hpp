#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/thought.hpp"

namespace flakyfix {

enum class Purpose { select, filter, thought, fix, repair, extract };

std::string_view to_string(Purpose purpose);
Purpose parse_purpose(std::string_view text);

// LF line endings, no trailing blanks on any line, no trailing empty lines.
std::string canonicalize(std::string_view text);
std::string sha256_hex(std::string_view data);

struct PromptBundle {
  std::string system;
  std::string user;
  Purpose purpose = Purpose::thought;

  // Digest of the canonical system and user texts. Stable across platforms.
  std::string canonical_hash() const;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const PromptBundle& prompt) = 0;
};

struct TranscriptRecord {
  std::string hash;
  Purpose purpose = Purpose::thought;
  std::string response;
};

// Line-delimited {hash, purpose, response} records. Responses recorded under
// the same hash are handed out in recording order, one per call.
class Transcript {
 public:
  static Transcript load(const std::filesystem::path& path);
  void add(TranscriptRecord record);
  std::optional<std::string> next(const std::string& hash);
  std::size_t remaining() const;

 private:
  std::map<std::string, std::deque<std::string>> entries_;
};

class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(Transcript transcript) : transcript_(std::move(transcript)) {}
  std::string complete(const PromptBundle& prompt) override;

 private:
  Transcript transcript_;
};

// Forwards to `inner` and appends every exchange to a transcript file.
class RecordingBackend : public LlmBackend {
 public:
  RecordingBackend(LlmBackend& inner, std::filesystem::path transcript_path);
  std::string complete(const PromptBundle& prompt) override;

 private:
  LlmBackend& inner_;
  std::filesystem::path path_;
};

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "FLAKYFIX_API_KEY";
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double request_timeout_s = 600.0;
  // Purposes not listed use the provider default.
  std::map<Purpose, double> temperature = {
      {Purpose::select, 0.0}, {Purpose::filter, 0.0}, {Purpose::extract, 0.0}};
};

// Chat-completion endpoint: POST {base_url}/chat/completions with a system
// and a user message; the first choice's message content is the answer.
class HttpBackend : public LlmBackend {
 public:
  // Throws ConfigError when the API key variable is unset.
  explicit HttpBackend(HttpBackendConfig config);
  std::string complete(const PromptBundle& prompt) override;

 private:
  HttpBackendConfig config_;
  std::string api_key_;
};

// Deterministic rule table: the first rule whose purpose matches and whose
// every `contains` needle occurs in the user prompt answers. A rule with
// several responses hands them out in turn and then repeats the last one.
struct ScriptRule {
  std::optional<Purpose> purpose;
  std::vector<std::string> contains;
  std::vector<std::string> responses;
};

class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}
  static ScriptedBackend from_json_file(const std::filesystem::path& path);
  std::string complete(const PromptBundle& prompt) override;
  const std::vector<PromptBundle>& prompts() const { return prompts_; }

 private:
  std::vector<ScriptRule> rules_;
  std::map<std::size_t, std::size_t> served_;
  std::vector<PromptBundle> prompts_;
};

struct CallRecord {
  std::string hash;
  Purpose purpose;
  double latency_ms;
};

// The pipeline's single entry point to a backend. Logs every call.
class Gateway {
 public:
  explicit Gateway(LlmBackend& backend) : backend_(backend) {}
  std::string complete(const PromptBundle& prompt);
  const std::vector<CallRecord>& calls() const { return calls_; }
  std::size_t call_count(Purpose purpose) const;

 private:
  LlmBackend& backend_;
  std::vector<CallRecord> calls_;
};

// Distinct 1-based indices in [1, n_candidates] in order of appearance,
// truncated to cap. Throws EmptySelection when none qualify.
std::vector<std::size_t> parse_selection(std::string_view response, std::size_t n_candidates,
                                         std::size_t cap);

// Requires CATEGORY:, EXPLANATION: and PLAN: sections in any order.
Thought parse_thought(std::string_view response);

struct PatchExpectations {
  std::string function_name;               // the test function being fixed
  std::string test_file;                   // where it lives
  std::set<std::string> production_names;  // functions the fix must not redefine
};

// Extracts the single fenced code block and checks it is exactly one
// function declaration named like the test. Throws PatchParseFailure or
// NonTestEdit.
std::string parse_patch(std::string_view response, const PatchExpectations& expect);

}  // namespace flakyfix
