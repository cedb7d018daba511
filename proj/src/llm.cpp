#include "flakyfix/llm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flakyfix {

std::string_view to_string(Purpose purpose) {
  switch (purpose) {
    case Purpose::select: return "select";
    case Purpose::filter: return "filter";
    case Purpose::thought: return "thought";
    case Purpose::fix: return "fix";
    case Purpose::repair: return "repair";
    case Purpose::extract: return "extract";
  }
  return "unknown";
}

Purpose parse_purpose(std::string_view text) {
  for (const Purpose p : {Purpose::select, Purpose::filter, Purpose::thought, Purpose::fix,
                          Purpose::repair, Purpose::extract}) {
    if (to_string(p) == text) return p;
  }
  throw std::invalid_argument("unknown purpose: " + std::string(text));
}

std::string canonicalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::string line;
  auto flush_line = [&] {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
      line.pop_back();
    }
    out += line;
    out.push_back('\n');
    line.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    if (c == '\n' || c == '\r') {
      flush_line();
    } else {
      line.push_back(c);
    }
  }
  flush_line();
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string PromptBundle::canonical_hash() const {
  // The separator cannot occur in canonical text boundaries ambiguously.
  return sha256_hex(canonicalize(system) + "\n\x1e\n" + canonicalize(user));
}

// ---------------------------------------------------------------- transcript

Transcript Transcript::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("transcript", "cannot open " + path.string());
  Transcript t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.contains("hash") || !doc.contains("response")) {
      throw ConfigError("transcript", path.string() + ":" + std::to_string(number) +
                                          ": malformed transcript record");
    }
    t.add({doc.at("hash").get<std::string>(), parse_purpose(doc.value("purpose", "thought")),
           doc.at("response").get<std::string>()});
  }
  return t;
}

void Transcript::add(TranscriptRecord record) {
  entries_[record.hash].push_back(std::move(record.response));
}

std::optional<std::string> Transcript::next(const std::string& hash) {
  auto it = entries_.find(hash);
  if (it == entries_.end() || it->second.empty()) return std::nullopt;
  std::string response = std::move(it->second.front());
  it->second.pop_front();
  return response;
}

std::size_t Transcript::remaining() const {
  std::size_t n = 0;
  for (const auto& [hash, responses] : entries_) n += responses.size();
  return n;
}

std::string ReplayBackend::complete(const PromptBundle& prompt) {
  const std::string hash = prompt.canonical_hash();
  if (auto response = transcript_.next(hash)) return *response;
  throw ReplayMiss("no recorded " + std::string(to_string(prompt.purpose)) +
                   " response for prompt " + hash);
}

RecordingBackend::RecordingBackend(LlmBackend& inner, fs::path transcript_path)
    : inner_(inner), path_(std::move(transcript_path)) {}

std::string RecordingBackend::complete(const PromptBundle& prompt) {
  std::string response = inner_.complete(prompt);
  json record = {{"hash", prompt.canonical_hash()},
                 {"purpose", std::string(to_string(prompt.purpose))},
                 {"response", response}};
  std::ofstream out(path_, std::ios::app);
  out << record.dump() << "\n";
  out.flush();
  if (!out) throw std::runtime_error("cannot append to transcript " + path_.string());
  return response;
}

// ---------------------------------------------------------------------- http

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("api_key", "environment variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

std::string HttpBackend::complete(const PromptBundle& prompt) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url_re)) {
    throw ConfigError("base_url", "not an http(s) URL: " + config_.base_url);
  }
  const std::string origin = m[1].str();
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  json body = {{"model", config_.model},
               {"messages",
                json::array({{{"role", "system"}, {"content", prompt.system}},
                             {{"role", "user"}, {"content", prompt.user}}})}};
  if (auto it = config_.temperature.find(prompt.purpose); it != config_.temperature.end()) {
    body["temperature"] = it->second;
  }
  const std::string payload = body.dump();

  httplib::Client client(origin);
  const auto secs = static_cast<time_t>(config_.request_timeout_s);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  client.set_connection_timeout(30, 0);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(prefix + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
      if (res->status < 500 && res->status != 429) break;
      continue;
    }
    const auto doc = json::parse(res->body, nullptr, false);
    try {
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      last_error = std::string("unexpected response shape: ") + e.what();
    }
  }
  throw HttpError(last_error);
}

// ------------------------------------------------------------------ scripted

ScriptedBackend ScriptedBackend::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("rules", "cannot open " + path.string());
  const json doc = json::parse(in);
  std::vector<ScriptRule> rules;
  for (const auto& r : doc.at("rules")) {
    ScriptRule rule;
    if (r.contains("purpose")) rule.purpose = parse_purpose(r.at("purpose").get<std::string>());
    if (r.contains("contains")) {
      if (r.at("contains").is_string()) {
        rule.contains = {r.at("contains").get<std::string>()};
      } else {
        rule.contains = r.at("contains").get<std::vector<std::string>>();
      }
    }
    if (r.contains("response")) rule.responses = {r.at("response").get<std::string>()};
    if (r.contains("responses")) rule.responses = r.at("responses").get<std::vector<std::string>>();
    if (r.contains("response_file")) {
      std::ifstream f(path.parent_path() / r.at("response_file").get<std::string>());
      std::stringstream ss;
      ss << f.rdbuf();
      rule.responses = {ss.str()};
    }
    rules.push_back(std::move(rule));
  }
  return ScriptedBackend(std::move(rules));
}

std::string ScriptedBackend::complete(const PromptBundle& prompt) {
  prompts_.push_back(prompt);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (rule.purpose && *rule.purpose != prompt.purpose) continue;
    const bool all = std::all_of(rule.contains.begin(), rule.contains.end(), [&](const auto& s) {
      return prompt.user.find(s) != std::string::npos;
    });
    if (!all || rule.responses.empty()) continue;
    const std::size_t n = served_[i]++;
    return rule.responses[std::min(n, rule.responses.size() - 1)];
  }
  throw ReplayMiss("no scripted rule for " + std::string(to_string(prompt.purpose)) + " prompt");
}

// ------------------------------------------------------------------- gateway

std::string Gateway::complete(const PromptBundle& prompt) {
  const auto started = std::chrono::steady_clock::now();
  std::string response = backend_.complete(prompt);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  calls_.push_back({prompt.canonical_hash(), prompt.purpose, ms});
  spdlog::debug("llm {} {} {:.1f}ms", to_string(prompt.purpose), calls_.back().hash.substr(0, 12),
                ms);
  return response;
}

std::size_t Gateway::call_count(Purpose purpose) const {
  return static_cast<std::size_t>(std::count_if(
      calls_.begin(), calls_.end(), [&](const CallRecord& c) { return c.purpose == purpose; }));
}

// ------------------------------------------------------------------- parsers

std::vector<std::size_t> parse_selection(std::string_view response, std::size_t n_candidates,
                                         std::size_t cap) {
  std::vector<std::size_t> out;
  std::size_t i = 0;
  while (i < response.size() && out.size() < cap) {
    if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t value = 0;
    bool overflow = false;
    while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) {
      if (value > 1'000'000) overflow = true;
      value = value * 10 + static_cast<std::size_t>(response[j] - '0');
      ++j;
    }
    if (!overflow && value >= 1 && value <= n_candidates &&
        std::find(out.begin(), out.end(), value) == out.end()) {
      out.push_back(value);
    }
    i = j;
  }
  if (out.empty()) throw EmptySelection("no candidate index in selection response");
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Thought parse_thought(std::string_view response) {
  static const std::regex label_re(R"(^[\s#*_>-]*(CATEGORY|EXPLANATION|PLAN)[*_]*\s*:[*_]*\s*(.*)$)",
                                   std::regex::icase);
  std::map<std::string, std::string> sections;
  std::string current;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, label_re)) {
      current = m[1].str();
      std::transform(current.begin(), current.end(), current.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      sections[current] = m[2].str();
      continue;
    }
    if (!current.empty()) sections[current] += "\n" + line;
  }
  for (const char* key : {"CATEGORY", "EXPLANATION", "PLAN"}) {
    if (trim(sections[key]).empty()) {
      throw ThoughtParseFailure(std::string("thought response lacks a ") + key + " section");
    }
  }
  Thought t;
  t.category = RootCauseCategory::normalize(trim(sections["CATEGORY"]));
  t.explanation = trim(sections["EXPLANATION"]);
  t.plan = trim(sections["PLAN"]);
  return t;
}

std::string parse_patch(std::string_view response, const PatchExpectations& expect) {
  struct Block {
    std::string info;
    std::string body;
  };
  std::vector<Block> blocks;
  std::optional<Block> open;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string lead = trim(line);
    if (lead.rfind("```", 0) == 0) {
      if (open) {
        blocks.push_back(std::move(*open));
        open.reset();
      } else {
        open = Block{trim(std::string_view(lead).substr(3)), ""};
      }
      continue;
    }
    if (open) open->body += line + "\n";
  }
  if (open) throw PatchParseFailure("unterminated code block");
  if (blocks.size() != 1) {
    throw PatchParseFailure("expected exactly one code block, found " +
                            std::to_string(blocks.size()));
  }
  const Block& block = blocks.front();

  // A fence tagged with a path, or a leading `// file:` comment, names the
  // file the model intends to edit.
  std::string declared;
  {
    std::istringstream info(block.info);
    std::string lang, path;
    info >> lang >> path;
    if (!path.empty()) declared = path;
    static const std::regex file_comment(R"(^\s*//\s*(?:file:\s*)?(\S+\.go)\s*$)");
    std::smatch m;
    std::istringstream body(block.body);
    std::string first;
    while (std::getline(body, first) && trim(first).empty()) {
    }
    if (declared.empty() && std::regex_match(first, m, file_comment)) declared = m[1].str();
  }
  const bool is_test_path = declared.size() >= 8 && declared.substr(declared.size() - 8) == "_test.go";
  if (!declared.empty() && !is_test_path) {
    throw NonTestEdit("response edits production file " + declared);
  }

  auto tree = go::SyntaxTree::parse("package p\n" + block.body);
  std::vector<TSNode> decls;
  for (TSNode child : go::named_children(tree.root())) {
    const auto kind = go::type_of(child);
    if (kind == "package_clause" || kind == "comment") continue;
    decls.push_back(child);
  }
  if (decls.size() == 1 && go::is_type(decls[0], "function_declaration")) {
    const std::string name(tree.text(go::field(decls[0], "name")));
    if (name != expect.function_name && expect.production_names.count(name) > 0) {
      throw NonTestEdit("response redefines production function " + name);
    }
  }
  if (tree.has_error()) throw PatchParseFailure("code block does not parse as Go");
  if (decls.size() != 1 || !go::is_type(decls[0], "function_declaration")) {
    throw PatchParseFailure("code block must hold exactly one function declaration");
  }
  const std::string name(tree.text(go::field(decls[0], "name")));
  if (name != expect.function_name) {
    throw PatchParseFailure("code block defines " + name + ", expected " + expect.function_name);
  }
  std::string text(tree.text(decls[0]));
  return text;
}

}  // namespace flakyfix
