#include "flakyfix/reproducer.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"
#include "flakyfix/prompts.hpp"

#ifndef FLAKYFIX_DATA_DIR
#define FLAKYFIX_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace flakyfix {

TestId parse_ticket(std::string_view raw) {
  std::string text(raw);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.pop_back();
  }
  const auto last = text.rfind('/');
  if (last == std::string::npos) throw MalformedTicket("ticket needs target/func/case: " + text);
  const auto second = last == 0 ? std::string::npos : text.rfind('/', last - 1);
  if (second == std::string::npos || second == 0) {
    throw MalformedTicket("ticket needs a non-empty target: " + text);
  }
  TestId id{text.substr(0, second), text.substr(second + 1, last - second - 1),
            text.substr(last + 1)};
  if (id.func.empty()) throw MalformedTicket("ticket has an empty function: " + text);
  return id;
}

// ------------------------------------------------------------- extraction

FailureExtractor FailureExtractor::load(const fs::path& patterns_json) {
  std::ifstream in(patterns_json);
  if (!in) throw ConfigError("patterns", "cannot open " + patterns_json.string());
  const json doc = json::parse(in);
  std::vector<FailurePattern> patterns;
  for (const auto& p : doc.at("patterns")) {
    FailurePattern fp;
    fp.family = p.at("family").get<std::string>();
    fp.detect = std::regex(p.at("detect").get<std::string>());
    fp.message = std::regex(p.at("message").at("regex").get<std::string>());
    fp.message_group = p.at("message").value("group", 1);
    fp.indent_group = p.at("message").value("indent", 0);
    fp.location = std::regex(p.at("location").at("regex").get<std::string>());
    fp.file_group = p.at("location").value("file", 1);
    fp.line_group = p.at("location").value("line", 2);
    if (p.contains("stack_start")) fp.stack_start = std::regex(p.at("stack_start").get<std::string>());
    patterns.push_back(std::move(fp));
  }
  return FailureExtractor(std::move(patterns));
}

FailureExtractor FailureExtractor::shipped() {
  if (const char* env = std::getenv("FLAKYFIX_PATTERNS"); env != nullptr && *env != '\0') {
    return load(env);
  }
  return load(fs::path(FLAKYFIX_DATA_DIR) / "failure_patterns.json");
}

namespace {

std::size_t indent_width(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

std::size_t count_lines(const fs::path& file) {
  std::ifstream in(file);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

// Addresses and goroutine ids change from run to run.
std::string sanitize_stack(std::string text) {
  static const std::regex offset(R"( \+0x[0-9a-f]+)");
  static const std::regex args(R"(\((0x[0-9a-f]+(, )?|\.\.\.)+\))");
  static const std::regex goroutine(R"(goroutine [0-9]+ \[)");
  text = std::regex_replace(text, offset, "");
  text = std::regex_replace(text, args, "(...)");
  text = std::regex_replace(text, goroutine, "goroutine N [");
  return text;
}

bool line_in_file(const ExtractionContext& ctx, const std::string& rel, std::uint32_t line) {
  return line >= 1 && line <= count_lines(ctx.workspace / rel);
}

void fill_statement(FailureRecord& record, const ExtractionContext& ctx) {
  try {
    record.assertion_stmt =
        read_assertion_statement(ctx.workspace / record.assertion_file, record.assertion_line);
  } catch (const Error&) {
    record.assertion_stmt.clear();
  }
}

std::optional<FailureRecord> regex_pass(const FailurePattern& p, const std::string& raw,
                                        const ExtractionContext& ctx) {
  FailureRecord record;
  record.family = p.family;
  record.test_func_file = ctx.test_func_file;

  std::smatch m;
  if (std::regex_search(raw, m, p.message)) {
    record.message = m[p.message_group].str();
    if (p.indent_group > 0) {
      const std::size_t indent = m[p.indent_group].length();
      std::size_t pos = static_cast<std::size_t>(m.position(0) + m.length(0));
      if (pos < raw.size() && raw[pos] == '\n') ++pos;
      while (pos < raw.size()) {
        const auto eol = raw.find('\n', pos);
        const std::string_view line(raw.data() + pos,
                                    (eol == std::string::npos ? raw.size() : eol) - pos);
        if (line.empty() || indent_width(line) <= indent) break;
        record.message += "\n" + std::string(line.substr(indent_width(line)));
        if (eol == std::string::npos) break;
        pos = eol + 1;
      }
    }
    while (!record.message.empty() && std::isspace(static_cast<unsigned char>(record.message.back()))) {
      record.message.pop_back();
    }
  }
  for (auto it = std::sregex_iterator(raw.begin(), raw.end(), p.location);
       it != std::sregex_iterator(); ++it) {
    const auto resolved = resolve_reported_path(ctx, (*it)[p.file_group].str());
    if (!resolved) continue;
    const auto line = static_cast<std::uint32_t>(std::stoul((*it)[p.line_group].str()));
    if (!line_in_file(ctx, *resolved, line)) continue;
    record.assertion_file = *resolved;
    record.assertion_line = line;
    break;
  }
  if (p.stack_start && std::regex_search(raw, m, *p.stack_start)) {
    std::string stack = raw.substr(static_cast<std::size_t>(m.position(0)));
    // Drop the runner's trailer.
    for (const char* trailer : {"\nFAIL\t", "\nexit status ", "\nFAIL\n"}) {
      if (auto cut = stack.find(trailer); cut != std::string::npos) stack.resize(cut + 1);
    }
    record.stack_trace = sanitize_stack(stack);
  }
  if (record.message.empty()) return std::nullopt;
  return record;
}

std::optional<FailureRecord> llm_pass(const std::string& raw, const ExtractionContext& ctx,
                                      Gateway& gateway) {
  const std::string response = gateway.complete(extract_prompt(raw));
  const auto open = response.find('{');
  const auto close = response.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
  const auto doc = json::parse(response.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  FailureRecord record;
  record.family = "llm";
  record.test_func_file = ctx.test_func_file;
  record.message = doc.value("message", "");
  record.stack_trace = doc.value("stack_trace", "");
  const auto file = resolve_reported_path(ctx, doc.value("assertion_file", ""));
  std::uint32_t line = 0;
  if (doc.contains("assertion_line")) {
    const auto& v = doc.at("assertion_line");
    if (v.is_number_unsigned() || v.is_number_integer()) line = v.get<std::uint32_t>();
    if (v.is_string()) line = static_cast<std::uint32_t>(std::strtoul(v.get<std::string>().c_str(), nullptr, 10));
  }
  if (record.message.empty() || !file || !line_in_file(ctx, *file, line)) return std::nullopt;
  record.assertion_file = *file;
  record.assertion_line = line;
  return record;
}

}  // namespace

std::optional<std::string> resolve_reported_path(const ExtractionContext& ctx,
                                                 const std::string& reported) {
  if (reported.empty()) return std::nullopt;
  std::error_code ec;
  const fs::path root = fs::weakly_canonical(ctx.workspace, ec);
  auto inside = [&](const fs::path& candidate) -> std::optional<std::string> {
    std::error_code e;
    if (!fs::is_regular_file(candidate, e)) return std::nullopt;
    const fs::path canon = fs::weakly_canonical(candidate, e);
    const auto rel = canon.lexically_relative(root);
    if (rel.empty() || rel.native().rfind("..", 0) == 0) return std::nullopt;
    return rel.generic_string();
  };
  const fs::path path(reported);
  if (path.is_absolute()) {
    if (auto r = inside(path)) return r;
    // Built elsewhere (a sandbox or CI checkout): match the longest tail of
    // the path that exists under the workspace.
    std::vector<fs::path> parts(path.begin(), path.end());
    for (std::size_t keep = parts.size() - 1; keep >= 1; --keep) {
      fs::path tail;
      for (std::size_t i = parts.size() - keep; i < parts.size(); ++i) tail /= parts[i];
      if (auto r = inside(ctx.workspace / tail)) return r;
    }
    return std::nullopt;
  }
  if (auto r = inside(ctx.workspace / path)) return r;
  if (auto r = inside(ctx.workspace / ctx.package_dir / path)) return r;
  std::optional<std::string> unique;
  for (auto it = fs::recursive_directory_iterator(ctx.workspace, ec);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && it->path().filename() == path.filename()) {
      if (unique) return std::nullopt;
      unique = inside(it->path());
    }
  }
  return unique;
}

FailureRecord FailureExtractor::extract(std::string_view raw_output, const ExtractionContext& ctx,
                                        Gateway* fallback) const {
  const std::string raw(raw_output);
  if (raw.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ExtractionFailed("empty test output");
  }
  std::optional<FailureRecord> partial;
  for (const auto& p : patterns_) {
    if (!std::regex_search(raw, p.detect)) continue;
    auto record = regex_pass(p, raw, ctx);
    if (!record) continue;
    if (record->located()) {
      fill_statement(*record, ctx);
      return *record;
    }
    if (!partial) partial = std::move(record);
  }
  if (fallback != nullptr) {
    if (auto record = llm_pass(raw, ctx, *fallback)) {
      if (record->stack_trace.empty() && partial) record->stack_trace = partial->stack_trace;
      fill_statement(*record, ctx);
      return *record;
    }
  }
  throw ExtractionFailed(partial ? "no assertion site in output: " + partial->message
                                 : "no failure pattern matched");
}

// -------------------------------------------------------- assertion statement

std::string read_assertion_statement_in(std::string_view source, std::uint32_t line) {
  static const std::set<std::string_view> statements = {
      "expression_statement", "send_statement",        "inc_statement",
      "dec_statement",        "assignment_statement",  "short_var_declaration",
      "labeled_statement",    "fallthrough_statement", "break_statement",
      "continue_statement",   "goto_statement",        "return_statement",
      "go_statement",         "defer_statement",       "if_statement",
      "for_statement",        "expression_switch_statement", "type_switch_statement",
      "select_statement",     "var_declaration",       "const_declaration"};
  std::size_t offset = 0;
  for (std::uint32_t l = 1; l < line; ++l) {
    offset = source.find('\n', offset);
    if (offset == std::string_view::npos) throw NoStatementAtLine("line past end of file");
    ++offset;
  }
  if (line == 0 || offset > source.size()) throw NoStatementAtLine("line out of range");
  const auto eol = std::min(source.find('\n', offset), source.size());
  const std::string_view text = source.substr(offset, eol - offset);
  const auto column = text.find_first_not_of(" \t\r");
  if (column == std::string_view::npos) throw NoStatementAtLine("blank line " + std::to_string(line));

  auto tree = go::SyntaxTree::parse(std::string(source));
  const TSPoint point{line - 1, static_cast<std::uint32_t>(column)};
  TSNode node = ts_node_descendant_for_point_range(tree.root(), point, point);
  if (go::is_type(node, "comment")) {
    throw NoStatementAtLine("comment at line " + std::to_string(line));
  }
  for (; !ts_node_is_null(node); node = ts_node_parent(node)) {
    if (statements.count(go::type_of(node)) > 0) return std::string(tree.text(node));
  }
  throw NoStatementAtLine("no statement at line " + std::to_string(line));
}

std::string read_assertion_statement(const fs::path& file, std::uint32_t line) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw NoStatementAtLine("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return read_assertion_statement_in(ss.str(), line);
}

std::string find_test_file(const SubjectAdapter& adapter, const fs::path& workspace,
                           const TestId& test) {
  const std::string dir = adapter.package_dir(test);
  for (const auto& rel : adapter.source_files(workspace)) {
    if (!adapter.is_test_file(rel)) continue;
    const auto parent = fs::path(rel).parent_path().generic_string();
    if ((parent.empty() ? "." : parent) != dir) continue;
    std::ifstream in(workspace / rel, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      for (const auto& fn : adapter.parse_functions(ss.str(), rel)) {
        if (fn.kind == FunctionKind::named && fn.name == test.func) return rel;
      }
    } catch (const ParseError&) {
    }
  }
  return "";
}

// ---------------------------------------------------------------- reproduce

const FailureRecord& primary_failure(const std::vector<FailureRecord>& failures) {
  if (failures.empty()) throw std::invalid_argument("primary_failure: no failures");
  std::map<std::pair<std::string, std::uint32_t>, std::size_t> counts;
  for (const auto& f : failures) ++counts[{f.message, f.assertion_line}];
  std::size_t best = 0;
  for (std::size_t i = 1; i < failures.size(); ++i) {
    if (counts[{failures[i].message, failures[i].assertion_line}] >
        counts[{failures[best].message, failures[best].assertion_line}]) {
      best = i;
    }
  }
  return failures[best];
}

FailureRecord Reproducer::record_for(const RunOutcome& outcome, const ExtractionContext& ctx) const {
  try {
    return extractor_.extract(outcome.raw_output, ctx, fallback_);
  } catch (const ExtractionFailed&) {
    FailureRecord record;
    record.family = "unparsed";
    record.test_func_file = ctx.test_func_file;
    std::istringstream in(outcome.raw_output);
    std::vector<std::string> kept;
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("=== ", 0) == 0 || line.rfind("--- ", 0) == 0 || line == "FAIL" ||
          line.rfind("exit status", 0) == 0 || line.find_first_not_of(" \t") == std::string::npos) {
        continue;
      }
      kept.push_back(line);
    }
    if (kept.size() > 20) kept.erase(kept.begin(), kept.end() - 20);
    for (const auto& k : kept) record.message += k + "\n";
    if (record.message.empty()) {
      record.message = outcome.verdict == Verdict::timeout ? "test timed out" : "test failed";
    }
    while (!record.message.empty() && record.message.back() == '\n') record.message.pop_back();
    return record;
  }
}

ReproductionReport Reproducer::reproduce(const TestId& test, const RunRequest& base) {
  ReproductionReport report;
  report.test = test;
  report.attempted_runs = base.runs;
  const ExtractionContext ctx{workspace_, adapter_.package_dir(test),
                              find_test_file(adapter_, workspace_, test)};

  auto collect = [&](RunScope scope) {
    RunRequest req = base;
    req.selector = test;
    req.scope = scope;
    std::size_t failed = 0;
    for (const auto& outcome : adapter_.run_test(workspace_, req)) {
      if (outcome.verdict == Verdict::build_error) {
        throw ToolchainCrashed("workspace does not build:\n" + outcome.raw_output);
      }
      if (outcome.verdict == Verdict::fail || outcome.verdict == Verdict::timeout) {
        report.failures.push_back(record_for(outcome, ctx));
        ++failed;
      }
    }
    return failed;
  };

  report.case_failures = collect(RunScope::case_scope);
  if (report.case_failures == 0) {
    report.target_attempted = true;
    report.target_failures = collect(RunScope::target);
    if (report.target_failures > 0) report.scope_used = RunScope::target;
  }
  report.reproduced = !report.failures.empty();
  return report;
}

std::string to_json(const ReproductionReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"family", f.family},
                        {"message", f.message},
                        {"stack_trace", f.stack_trace},
                        {"assertion_file", f.assertion_file},
                        {"assertion_line", f.assertion_line},
                        {"test_func_file", f.test_func_file},
                        {"assertion_stmt", f.assertion_stmt}});
  }
  json doc = {{"test",
               {{"target", report.test.target},
                {"func", report.test.func},
                {"case", report.test.case_name}}},
              {"attempted_runs", report.attempted_runs},
              {"reproduced", report.reproduced},
              {"scope_used", std::string(to_string(report.scope_used))},
              {"case_failures", report.case_failures},
              {"target_attempted", report.target_attempted},
              {"target_failures", report.target_failures},
              {"failures", failures}};
  return doc.dump(2) + "\n";
}

}  // namespace flakyfix
