#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/failure.hpp"
#include "flakyfix/llm.hpp"
#include "flakyfix/subject.hpp"

namespace flakyfix {

// Splits from the right: last segment is the case, the one before it the
// function, everything else the target. Throws MalformedTicket.
TestId parse_ticket(std::string_view raw);

struct FailurePattern {
  std::string family;
  std::regex detect;
  std::regex message;
  int message_group = 1;
  int indent_group = 0;  // 0: no continuation lines
  std::regex location;
  int file_group = 1;
  int line_group = 2;
  std::optional<std::regex> stack_start;
};

struct ExtractionContext {
  std::filesystem::path workspace;
  std::string package_dir = ".";  // workspace-relative
  std::string test_func_file;
};

class FailureExtractor {
 public:
  explicit FailureExtractor(std::vector<FailurePattern> patterns)
      : patterns_(std::move(patterns)) {}
  static FailureExtractor load(const std::filesystem::path& patterns_json);
  // The shipped pattern file, or the file named by FLAKYFIX_PATTERNS.
  static FailureExtractor shipped();

  // Regex pass, then at most one LLM call when the message or the assertion
  // location is still missing. Throws ExtractionFailed.
  FailureRecord extract(std::string_view raw_output, const ExtractionContext& ctx,
                        Gateway* fallback = nullptr) const;

  const std::vector<FailurePattern>& patterns() const { return patterns_; }

 private:
  std::vector<FailurePattern> patterns_;
};

// Maps a path printed by the toolchain onto a workspace-relative file:
// absolute, workspace-relative, package-relative, then unique basename.
std::optional<std::string> resolve_reported_path(const ExtractionContext& ctx,
                                                 const std::string& reported);

// The smallest statement covering `line` (1-based), verbatim. Throws
// NoStatementAtLine for blank and comment-only lines.
std::string read_assertion_statement(const std::filesystem::path& file, std::uint32_t line);
std::string read_assertion_statement_in(std::string_view source, std::uint32_t line);

// Workspace-relative test file declaring test.func, or empty.
std::string find_test_file(const SubjectAdapter& adapter, const std::filesystem::path& workspace,
                           const TestId& test);

struct ReproductionReport {
  TestId test;
  std::size_t attempted_runs = 0;
  std::vector<FailureRecord> failures;
  RunScope scope_used = RunScope::case_scope;
  bool reproduced = false;
  std::size_t case_failures = 0;
  std::size_t target_failures = 0;
  bool target_attempted = false;
};

std::string to_json(const ReproductionReport& report);

// Most frequent distinct (message, assertion_line); ties go to the earliest.
const FailureRecord& primary_failure(const std::vector<FailureRecord>& failures);

class Reproducer {
 public:
  Reproducer(SubjectAdapter& adapter, std::filesystem::path workspace,
             const FailureExtractor& extractor, Gateway* fallback = nullptr)
      : adapter_(adapter),
        workspace_(std::move(workspace)),
        extractor_(extractor),
        fallback_(fallback) {}

  // Case scope first, whole target only when that saw no failure. Throws
  // SelectorNotFound, and ToolchainCrashed when the workspace does not build.
  ReproductionReport reproduce(const TestId& test, const RunRequest& base);

  FailureRecord record_for(const RunOutcome& outcome, const ExtractionContext& ctx) const;

 private:
  SubjectAdapter& adapter_;
  std::filesystem::path workspace_;
  const FailureExtractor& extractor_;
  Gateway* fallback_;
};

}  // namespace flakyfix
