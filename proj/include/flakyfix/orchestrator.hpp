#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flakyfix/context.hpp"
#include "flakyfix/dcg.hpp"
#include "flakyfix/llm.hpp"
#include "flakyfix/prompts.hpp"
#include "flakyfix/reproducer.hpp"
#include "flakyfix/simplifier.hpp"

namespace flakyfix {

struct PipelineConfig {
  std::size_t m = 3;  // contexts
  std::size_t p = 2;  // thoughts per context
  std::size_t n = 3;  // fixes per thought
  std::size_t runs = 1000;
  double time_limit_s = 7200.0;
  std::size_t repair_rounds = 2;
  bool race = true;
  double run_timeout_s = 300.0;
  bool simplify = true;
  TraversalConfig traversal;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_s() = 0;
};

class SteadyClock : public Clock {
 public:
  double now_s() override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  }
};

enum class FixStatus { fixed, not_reproduced, exhausted, timed_out };
enum class ValidationVerdict { accepted, compile_failed, test_failed, timeout };

std::string_view to_string(FixStatus status);
std::string_view to_string(ValidationVerdict verdict);

struct ValidationResult {
  bool built = false;
  std::size_t repair_rounds_used = 0;
  std::size_t reruns_passed = 0;
  std::size_t reruns_total = 0;
  ValidationVerdict verdict = ValidationVerdict::compile_failed;
  std::string candidate;  // test function after repairs
  std::vector<CompileDiagnostic> diagnostics;
};

struct AttemptRecord {
  std::size_t m = 0, p = 0, n = 0;
  std::string stage;  // "thought" or "fix"
  std::string category;
  std::string result;
  std::string detail;
  std::size_t repair_rounds = 0;
  bool reverted = false;
  bool revert_verified = false;
};

struct TraceResult {
  DynamicCallGraph graph;
  AsyncInferenceReport async;
  GraphStats stats;
  std::string log_file;
  std::size_t runs_used = 0;
};

struct FixOutcome {
  TestId test;
  FixStatus status = FixStatus::exhausted;
  std::string diff;
  std::optional<Thought> thought;
  std::vector<AttemptRecord> attempts;
  std::optional<ReproductionReport> reproduction;
  std::optional<FailureRecord> failure;
  std::vector<std::string> context;  // name (file:line) of the winning context
  std::optional<GraphStats> graph;
  std::string dot;
  std::string test_file;
  bool simplified = false;
  std::vector<std::string> notes;

  std::size_t fix_attempts() const;
};

// SHA-256 over sorted relative paths and contents.
std::string tree_hash(const std::filesystem::path& root);

// Adds imports for standard packages reported as undefined. Returns true
// when the text changed.
bool add_missing_imports(std::string& file_text, const std::vector<CompileDiagnostic>& diags);

std::string replace_function(std::string_view file_text, const std::string& func,
                             std::string_view replacement);

class Pipeline {
 public:
  Pipeline(SubjectAdapter& adapter, Gateway& gateway, const FailureExtractor& extractor,
           PipelineConfig cfg, std::filesystem::path workspace, std::filesystem::path work_dir,
           Clock& clock);

  FixOutcome fix(const TestId& test);

  // The graph of one failing run of the instrumented shadow workspace.
  TraceResult trace_failure(const TestId& test, RunScope scope);

  Thought generate_thought(const std::string& evidence, const std::string& test_source,
                           const std::string& context, const std::vector<FailedThought>& history);

  ValidationResult validate(const std::filesystem::path& workspace, const TestId& test,
                            RunScope scope, const std::string& file, const std::string& original,
                            std::string candidate);

  std::optional<std::string> repair_compile(const std::string& original, const std::string& modified,
                                            const std::vector<CompileDiagnostic>& diagnostics,
                                            const std::string& func);

 private:
  void check_time() const;
  std::vector<CompileDiagnostic> compile_fixing_imports(const std::filesystem::path& workspace,
                                                        const std::string& file);

  SubjectAdapter& adapter_;
  Gateway& gateway_;
  const FailureExtractor& extractor_;
  PipelineConfig cfg_;
  std::filesystem::path workspace_;
  std::filesystem::path work_dir_;
  Clock& clock_;
  double started_ = 0.0;
  std::set<std::string> production_names_;
};

std::string render_report(const FixOutcome& outcome);
std::string render_attempts(const FixOutcome& outcome);

}  // namespace flakyfix
