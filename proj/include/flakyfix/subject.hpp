#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flakyfix {

// target/func/case identity of one flaky test case.
struct TestId {
  std::string target;
  std::string func;
  std::string case_name;  // empty for non-table tests

  std::string render() const;
  bool operator==(const TestId&) const = default;
};

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - start; }
  bool contains(const ByteSpan& other) const {
    return start <= other.start && other.end <= end;
  }
  bool operator==(const ByteSpan&) const = default;
};

// Graph node identity: workspace-relative file plus 1-based declaration line.
struct NodeId {
  std::string file;
  std::uint32_t line = 0;

  std::string render() const { return file + ":" + std::to_string(line); }
  auto operator<=>(const NodeId&) const = default;
};

enum class FunctionKind { named, method, anonymous };

struct SubjectFunction {
  std::string name;  // qualified: Func, Type.Method, Enclosing$anonN
  std::string file;
  std::uint32_t decl_line = 0;
  std::uint32_t end_line = 0;
  std::uint32_t body_line = 0;  // line holding the opening brace
  ByteSpan body_span;           // the braces and everything between
  std::string source;           // file bytes at body_span
  ByteSpan decl_span;           // whole declaration or literal
  std::string decl_text;        // file bytes at decl_span
  FunctionKind kind = FunctionKind::named;

  bool empty_body = false;     // no statements between the braces

  NodeId id() const { return {file, decl_line}; }
  // Last '.'-separated segment of the qualified name.
  std::string unqualified_name() const;
};

struct AsyncLaunchSite {
  NodeId enclosing;
  std::string callee_name;
  std::string file;
  std::uint32_t line = 0;
  // Set when the launched callee is a function literal; its node is then
  // known exactly and no name lookup is needed.
  std::optional<NodeId> literal;
};

enum class DiagnosticKind { unused_variable, other };

struct CompileDiagnostic {
  std::string file;  // workspace-relative when the toolchain reported a path
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::string message;
  DiagnosticKind kind = DiagnosticKind::other;
};

enum class Verdict { pass, fail, timeout, build_error };
enum class RunScope { case_scope, target };

std::string_view to_string(Verdict verdict);
std::string_view to_string(RunScope scope);
RunScope parse_scope(std::string_view text);

struct RunOutcome {
  TestId test;
  std::size_t run_index = 0;
  Verdict verdict = Verdict::pass;
  std::string raw_output;
  double duration = 0.0;
};

struct RunRequest {
  TestId selector;
  RunScope scope = RunScope::case_scope;
  std::size_t runs = 1;
  bool race = true;
  double timeout_s = 300.0;  // per run
  std::map<std::string, std::string> env;
};

// Everything the pipeline needs from the codebase under repair. Calls on the
// same workspace must not overlap.
class SubjectAdapter {
 public:
  virtual ~SubjectAdapter() = default;

  virtual std::vector<SubjectFunction> parse_functions(std::string_view file_text,
                                                       const std::string& path) const = 0;
  virtual std::vector<AsyncLaunchSite> find_async_launches(const SubjectFunction& fn) const = 0;
  virtual std::vector<CompileDiagnostic> compile(const std::filesystem::path& workspace) = 0;
  virtual std::vector<RunOutcome> run_test(const std::filesystem::path& workspace,
                                           const RunRequest& request) = 0;

  // Workspace-relative source files, sorted.
  virtual std::vector<std::string> source_files(const std::filesystem::path& workspace) const = 0;
  virtual bool is_test_file(std::string_view path) const = 0;
  // Workspace-relative directory holding the target's sources.
  virtual std::string package_dir(const TestId& test) const = 0;
};

}  // namespace flakyfix
