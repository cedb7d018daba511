#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/subject.hpp"

namespace flakyfix {

// Every function with a body in declaration-start order. Function literals
// are named `<enclosing>$anon<N>`, N counting the literals directly inside the
// enclosing function in lexical order; package-level literals use the package
// name as the enclosing name. Throws ParseError on syntax errors.
std::vector<SubjectFunction> parse_go_functions(std::string_view file_text,
                                                const std::string& path);

std::vector<AsyncLaunchSite> find_go_async_launches(const SubjectFunction& fn);

// Parses `file:line:col: message` diagnostics out of toolchain output. Paths
// are made relative to `workspace`; lines naming no .go file are ignored.
std::vector<CompileDiagnostic> parse_go_diagnostics(std::string_view output,
                                                    const std::filesystem::path& workspace,
                                                    std::string_view unused_pattern);

inline constexpr std::string_view kDefaultUnusedPattern =
    R"((declared and not used|declared but not used|imported and not used))";

struct GoTestStream {
  std::vector<RunOutcome> outcomes;  // completed iterations of the selected test
  bool build_failed = false;
  bool selector_seen = false;
  bool selector_running = false;  // stream ended inside an iteration
  std::string partial_output;     // output of that unfinished iteration
  std::string build_output;
};

// Splits `go test -json` output into per-iteration outcomes for one test
// name (e.g. "TestF/case_name").
GoTestStream parse_go_test_json(std::string_view output, const std::string& test_name,
                                const TestId& id);

struct GoToolchainConfig {
  std::string go = "go";
  // Whitespace-separated argv template. Placeholders: {go} {target}
  // {runcount} {raceflag} {timeout} {run}.
  std::string runner_template =
      "{go} test -json -count={runcount} {raceflag} -timeout={timeout}s -run={run} {target}";
  std::string compile_template = "{go} test -count=1 -run=^$ ./...";
  std::string race_flag = "-race";
  std::string unused_pattern = std::string(kDefaultUnusedPattern);
  std::map<std::string, std::string> env = {
      {"GOFLAGS", "-mod=mod"}, {"GOPROXY", "off"}, {"GOTOOLCHAIN", "local"}, {"GOWORK", "off"}};
};

class GoAdapter : public SubjectAdapter {
 public:
  explicit GoAdapter(GoToolchainConfig config = {});

  std::vector<SubjectFunction> parse_functions(std::string_view file_text,
                                               const std::string& path) const override;
  std::vector<AsyncLaunchSite> find_async_launches(const SubjectFunction& fn) const override;
  std::vector<CompileDiagnostic> compile(const std::filesystem::path& workspace) override;
  std::vector<RunOutcome> run_test(const std::filesystem::path& workspace,
                                   const RunRequest& request) override;
  std::vector<std::string> source_files(const std::filesystem::path& workspace) const override;
  bool is_test_file(std::string_view path) const override;
  std::string package_dir(const TestId& test) const override;

  const GoToolchainConfig& config() const { return config_; }

  // `-run` pattern selecting exactly the test case.
  static std::string case_pattern(const TestId& test);
  // Name `go test` reports for the selected case.
  static std::string reported_name(const TestId& test);

 private:
  std::vector<std::string> expand(const std::string& tmpl,
                                  const std::map<std::string, std::string>& values) const;

  GoToolchainConfig config_;
};

bool go_toolchain_available(const std::string& go = "go");

}  // namespace flakyfix
