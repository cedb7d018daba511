#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/subject.hpp"

namespace flakyfix {

struct ManifestEntry {
  std::string file;
  std::uint32_t decl_line = 0;
  std::string name;
  bool skipped = false;  // empty body, nothing injected
};

struct InstrumentationManifest {
  std::vector<ManifestEntry> entries;
  std::string support_unit;  // workspace-relative
  std::string log_path;      // absolute default; FLAKYFIX_TRACE_LOG overrides at runtime
};

struct InstrumentedWorkspace {
  std::filesystem::path shadow;
  InstrumentationManifest manifest;
};

inline constexpr std::string_view kTraceLogEnv = "FLAKYFIX_TRACE_LOG";
inline constexpr std::string_view kRecorderDir = "zz_flakyfix_recorder";

// Copies `workspace` to `shadow` (replacing it) and injects an entry record
// into every function body of the files whose directory is in `scope`.
// Line numbers are preserved. Throws ParseError and InjectionConflict.
InstrumentedWorkspace instrument_workspace(const SubjectAdapter& adapter,
                                           const std::filesystem::path& workspace,
                                           const std::set<std::string>& scope,
                                           const std::filesystem::path& shadow,
                                           const std::filesystem::path& log_path);

// Every workspace-relative directory holding a source file.
std::set<std::string> all_packages(const SubjectAdapter& adapter,
                                   const std::filesystem::path& workspace);

// Instrumented text of one file, or the input unchanged when no function
// has a non-empty body.
std::string instrument_source(std::string_view text, const std::vector<SubjectFunction>& fns,
                              const std::string& module_path);

// Removes everything instrument_source injected.
std::string strip_instrumentation(std::string_view text);

// Go source of the recorder package.
std::string recorder_source(const std::filesystem::path& shadow_root,
                            const std::filesystem::path& default_log,
                            const std::vector<SubjectFunction>& functions);

std::string go_module_path(const std::filesystem::path& workspace);

// Recursive copy that skips version-control directories.
void copy_tree(const std::filesystem::path& from, const std::filesystem::path& to);

}  // namespace flakyfix
