#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/edits.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/subject.hpp"

namespace flakyfix {

inline constexpr std::string_view kRestoreMarker = "// FLAKYGUARD-RESTORE ";

struct SimplifiedTest {
  ByteSpan function_span;  // T_orig within its file
  std::string t_orig;
  std::string t_simp;
  std::vector<Edit> tracker;  // against t_orig
  std::string target_case;
  ByteSpan table_span;        // within t_orig
  bool simplified = false;
  std::string note;           // why simplification did not happen
};

// Drops every sibling of `case_name` from the case table of `func`. A test
// without a recognised table comes back unchanged with simplified=false.
// Throws CaseNotFound.
SimplifiedTest simplify_test(std::string_view file_text, const std::string& func,
                             const std::string& case_name);

// Span of the named top-level function in `file_text`.
std::optional<SubjectFunction> find_function(std::string_view file_text, const std::string& func);

struct NeutralizeResult {
  std::string text;
  std::size_t compiles = 0;
  std::vector<std::uint32_t> commented_lines;
};

inline constexpr int kNeutralizeCap = 10;

// Comments out declarations the compiler reports unused in `file` until the
// workspace builds. Throws NeutralizationDiverged.
NeutralizeResult neutralize_unused(SubjectAdapter& adapter, const std::filesystem::path& workspace,
                                   const std::string& file);

// Lines of `text` holding the declaration diagnosed at (line, column).
std::optional<std::pair<std::uint32_t, std::uint32_t>> declaration_lines(std::string_view text,
                                                                          std::uint32_t line,
                                                                          std::uint32_t column);

std::string comment_lines(std::string_view text, std::uint32_t first, std::uint32_t last);

// Inverse of comment_lines for every marker in the text.
std::string strip_markers(std::string_view text);

}  // namespace flakyfix
