#include "flakyfix/simplifier.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_adapter.hpp"
#include "flakyfix/go_syntax.hpp"

namespace fs = std::filesystem;

namespace flakyfix {

namespace {

std::size_t line_start(std::string_view t, std::size_t pos) {
  while (pos > 0 && t[pos - 1] != '\n') --pos;
  return pos;
}

bool blank(std::string_view t, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (t[i] != ' ' && t[i] != '\t') return false;
  }
  return true;
}

// End of the line if only blanks or a line comment follow `pos`.
std::optional<std::size_t> rest_of_line_empty(std::string_view t, std::size_t pos) {
  while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t')) ++pos;
  if (pos + 1 < t.size() && t[pos] == '/' && t[pos + 1] == '/') {
    while (pos < t.size() && t[pos] != '\n') ++pos;
  }
  if (pos == t.size()) return pos;
  if (t[pos] == '\n') return pos + 1;
  return std::nullopt;
}

std::vector<ByteSpan> removal_spans(std::string_view t, const CaseTable& table, std::size_t keep) {
  std::vector<ByteSpan> spans;
  const auto& entries = table.entries;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == keep) continue;
    const ByteSpan e = entries[i].span;
    std::size_t end = e.end;
    std::size_t p = end;
    while (p < t.size() && (t[p] == ' ' || t[p] == '\t')) ++p;
    const char sep = table.shape == TableShape::range_literal ? ',' : ';';
    const bool separated = p < t.size() && t[p] == sep;
    if (separated) end = p + 1;
    const std::size_t ls = line_start(t, e.start);
    if (blank(t, ls, e.start)) {
      if (auto eol = rest_of_line_empty(t, end)) {
        spans.push_back({ls, *eol});
        continue;
      }
    }
    if (separated) {
      while (end < t.size() && (t[end] == ' ' || t[end] == '\t')) ++end;
      spans.push_back({e.start, end});
    } else if (i > 0) {
      spans.push_back({entries[i - 1].span.end, e.end});
    } else {
      spans.push_back({e.start, e.end});
    }
  }
  std::sort(spans.begin(), spans.end(), [](auto a, auto b) { return a.start < b.start; });
  std::vector<ByteSpan> merged;
  for (const auto& s : spans) {
    if (!merged.empty() && s.start < merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::optional<SubjectFunction> find_function(std::string_view file_text, const std::string& func) {
  for (auto& fn : parse_go_functions(file_text, "")) {
    if (fn.kind == FunctionKind::named && fn.name == func) return fn;
  }
  return std::nullopt;
}

SimplifiedTest simplify_test(std::string_view file_text, const std::string& func,
                             const std::string& case_name) {
  const auto fn = find_function(file_text, func);
  if (!fn) throw CaseNotFound("no function " + func);
  SimplifiedTest out;
  out.function_span = fn->decl_span;
  out.t_orig = fn->decl_text;
  out.t_simp = fn->decl_text;
  out.target_case = case_name;

  const auto table = find_case_table(out.t_orig);
  if (!table) {
    out.note = "no recognised case table in " + func;
    return out;
  }
  const std::size_t keep = match_case(*table, case_name);
  out.table_span = table->span;
  out.target_case = table->entries[keep].name;
  for (const auto& s : removal_spans(out.t_orig, *table, keep)) {
    out.tracker.push_back({s, "", EditTag::removal});
  }
  out.t_simp = apply_edits(out.t_orig, out.tracker);
  out.simplified = true;
  return out;
}

// ------------------------------------------------------------ neutralize

std::optional<std::pair<std::uint32_t, std::uint32_t>> declaration_lines(std::string_view text,
                                                                          std::uint32_t line,
                                                                          std::uint32_t column) {
  auto tree = go::SyntaxTree::parse(std::string(text));
  const TSPoint point{line - 1, column > 0 ? column - 1 : 0};
  TSNode node = ts_node_descendant_for_point_range(tree.root(), point, point);
  for (; !ts_node_is_null(node); node = ts_node_parent(node)) {
    const auto kind = go::type_of(node);
    if (kind == "short_var_declaration" || kind == "var_declaration" ||
        kind == "import_declaration" || kind == "const_declaration") {
      return std::make_pair(go::start_line(node), go::end_line(node));
    }
    if (kind == "var_spec" || kind == "import_spec" || kind == "const_spec") {
      TSNode parent = ts_node_parent(node);
      // A spec inside ( ... ) owns its lines; a lone spec shares them with the keyword.
      if (go::is_type(parent, "var_spec_list") || go::is_type(parent, "import_spec_list") ||
          go::start_line(parent) != go::start_line(node)) {
        return std::make_pair(go::start_line(node), go::end_line(node));
      }
    }
    if (kind == "func_literal" || kind == "function_declaration" || kind == "block") break;
  }
  return std::nullopt;
}

std::string comment_lines(std::string_view text, std::uint32_t first, std::uint32_t last) {
  std::string out;
  std::uint32_t line = 1;
  bool at_start = true;
  for (const char c : text) {
    if (at_start && line >= first && line <= last) out += kRestoreMarker;
    out.push_back(c);
    at_start = c == '\n';
    if (at_start) ++line;
  }
  return out;
}

std::string strip_markers(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    const std::size_t end = eol == std::string_view::npos ? text.size() : eol + 1;
    std::string_view line = text.substr(pos, end - pos);
    if (line.substr(0, kRestoreMarker.size()) == kRestoreMarker) line.remove_prefix(kRestoreMarker.size());
    out += line;
    pos = end;
  }
  return out;
}

NeutralizeResult neutralize_unused(SubjectAdapter& adapter, const fs::path& workspace,
                                   const std::string& file) {
  NeutralizeResult result;
  result.text = read_file(workspace / file);
  for (int iteration = 0; iteration < kNeutralizeCap; ++iteration) {
    const auto diags = adapter.compile(workspace);
    ++result.compiles;
    if (diags.empty()) return result;
    std::set<std::pair<std::uint32_t, std::uint32_t>> ranges;
    for (const auto& d : diags) {
      if (d.kind != DiagnosticKind::unused_variable || d.file != file) {
        throw NeutralizationDiverged("cannot neutralize " + d.file + ":" + std::to_string(d.line) +
                                     ": " + d.message);
      }
      const auto lines = declaration_lines(result.text, d.line, d.column);
      if (!lines) {
        throw NeutralizationDiverged("no declaration at " + d.file + ":" + std::to_string(d.line));
      }
      ranges.insert(*lines);
    }
    for (auto it = ranges.rbegin(); it != ranges.rend(); ++it) {
      result.text = comment_lines(result.text, it->first, it->second);
      for (auto l = it->first; l <= it->second; ++l) result.commented_lines.push_back(l);
    }
    std::ofstream out(workspace / file, std::ios::binary | std::ios::trunc);
    out << result.text;
    spdlog::debug("neutralized {} declaration(s) in {}", ranges.size(), file);
  }
  throw NeutralizationDiverged("still failing after " + std::to_string(kNeutralizeCap) +
                               " rounds");
}

}  // namespace flakyfix
