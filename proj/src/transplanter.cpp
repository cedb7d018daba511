#include "flakyfix/transplanter.hpp"

#include <regex>
#include <set>
#include <vector>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/simplifier.hpp"

namespace flakyfix {

namespace {

std::size_t fixed_entry(const CaseTable& table, const std::string& target_case) {
  try {
    return match_case(table, target_case);
  } catch (const CaseNotFound&) {
    if (table.entries.size() == 1) return 0;  // renamed by the fix
    if (table.entries.empty()) throw CaseNotFound("the fix removed case '" + target_case + "'");
    throw MergeParseError("cannot tell which of " + std::to_string(table.entries.size()) +
                          " cases replaces '" + target_case + "'");
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    const std::size_t end = eol == std::string_view::npos ? text.size() : eol + 1;
    lines.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return lines;
}

// Net bracket depth change of one line, skipping strings, runes and line
// comments.
int bracket_delta(const std::string& line) {
  int d = 0;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote != '`') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') break;
    if (c == '"' || c == '\'' || c == '`') quote = c;
    else if (c == '(' || c == '{' || c == '[') ++d;
    else if (c == ')' || c == '}' || c == ']') --d;
  }
  return d;
}

std::set<std::string> declared_names(const std::string& code) {
  static const std::regex import_re(R"re(^\s*(?:import\s+)?(?:([A-Za-z_]\w*|\.)\s+)?"([^"]+)")re");
  static const std::regex decl_re(
      R"(^\s*(?:var\s+|const\s+)?([A-Za-z_]\w*(?:\s*,\s*[A-Za-z_]\w*)*)\s*(?::=|=|[A-Za-z_*\[]))");
  std::set<std::string> names;
  std::smatch m;
  if (std::regex_search(code, m, import_re)) {
    std::string name = m[1].matched ? m[1].str() : m[2].str();
    if (!m[1].matched) {
      if (const auto slash = name.rfind('/'); slash != std::string::npos) name = name.substr(slash + 1);
    }
    names.insert(name);
    return names;
  }
  if (std::regex_search(code, m, decl_re)) {
    static const std::regex ident(R"([A-Za-z_]\w*)");
    const std::string list = m[1].str();
    for (auto it = std::sregex_iterator(list.begin(), list.end(), ident); it != std::sregex_iterator(); ++it) {
      if (it->str() != "_") names.insert(it->str());
    }
  }
  return names;
}

}  // namespace

std::string transplant(std::string_view t_simp, std::string_view t_simp_fixed,
                       std::string_view t_orig, const std::string& target_case) {
  (void)t_simp;  // the fixed text already carries everything kept from it
  const auto orig = find_case_table(t_orig);
  if (!orig) throw TableNotFound("no case table in the original test");
  const auto fixed = find_case_table(t_simp_fixed);
  if (!fixed) throw TableNotFound("no case table in the fixed test");
  if (orig->shape != fixed->shape) throw MergeParseError("the fix changed the table shape");

  const std::size_t orig_index = match_case(*orig, target_case);
  const std::size_t fixed_index = fixed_entry(*fixed, target_case);
  const ByteSpan ospan = orig->entries[orig_index].span;
  const ByteSpan fspan = fixed->entries[fixed_index].span;

  // Step 1: the original table, with every sibling, goes back in.
  std::string merged(t_simp_fixed.substr(0, fixed->span.start));
  const std::size_t table_at = merged.size();
  merged += t_orig.substr(orig->span.start, orig->span.size());
  merged += t_simp_fixed.substr(fixed->span.end);

  // Step 2: the original target case gives way to the fixed one.
  const std::size_t case_at = table_at + (ospan.start - orig->span.start);
  merged.replace(case_at, ospan.size(), t_simp_fixed.substr(fspan.start, fspan.size()));

  auto tree = go::SyntaxTree::parse("package p\n" + merged);
  if (tree.has_error()) throw MergeParseError("merged test does not parse");
  return merged;
}

std::string restore_neutralized(std::string_view text) {
  const auto lines = split_lines(text);
  auto is_marker = [](const std::string& l) {
    return l.compare(0, kRestoreMarker.size(), kRestoreMarker) == 0;
  };
  std::string plain;
  for (const auto& l : lines) {
    if (!is_marker(l)) plain += l;
  }
  std::string out;
  for (std::size_t i = 0; i < lines.size();) {
    if (!is_marker(lines[i])) {
      out += lines[i++];
      continue;
    }
    // Adjacent marker lines may hold several declarations; a new one starts
    // wherever the brackets of the previous one are balanced.
    std::vector<std::string> decls;
    int depth = 0;
    for (; i < lines.size() && is_marker(lines[i]); ++i) {
      const std::string body = lines[i].substr(kRestoreMarker.size());
      if (depth <= 0 || decls.empty()) decls.emplace_back();
      decls.back() += body;
      depth += bracket_delta(body);
    }
    for (const auto& decl : decls) {
      const auto names = declared_names(decl);
      bool used = names.empty();
      for (const auto& n : names) {
        if (std::regex_search(plain, std::regex("\\b" + n + "\\b"))) used = true;
      }
      if (used) out += decl;
    }
  }
  return out;
}

}  // namespace flakyfix
