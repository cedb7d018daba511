#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/subject.hpp"

namespace flakyfix {

enum class TableShape {
  range_literal,    // composite literal iterated by a range loop calling t.Run
  inline_subtests,  // consecutive t.Run("name", ...) statements
};

struct CaseEntry {
  std::string name;
  ByteSpan span;  // the element or statement, without separators
};

struct CaseTable {
  TableShape shape = TableShape::range_literal;
  ByteSpan span;  // literal braces, or first to last t.Run statement
  std::vector<CaseEntry> entries;
};

// Offsets are relative to `function_text`, a single function declaration.
std::optional<CaseTable> find_case_table(std::string_view function_text);

// Exact name, then the runner's spelling, then a unique substring. Throws
// CaseNotFound.
std::size_t match_case(const CaseTable& table, const std::string& case_name);

}  // namespace flakyfix
