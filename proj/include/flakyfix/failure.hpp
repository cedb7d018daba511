#pragma once

#include <cstdint>
#include <string>

namespace flakyfix {

// Evidence extracted from one failing run.
struct FailureRecord {
  std::string message;
  std::string stack_trace;
  std::string assertion_file;  // workspace-relative; empty when extraction failed
  std::uint32_t assertion_line = 0;
  std::string test_func_file;
  std::string assertion_stmt;
  std::string family;          // pattern family that matched, or "llm"

  bool located() const { return !assertion_file.empty() && assertion_line > 0; }
};

}  // namespace flakyfix
