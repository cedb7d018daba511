#include "flakyfix/prompts.hpp"

#include <sstream>

namespace flakyfix {

namespace {

std::string fenced(const std::string& code) {
  std::string out = "```go\n" + code;
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  return out + "```\n";
}

std::string head(const std::string& source, std::size_t lines) {
  std::string out;
  std::size_t count = 0;
  for (std::size_t i = 0; i < source.size() && count < lines; ++i) {
    out.push_back(source[i]);
    if (source[i] == '\n') ++count;
  }
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  return out;
}

std::string taxonomy() {
  std::ostringstream out;
  for (const auto& info : category_taxonomy()) {
    out << "- " << info.slug << ": " << info.description << "\n";
  }
  out << "- other(<label>): none of the above; name the cause in a few words.\n";
  return out.str();
}

}  // namespace

std::string system_message() {
  return "You are an expert in fixing flaky tests. Edit the test file only; production "
         "code is off limits.";
}

std::string render_evidence(const TestId& test, const FailureRecord& failure) {
  std::ostringstream out;
  out << "Flaky test: " << test.render() << "\n";
  if (!failure.test_func_file.empty()) out << "Test file: " << failure.test_func_file << "\n";
  out << "Failure message:\n" << failure.message;
  if (failure.message.empty() || failure.message.back() != '\n') out << "\n";
  if (failure.located()) {
    out << "Assertion site: " << failure.assertion_file << ":" << failure.assertion_line << "\n";
  }
  if (!failure.assertion_stmt.empty()) {
    out << "Assertion statement:\n" << fenced(failure.assertion_stmt);
  }
  if (!failure.stack_trace.empty()) {
    out << "Stack trace:\n" << failure.stack_trace;
    if (failure.stack_trace.back() != '\n') out << "\n";
  }
  return out.str();
}

std::string render_candidate_list(const std::vector<CandidateView>& candidates,
                                  std::size_t head_lines) {
  std::ostringstream out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    out << "[" << (i + 1) << "] " << c.name << " (" << c.file << ":" << c.line << ")\n";
    out << fenced(head(c.source, head_lines));
  }
  return out.str();
}

PromptBundle select_prompt(const std::string& evidence, const CandidateView& parent,
                           const std::vector<CandidateView>& candidates, std::size_t k,
                           const std::string& guidance) {
  std::ostringstream user;
  user << evidence << "\n";
  if (!guidance.empty()) user << guidance << "\n";
  user << "The failing run called " << parent.name << " (" << parent.file << ":" << parent.line
       << "). It went on to call these functions:\n\n"
       << render_candidate_list(candidates) << "\n"
       << "Pick at most " << k
       << " of them whose code is most likely to explain the failure. Answer with their "
          "numbers only, most relevant first.\n";
  return {system_message(), user.str(), Purpose::select};
}

PromptBundle filter_prompt(const std::string& evidence,
                           const std::vector<CandidateView>& candidates, std::size_t f,
                           const std::string& guidance) {
  std::ostringstream user;
  user << evidence << "\n";
  if (!guidance.empty()) user << guidance << "\n";
  user << "These functions were executed by the failing run:\n\n"
       << render_candidate_list(candidates) << "\n"
       << "Keep at most " << f
       << " of them that someone fixing this test needs to read. Answer with their numbers "
          "only, most relevant first.\n";
  return {system_message(), user.str(), Purpose::filter};
}

std::string render_thought(const Thought& thought) {
  return "CATEGORY: " + thought.category.to_string() + "\nEXPLANATION: " + thought.explanation +
         "\nPLAN: " + thought.plan + "\n";
}

std::string render_guidance(const std::vector<FailedThought>& history) {
  if (history.empty()) return "";
  std::ostringstream out;
  out << "Earlier hypotheses that did not lead to a fix:\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << (i + 1) << ". " << history[i].thought.category.to_string() << ": "
        << history[i].thought.explanation << "\n";
  }
  return out.str();
}

PromptBundle thought_prompt(const std::string& evidence, const std::string& test_source,
                            const std::string& context,
                            const std::vector<FailedThought>& history) {
  std::ostringstream user;
  user << evidence << "\nTest function:\n" << fenced(test_source) << "\n";
  if (!context.empty()) user << "Code executed by the failing run:\n\n" << context << "\n";
  user << "Root cause categories:\n" << taxonomy() << "\n";
  if (!history.empty()) {
    user << "These earlier thoughts were tried and did not fix the test. Do not repeat them.\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
      user << "--- failed thought " << (i + 1) << " ---\n" << render_thought(history[i].thought);
      for (const auto& s : history[i].attempt_summaries) user << "  attempt: " << s << "\n";
    }
    user << "\n";
  }
  user << "State the most likely reason this test is flaky. Reply with exactly three labeled "
          "sections:\nCATEGORY: <one category from the list>\nEXPLANATION: <root cause>\n"
          "PLAN: <how to change the test>\n";
  return {system_message(), user.str(), Purpose::thought};
}

PromptBundle fix_prompt(const std::string& evidence, const std::string& test_source,
                        const std::string& context, const Thought& thought,
                        const std::vector<std::string>& earlier_attempts) {
  std::ostringstream user;
  user << evidence << "\nTest function:\n" << fenced(test_source) << "\n";
  if (!context.empty()) user << "Code executed by the failing run:\n\n" << context << "\n";
  user << "Diagnosis:\n" << render_thought(thought) << "\n";
  if (!earlier_attempts.empty()) {
    user << "Earlier attempts for this diagnosis failed:\n";
    for (const auto& s : earlier_attempts) user << "- " << s << "\n";
    user << "\n";
  }
  user << "Rewrite the test function so it passes reliably. Keep its name and signature. "
          "Reply with the complete function in a single ```go code block and nothing else in "
          "code blocks.\n";
  return {system_message(), user.str(), Purpose::fix};
}

PromptBundle repair_prompt(const std::string& original, const std::string& modified,
                           const std::vector<CompileDiagnostic>& diagnostics) {
  std::ostringstream user;
  user << "Original test function:\n" << fenced(original) << "\nModified test function:\n"
       << fenced(modified) << "\nThe modified version does not compile:\n";
  for (const auto& d : diagnostics) {
    user << d.file << ":" << d.line << ":" << d.column << ": " << d.message << "\n";
  }
  user << "\nReturn a corrected version of the modified function in a single ```go code block.\n";
  return {system_message(), user.str(), Purpose::repair};
}

PromptBundle extract_prompt(const std::string& raw_output) {
  std::string user =
      "Below is the output of a failing test run. Extract the failure as a JSON object with "
      "the keys \"message\", \"assertion_file\", \"assertion_line\" and \"stack_trace\". Use "
      "the path exactly as printed.\n\n```\n" +
      raw_output + (raw_output.empty() || raw_output.back() == '\n' ? "" : "\n") + "```\n";
  return {system_message(), user, Purpose::extract};
}

}  // namespace flakyfix
