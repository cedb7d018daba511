#pragma once

#include <string>
#include <vector>

#include "flakyfix/failure.hpp"
#include "flakyfix/llm.hpp"
#include "flakyfix/subject.hpp"
#include "flakyfix/thought.hpp"

namespace flakyfix {

// Template revision. Bump whenever wording changes; recorded transcripts
// stop matching anyway because prompts are hashed.
inline constexpr int kPromptVersion = 1;

std::string system_message();

// Failure evidence block shared by every prompt.
std::string render_evidence(const TestId& test, const FailureRecord& failure);

struct FailedThought {
  Thought thought;
  std::vector<std::string> attempt_summaries;
};

// One entry of a numbered candidate list.
struct CandidateView {
  std::string name;
  std::string file;
  std::uint32_t line = 0;
  std::string source;
};

// Numbered list: index, name, file:line, then the first `head_lines` lines of
// the source.
std::string render_candidate_list(const std::vector<CandidateView>& candidates,
                                  std::size_t head_lines = 5);

PromptBundle select_prompt(const std::string& evidence, const CandidateView& parent,
                           const std::vector<CandidateView>& candidates, std::size_t k,
                           const std::string& guidance);
PromptBundle filter_prompt(const std::string& evidence,
                           const std::vector<CandidateView>& candidates, std::size_t f,
                           const std::string& guidance);

// Summaries of failed thoughts used to steer later context collection.
std::string render_guidance(const std::vector<FailedThought>& history);

PromptBundle thought_prompt(const std::string& evidence, const std::string& test_source,
                            const std::string& context,
                            const std::vector<FailedThought>& history);
PromptBundle fix_prompt(const std::string& evidence, const std::string& test_source,
                        const std::string& context, const Thought& thought,
                        const std::vector<std::string>& earlier_attempts);
PromptBundle repair_prompt(const std::string& original, const std::string& modified,
                           const std::vector<CompileDiagnostic>& diagnostics);
PromptBundle extract_prompt(const std::string& raw_output);

std::string render_thought(const Thought& thought);

}  // namespace flakyfix
