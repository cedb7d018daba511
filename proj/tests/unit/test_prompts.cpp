#include <gtest/gtest.h>

#include <cstdlib>

#include "flakyfix/prompts.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

// Set FLAKYFIX_UPDATE_GOLDEN=1 to rewrite the files after a template change.
void expect_golden(const std::string& name, const PromptBundle& prompt) {
  const auto path = golden_dir() / name;
  const std::string actual = "=== system\n" + prompt.system + "\n=== user\n" + prompt.user;
  if (std::getenv("FLAKYFIX_UPDATE_GOLDEN") != nullptr) {
    spit(path, actual);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(slurp(path), actual) << name;
}

TestId test_id() { return {"./backend", "TestAddProgram", "valid program"}; }

FailureRecord failure() {
  FailureRecord f;
  f.message = "assertExpectations: UpdateGroup was not called";
  f.assertion_file = "backend/backend_test.go";
  f.assertion_line = 52;
  f.test_func_file = "backend/backend_test.go";
  f.assertion_stmt = "db.assertExpectations(t)";
  f.family = "testify";
  return f;
}

Thought thought() {
  return {RootCauseCategory::of(RootCauseCategory::Kind::schedule_randomness),
          "AddProgram returns before the goroutine updates the group.",
          "Wait for the update before asserting."};
}

const std::string kTest = "func TestAddProgram(t *testing.T) {\n\tt.Run(\"x\", nil)\n}\n";

}  // namespace

TEST(Prompts, Evidence) {
  const auto e = render_evidence(test_id(), failure());
  EXPECT_NE(e.find("Assertion site: backend/backend_test.go:52"), std::string::npos);
  EXPECT_NE(e.find("```go\ndb.assertExpectations(t)\n```"), std::string::npos);
  FailureRecord bare;
  bare.message = "panic";
  EXPECT_EQ(render_evidence(test_id(), bare).find("Assertion site"), std::string::npos);
}

TEST(Prompts, SystemRoleKeepsTestOnlyRule) {
  EXPECT_NE(system_message().find("expert in fixing flaky tests"), std::string::npos);
  EXPECT_NE(system_message().find("test file only"), std::string::npos);
}

TEST(Prompts, CandidateListIsNumberedFromOne) {
  const auto list = render_candidate_list(
      {{"A", "a.go", 3, "func A() {\n\t1\n\t2\n\t3\n\t4\n\t5\n\t6\n}\n"}, {"B", "b.go", 9, "func B() {}"}}, 2);
  EXPECT_EQ(list,
            "[1] A (a.go:3)\n```go\nfunc A() {\n\t1\n```\n"
            "[2] B (b.go:9)\n```go\nfunc B() {}\n```\n");
}

TEST(Prompts, Golden) {
  const auto evidence = render_evidence(test_id(), failure());
  const CandidateView parent{"TestAddProgram", "backend/backend_test.go", 36, kTest};
  const std::vector<CandidateView> children = {
      {"AddProgram", "backend/backend.go", 20, "func AddProgram() {\n\tgo update()\n}\n"},
      {"newDB", "backend/db.go", 5, "func newDB() *db { return &db{} }\n"}};
  std::vector<FailedThought> history = {
      {{RootCauseCategory::other("mock setup"), "The mock is wrong.", "Rebuild the mock."},
       {"test-failed: 3/200 runs failed"}}};
  expect_golden("select.txt", select_prompt(evidence, parent, children, 3, ""));
  expect_golden("select_guided.txt",
                select_prompt(evidence, parent, children, 3, render_guidance(history)));
  expect_golden("filter.txt", filter_prompt(evidence, children, 5, ""));
  expect_golden("thought.txt", thought_prompt(evidence, kTest, "ctx\n", {}));
  expect_golden("thought_history.txt", thought_prompt(evidence, kTest, "ctx\n", history));
  expect_golden("fix.txt", fix_prompt(evidence, kTest, "ctx\n", thought(), {"compile-failed"}));
  expect_golden("repair.txt", repair_prompt(kTest, kTest + "x",
                                            {{"backend/backend_test.go", 4, 1, "syntax error",
                                              DiagnosticKind::other}}));
  expect_golden("extract.txt", extract_prompt("--- FAIL: TestAddProgram (0.00s)"));
}

TEST(Prompts, ThoughtListsEveryCategory) {
  const auto p = thought_prompt("e", kTest, "", {});
  for (const auto& info : category_taxonomy()) {
    EXPECT_NE(p.user.find(std::string(info.slug)), std::string::npos) << info.slug;
  }
}

TEST(Prompts, FailedThoughtsAppearVerbatim) {
  const Thought t = thought();
  const auto p = thought_prompt("e", kTest, "", {{t, {}}});
  EXPECT_NE(p.user.find(render_thought(t)), std::string::npos);
}
