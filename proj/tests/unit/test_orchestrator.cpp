#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/orchestrator.hpp"
#include "flakyfix/simplifier.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

constexpr const char* kTestFile = "backend/backend_test.go";
constexpr const char* kMarker = "_ = \"PASSMARK\"";

const char* kThoughtA =
    "CATEGORY: schedule randomness\nEXPLANATION: the update runs on a goroutine\nPLAN: wait for it\n";
const char* kThoughtB =
    "CATEGORY: state pollution\nEXPLANATION: the store is shared\nPLAN: make a fresh store\n";

std::string fenced(const std::string& code) { return "```go\n" + code + "\n```\n"; }

// The simplified test with one statement added at the top of its body.
std::string simplified_with(const std::string& line) {
  const auto s = simplify_test(slurp(fixtures() / "async_chain" / kTestFile), "TestAddProgram",
                               "valid program");
  std::string fn = s.t_simp;
  fn.insert(fn.find("{\n") + 2, "\t" + line + "\n");
  return fn;
}

struct Harness {
  explicit Harness(std::vector<ScriptRule> fix_rules) {
    copy_tree(fixtures() / "async_chain", ws.path());
    adapter.test_file = kTestFile;
    adapter.passing_marker = kMarker;
    adapter.failure_output = kAsyncChainFailure;
    adapter.trace_log = async_chain_trace();
    adapter.clock = &clock;
    std::vector<ScriptRule> rules = {{Purpose::select, {}, {"1, 2, 3"}},
                                     {Purpose::filter, {}, {"1, 2, 3, 4, 5"}},
                                     {Purpose::thought, {}, {kThoughtA, kThoughtB}}};
    for (auto& r : fix_rules) rules.push_back(std::move(r));
    backend = std::make_unique<ScriptedBackend>(std::move(rules));
    gateway = std::make_unique<Gateway>(*backend);
    cfg.runs = 5;
    cfg.race = false;
  }

  FixOutcome run() {
    Pipeline pipeline(adapter, *gateway, extractor, cfg, ws.path(), work.path(), clock);
    return pipeline.fix({"./backend", "TestAddProgram", "valid program"});
  }

  TempDir ws{"ws"};
  TempDir work{"work"};
  FakeClock clock;
  FakeGoAdapter adapter;
  FailureExtractor extractor = FailureExtractor::shipped();
  std::unique_ptr<ScriptedBackend> backend;
  std::unique_ptr<Gateway> gateway;
  PipelineConfig cfg;
};

}  // namespace

TEST(Pipeline, FirstCorrectFixWins) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with(kMarker))}}});
  const auto before = tree_hash(h.ws.path());
  const auto o = h.run();
  ASSERT_EQ(o.status, FixStatus::fixed) << render_report(o);
  EXPECT_EQ(o.fix_attempts(), 1u);
  EXPECT_TRUE(o.simplified);
  // reproduction, trace, simplified validation, pristine check
  EXPECT_EQ(h.adapter.run_batches, 4u);
  EXPECT_NE(o.diff.find("+\t_ = \"PASSMARK\""), std::string::npos) << o.diff;
  // The sibling case survives the transplant.
  EXPECT_EQ(o.diff.find("-\t\t{name: \"second owner\""), std::string::npos) << o.diff;
  EXPECT_EQ(tree_hash(h.ws.path()), before);
  ASSERT_TRUE(o.graph);
  EXPECT_EQ(o.graph->node_count, 9u);
  EXPECT_EQ(o.thought->category.kind(), RootCauseCategory::Kind::schedule_randomness);
}

TEST(Pipeline, AllBadFixesExhaustTheBudget) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with("_ = 0"))}}});
  const auto o = h.run();
  EXPECT_EQ(o.status, FixStatus::exhausted);
  EXPECT_EQ(o.fix_attempts(), 18u);
  for (const auto& a : o.attempts) {
    EXPECT_EQ(a.result, "test-failed");
    EXPECT_TRUE(a.revert_verified);
  }
  EXPECT_EQ(h.gateway->call_count(Purpose::thought), 6u);
  EXPECT_TRUE(o.diff.empty());
}

TEST(Pipeline, FailedThoughtsFeedLaterPrompts) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with("_ = 0"))}}});
  h.cfg.m = 1;
  h.run();
  std::vector<std::string> thought_prompts;
  for (const auto& p : h.backend->prompts()) {
    if (p.purpose == Purpose::thought) thought_prompts.push_back(p.user);
  }
  ASSERT_EQ(thought_prompts.size(), 2u);
  const auto first = render_thought(parse_thought(kThoughtA));
  EXPECT_EQ(thought_prompts[0].find(first), std::string::npos);
  EXPECT_NE(thought_prompts[1].find(first), std::string::npos);
  EXPECT_NE(thought_prompts[1].find("attempt: test-failed"), std::string::npos);
}

TEST(Pipeline, TimeLimitBeforeAnyModelCall) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with(kMarker))}}});
  h.cfg.time_limit_s = 2;
  h.adapter.seconds_per_batch = 4;
  const auto o = h.run();
  EXPECT_EQ(o.status, FixStatus::timed_out);
  EXPECT_TRUE(h.gateway->calls().empty());
}

TEST(Pipeline, TimeLimitStopsSecondAttempt) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with("_ = 0"))}}});
  h.cfg.time_limit_s = 10;
  h.adapter.seconds_per_batch = 4;
  const auto o = h.run();
  EXPECT_EQ(o.status, FixStatus::timed_out);
  EXPECT_LE(o.fix_attempts(), 1u);
}

TEST(Pipeline, RejectedEditsAreRecorded) {
  Harness h({{Purpose::fix, {}, {"```go\nfunc New() {}\n```", "no code at all", fenced(simplified_with(kMarker))}}});
  const auto o = h.run();
  ASSERT_EQ(o.status, FixStatus::fixed);
  ASSERT_EQ(o.attempts.size(), 3u);
  EXPECT_EQ(o.attempts[0].result, "rejected");
  EXPECT_EQ(o.attempts[1].result, "unparsable");
  EXPECT_EQ(o.attempts[2].result, "accepted");
}

TEST(Pipeline, CompileErrorsGetRepairRounds) {
  Harness h({{Purpose::fix, {}, {fenced(simplified_with("BROKEN()"))}},
             {Purpose::repair, {}, {fenced(simplified_with("BROKEN()")), fenced(simplified_with(kMarker))}}});
  const auto o = h.run();
  ASSERT_EQ(o.status, FixStatus::fixed) << render_report(o);
  EXPECT_EQ(o.attempts[0].repair_rounds, 2u);
}

TEST(Pipeline, NotReproducedStopsEarly) {
  Harness h({});
  spit(h.ws / kTestFile, slurp(h.ws / kTestFile) + "\n// " + kMarker + "\n");
  const auto o = h.run();
  EXPECT_EQ(o.status, FixStatus::not_reproduced);
  EXPECT_TRUE(h.gateway->calls().empty());
  EXPECT_NE(render_report(o).find("- Reproduced: no"), std::string::npos);
}

TEST(Pipeline, RepairNeedsDiagnostics) {
  Harness h({});
  Pipeline pipeline(h.adapter, *h.gateway, h.extractor, h.cfg, h.ws.path(), h.work.path(), h.clock);
  EXPECT_THROW(pipeline.repair_compile("a", "b", {}, "TestAddProgram"), std::logic_error);
}

TEST(Imports, AddedIntoGroupInOrder) {
  std::string text = "package p\n\nimport (\n\t\"fmt\"\n\t\"testing\"\n)\n";
  EXPECT_TRUE(add_missing_imports(text, {{"p_test.go", 9, 2, "undefined: sort", DiagnosticKind::other},
                                         {"p_test.go", 9, 2, "undefined: atomic", DiagnosticKind::other}}));
  EXPECT_EQ(text, "package p\n\nimport (\n\t\"fmt\"\n\t\"sort\"\n\t\"sync/atomic\"\n\t\"testing\"\n)\n");
  EXPECT_FALSE(add_missing_imports(text, {{"p_test.go", 9, 2, "undefined: sort", DiagnosticKind::other}}));
  EXPECT_FALSE(add_missing_imports(text, {{"p_test.go", 9, 2, "undefined: helper", DiagnosticKind::other}}));
}

TEST(Imports, AddedWithoutGroup) {
  std::string text = "package p\n\nimport \"testing\"\n\nfunc f() {}\n";
  EXPECT_TRUE(add_missing_imports(text, {{"x", 1, 1, "undefined: time", DiagnosticKind::other}}));
  EXPECT_EQ(text, "package p\n\nimport \"testing\"\nimport \"time\"\n\nfunc f() {}\n");
  std::string bare = "package p\n\nfunc f() {}\n";
  EXPECT_TRUE(add_missing_imports(bare, {{"x", 1, 1, "undefined: strings", DiagnosticKind::other}}));
  EXPECT_EQ(bare, "package p\n\nimport \"strings\"\n\nfunc f() {}\n");
}

TEST(ReplaceFunction, SwapsOnlyTheDeclaration) {
  const std::string text = "package p\n\nfunc A() {\n\t1\n}\n\nfunc B() {}\n";
  EXPECT_EQ(replace_function(text, "A", "func A() { 2 }"), "package p\n\nfunc A() { 2 }\n\nfunc B() {}\n");
}

TEST(Report, Sections) {
  FixOutcome o;
  o.test = {"./p", "TestX", "a"};
  o.status = FixStatus::fixed;
  o.diff = "--- a/x\n+++ b/x\n";
  o.thought = parse_thought(kThoughtA);
  o.graph = GraphStats{3, 2, 2};
  o.context = {"F (x.go:1)"};
  o.attempts.push_back({1, 1, 1, "fix", "schedule-randomness", "accepted", "", 0, true, true});
  o.notes = {"a note"};
  const auto r = render_report(o);
  for (const char* s : {"# Flaky test report: ./p/TestX/a", "Status: **fixed**", "## Fix",
                        "## Root cause", "- Category: schedule-randomness", "## Context",
                        "3 nodes, 2 edges, depth 2", "## Attempts", "| verified |", "## Notes"}) {
    EXPECT_NE(r.find(s), std::string::npos) << s << "\n" << r;
  }
  const auto j = render_attempts(o);
  EXPECT_NE(j.find("\"revert_verified\":true"), std::string::npos) << j;
}
