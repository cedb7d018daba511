#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/reproducer.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

TEST(Ticket, SplitsFromTheRight) {
  const auto t = parse_ticket("//svc/payments:go_default_test/TestCharge/retry");
  EXPECT_EQ(t.target, "//svc/payments:go_default_test");
  EXPECT_EQ(t.func, "TestCharge");
  EXPECT_EQ(t.case_name, "retry");
  EXPECT_EQ(t.render(), "//svc/payments:go_default_test/TestCharge/retry");
}

TEST(Ticket, Malformed) {
  EXPECT_THROW(parse_ticket("TestCharge"), MalformedTicket);
  EXPECT_THROW(parse_ticket("TestCharge/case"), MalformedTicket);
  EXPECT_THROW(parse_ticket("./pkg//case"), MalformedTicket);
  EXPECT_THROW(parse_ticket("/TestF/case"), MalformedTicket);
}

class Extraction : public ::testing::Test {
 protected:
  ExtractionContext ctx() const {
    return {fixtures() / "async_chain", "backend", "backend/backend_test.go"};
  }
  FailureExtractor ex = FailureExtractor::shipped();
};

TEST_F(Extraction, MockVerification) {
  const auto r = ex.extract(kAsyncChainFailure, ctx());
  EXPECT_EQ(r.family, "mock-verification");
  EXPECT_EQ(r.message, "Not all calls expected by the mock for UpdateInfo were made");
  EXPECT_EQ(r.assertion_file, "backend/backend_test.go");
  EXPECT_EQ(r.assertion_line, 52u);
  EXPECT_EQ(r.assertion_stmt, "db.assertExpectations(t)");
}

TEST_F(Extraction, TestifyStyleWithContinuation) {
  const std::string out =
      "    backend_test.go:48: \n"
      "        \tError Trace:\tbackend_test.go:48\n"
      "        \tError:      \tNot equal: \n"
      "        \t            \texpected: 1\n"
      "        \t            \tactual  : 2\n"
      "        \tTest:       \tTestAddProgram/valid_program\n";
  const auto r = ex.extract(out, ctx());
  EXPECT_EQ(r.family, "assertion");
  EXPECT_EQ(r.assertion_line, 48u);
  EXPECT_NE(r.message.find("Not equal"), std::string::npos);
  EXPECT_NE(r.message.find("actual  : 2"), std::string::npos);
  EXPECT_EQ(r.message.find("Test:"), std::string::npos);
}

TEST_F(Extraction, PanicKeepsSanitizedStack) {
  const std::string out =
      "panic: runtime error: index out of range [3] with length 2 [recovered]\n"
      "\n"
      "goroutine 7 [running]:\n"
      "testing.tRunner.func1.2({0x5d8e40, 0xc000018138})\n"
      "\t/usr/lib/go/src/testing/testing.go:1632 +0x1a5\n"
      "example.com/programs/backend.TestAddProgram.func1(0xc0000a2680)\n"
      "\t/ws/backend/backend_test.go:47 +0x2c\n";
  const auto r = ex.extract(out, ctx());
  EXPECT_EQ(r.family, "panic");
  EXPECT_EQ(r.message, "panic: runtime error: index out of range [3] with length 2 [recovered]");
  EXPECT_EQ(r.assertion_file, "backend/backend_test.go");
  EXPECT_EQ(r.assertion_line, 47u);
  EXPECT_NE(r.stack_trace.find("goroutine N ["), std::string::npos);
  EXPECT_EQ(r.stack_trace.find("+0x"), std::string::npos);
}

TEST_F(Extraction, ModelFallbackIsValidated) {
  ScriptedBackend backend({{Purpose::extract, {}, {R"({"message": "boom", "assertion_file": "backend_test.go", "assertion_line": 52})"}}});
  Gateway gw(backend);
  const auto r = ex.extract("something odd happened\n", ctx(), &gw);
  EXPECT_EQ(r.family, "llm");
  EXPECT_EQ(r.message, "boom");
  EXPECT_EQ(r.assertion_file, "backend/backend_test.go");
  EXPECT_EQ(gw.call_count(Purpose::extract), 1u);
}

TEST_F(Extraction, NothingFound) {
  EXPECT_THROW(ex.extract("something odd happened\n", ctx()), ExtractionFailed);
  ScriptedBackend backend({{Purpose::extract, {}, {"I cannot tell."}}});
  Gateway gw(backend);
  EXPECT_THROW(ex.extract("something odd happened\n", ctx(), &gw), ExtractionFailed);
}

TEST(ReportedPath, ResolutionOrder) {
  const ExtractionContext ctx{fixtures() / "async_chain", "backend", ""};
  EXPECT_EQ(resolve_reported_path(ctx, "backend/backend.go"), "backend/backend.go");
  EXPECT_EQ(resolve_reported_path(ctx, "backend_test.go"), "backend/backend_test.go");
  EXPECT_EQ(resolve_reported_path(ctx, (fixtures() / "async_chain/controller/validator.go").string()),
            "controller/validator.go");
  EXPECT_EQ(resolve_reported_path(ctx, "validator.go"), "controller/validator.go");
  EXPECT_FALSE(resolve_reported_path(ctx, "missing.go").has_value());
}

TEST(AssertionStatement, SmallestStatement) {
  const char* src =
      "package p\n"
      "\n"
      "func TestX(t *testing.T) {\n"
      "\t// a comment\n"
      "\tif got := f(); got != 1 {\n"
      "\t\tt.Errorf(\"got %d\",\n"
      "\t\t\tgot)\n"
      "\t}\n"
      "}\n";
  EXPECT_EQ(read_assertion_statement_in(src, 6), "t.Errorf(\"got %d\",\n\t\t\tgot)");
  EXPECT_THROW(read_assertion_statement_in(src, 4), NoStatementAtLine);
  EXPECT_THROW(read_assertion_statement_in(src, 2), NoStatementAtLine);
}

TEST(PrimaryFailure, MostFrequentThenEarliest) {
  std::vector<FailureRecord> f(5);
  f[0].message = "a"; f[0].assertion_line = 1;
  f[1].message = "b"; f[1].assertion_line = 2;
  f[2].message = "b"; f[2].assertion_line = 2;
  f[3].message = "a"; f[3].assertion_line = 1;
  f[4].message = "c"; f[4].assertion_line = 3;
  EXPECT_EQ(&primary_failure(f), &f[0]);
  f[3].message = "b"; f[3].assertion_line = 2;
  EXPECT_EQ(&primary_failure(f), &f[1]);
}

TEST(ReproducerLive, FlakyCaseReproducesInCaseScope) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  GoAdapter adapter;
  const auto ex = FailureExtractor::shipped();
  Reproducer rep(adapter, fixtures() / "flaky5", ex);
  RunRequest base;
  base.runs = 60;
  base.race = false;
  const auto report = rep.reproduce(parse_ticket("./sched/TestFirstResult/both_ready"), base);
  EXPECT_TRUE(report.reproduced);
  EXPECT_EQ(report.scope_used, RunScope::case_scope);
  EXPECT_FALSE(report.target_attempted);
  ASSERT_FALSE(report.failures.empty());
  EXPECT_EQ(report.failures[0].message, "FirstResult() = 2, want 1");
  EXPECT_EQ(report.failures[0].assertion_file, "sched/first_test.go");
  EXPECT_EQ(report.failures[0].assertion_line, 20u);
}

TEST(ReproducerLive, OrderDependentFailureNeedsTargetScope) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  GoAdapter adapter;
  const auto ex = FailureExtractor::shipped();
  Reproducer rep(adapter, fixtures() / "flaky5", ex);
  RunRequest base;
  base.runs = 5;
  base.race = false;
  const auto report = rep.reproduce(parse_ticket("./config/TestRegion/default"), base);
  EXPECT_TRUE(report.reproduced);
  EXPECT_EQ(report.case_failures, 0u);
  EXPECT_TRUE(report.target_attempted);
  EXPECT_EQ(report.scope_used, RunScope::target);
}

TEST(ReproducerLive, StableCaseIsNotReproduced) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  GoAdapter adapter;
  const auto ex = FailureExtractor::shipped();
  Reproducer rep(adapter, fixtures() / "flaky5", ex);
  RunRequest base;
  base.runs = 10;
  base.race = false;
  const auto report = rep.reproduce(parse_ticket("./maporder/TestKeys/single_key"), base);
  EXPECT_FALSE(report.reproduced);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.attempted_runs, 10u);
}
