#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_adapter.hpp"
#include "flakyfix/reproducer.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

const char* kSource = R"(package svc

import "sync"

type Cache struct{ mu sync.Mutex }

func (c *Cache) Get(key string) string {
	c.mu.Lock()
	defer c.mu.Unlock()
	return key
}

func Run(items []string) {
	var wg sync.WaitGroup
	for _, it := range items {
		wg.Add(1)
		go func(s string) {
			defer wg.Done()
			_ = s
		}(it)
	}
	go worker()
	wg.Wait()
	f := func() {}
	f()
}

func worker() {}

func empty() {
}
)";

}  // namespace

TEST(GoFunctions, NamesKindsAndLines) {
  const auto fns = parse_go_functions(kSource, "svc/svc.go");
  std::vector<std::string> names;
  for (const auto& f : fns) names.push_back(f.name);
  EXPECT_EQ(names, (std::vector<std::string>{"Cache.Get", "Run", "Run$anon1", "Run$anon2",
                                             "worker", "empty"}));
  EXPECT_EQ(fns[0].kind, FunctionKind::method);
  EXPECT_EQ(fns[0].decl_line, 7u);
  EXPECT_EQ(fns[1].kind, FunctionKind::named);
  EXPECT_EQ(fns[2].kind, FunctionKind::anonymous);
  EXPECT_EQ(fns[2].decl_line, 17u);
  EXPECT_TRUE(fns[5].empty_body);
}

TEST(GoFunctions, BodySpanMatchesSource) {
  const std::string text = kSource;
  for (const auto& f : parse_go_functions(text, "svc/svc.go")) {
    ASSERT_LE(f.body_span.end, text.size());
    EXPECT_EQ(text.substr(f.body_span.start, f.body_span.size()), f.source) << f.name;
    EXPECT_EQ(f.source.front(), '{');
    EXPECT_EQ(f.source.back(), '}');
    EXPECT_TRUE(f.decl_span.contains(f.body_span));
  }
}

TEST(GoFunctions, SyntaxErrorThrows) {
  EXPECT_THROW(parse_go_functions("package p\nfunc f( {\n", "p.go"), ParseError);
}

TEST(GoFunctions, AsyncLaunches) {
  const auto fns = parse_go_functions(kSource, "svc/svc.go");
  const auto sites = find_go_async_launches(fns[1]);
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_TRUE(sites[0].literal.has_value());
  EXPECT_EQ(sites[0].literal->line, 17u);
  EXPECT_EQ(sites[1].callee_name, "worker");
  EXPECT_EQ(sites[1].line, 22u);
  EXPECT_FALSE(sites[1].literal.has_value());
}

TEST(GoDiagnostics, ParsesAndClassifies) {
  const std::string out =
      "# example.com/m/pkg\n"
      "pkg/a_test.go:12:2: declared and not used: x\n"
      "pkg/a_test.go:3:2: \"sort\" imported and not used\n"
      "pkg/a.go:7:9: undefined: foo\n"
      "note: module requires Go 1.22\n";
  const auto d = parse_go_diagnostics(out, "/ws", kDefaultUnusedPattern);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].file, "pkg/a_test.go");
  EXPECT_EQ(d[0].line, 12u);
  EXPECT_EQ(d[0].column, 2u);
  EXPECT_EQ(d[0].kind, DiagnosticKind::unused_variable);
  EXPECT_EQ(d[1].kind, DiagnosticKind::unused_variable);
  EXPECT_EQ(d[2].kind, DiagnosticKind::other);
  EXPECT_EQ(d[2].message, "undefined: foo");
}

TEST(GoTestJson, SplitsIterations) {
  auto ev = [](const std::string& action, const std::string& test, const std::string& out = "") {
    std::string s = R"({"Action":")" + action + R"(","Package":"m/p")";
    if (!test.empty()) s += R"(,"Test":")" + test + "\"";
    if (!out.empty()) s += R"(,"Output":")" + out + "\"";
    return s + "}\n";
  };
  std::string stream;
  for (int i = 0; i < 3; ++i) {
    stream += ev("run", "TestF");
    stream += ev("run", "TestF/a_case");
    if (i == 1) stream += ev("output", "TestF/a_case", "    f_test.go:9: boom\\n");
    stream += ev(i == 1 ? "fail" : "pass", "TestF/a_case");
    stream += ev(i == 1 ? "fail" : "pass", "TestF");
  }
  const TestId id{"./p", "TestF", "a case"};
  const auto parsed = parse_go_test_json(stream, GoAdapter::reported_name(id), id);
  ASSERT_EQ(parsed.outcomes.size(), 3u);
  EXPECT_EQ(parsed.outcomes[0].verdict, Verdict::pass);
  EXPECT_EQ(parsed.outcomes[1].verdict, Verdict::fail);
  EXPECT_NE(parsed.outcomes[1].raw_output.find("f_test.go:9: boom"), std::string::npos);
  EXPECT_EQ(parsed.outcomes[2].verdict, Verdict::pass);
  EXPECT_FALSE(parsed.build_failed);
}

TEST(GoTestJson, RunPatternQuotesCase) {
  const TestId id{"./p", "TestF", "a+b case"};
  EXPECT_EQ(GoAdapter::case_pattern(id), "^TestF$/^a\\+b_case$");
  EXPECT_EQ(GoAdapter::reported_name(id), "TestF/a+b_case");
}

TEST(GoAdapterLive, RunsAndDetectsBuildErrors) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir tmp("adapter");
  copy_tree(fixtures() / "flaky5", tmp.path());
  GoAdapter adapter;
  EXPECT_TRUE(adapter.compile(tmp.path()).empty());
  RunRequest req;
  req.selector = parse_ticket("./maporder/TestKeys/single_key");
  req.runs = 5;
  req.race = false;
  const auto outcomes = adapter.run_test(tmp.path(), req);
  ASSERT_EQ(outcomes.size(), 5u);
  for (const auto& o : outcomes) EXPECT_EQ(o.verdict, Verdict::pass);

  spit(tmp / "maporder/keys.go", slurp(tmp / "maporder/keys.go") + "\nfunc broken() { nope() }\n");
  const auto diags = adapter.compile(tmp.path());
  ASSERT_FALSE(diags.empty());
  EXPECT_EQ(diags[0].file, "maporder/keys.go");
  EXPECT_EQ(adapter.run_test(tmp.path(), req).front().verdict, Verdict::build_error);
}

TEST(GoAdapterLive, UnknownCaseIsSelectorNotFound) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  GoAdapter adapter;
  RunRequest req;
  req.selector = parse_ticket("./maporder/TestKeys/no_such_case");
  req.race = false;
  EXPECT_THROW(adapter.run_test(fixtures() / "flaky5", req), SelectorNotFound);
  req.selector = parse_ticket("./nowhere/TestKeys/x");
  EXPECT_THROW(adapter.run_test(fixtures() / "flaky5", req), SelectorNotFound);
}
