#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "flakyfix/errors.hpp"
#include "flakyfix/instrumenter.hpp"
#include "flakyfix/reproducer.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

const char* kFile = R"(package calc

import "fmt"

func Add(a, b int) int { return a + b }

func Noop() {}

type T struct{}

func (T) Show(v int) {
	fmt.Println(v)
	func() {
		fmt.Println("inner")
	}()
}
)";

}  // namespace

TEST(Instrument, PreservesLinesAndIsReversible) {
  const auto fns = parse_go_functions(kFile, "calc/calc.go");
  const std::string out = instrument_source(kFile, fns, "example.com/m");
  EXPECT_EQ(lines(out), lines(kFile));
  EXPECT_NE(out.find("ffrecorder.Enter(\"calc/calc.go\", 5, \"Add\")"), std::string::npos);
  EXPECT_NE(out.find("ffrecorder.Enter(\"calc/calc.go\", 13, \"T.Show$anon1\")"), std::string::npos);
  EXPECT_EQ(out.find("\"Noop\""), std::string::npos);
  EXPECT_NE(out.find("import ffrecorder \"example.com/m/zz_flakyfix_recorder\""), std::string::npos);
  EXPECT_EQ(strip_instrumentation(out), kFile);
  // Each function's declaration line is unchanged.
  for (const auto& f : parse_go_functions(out, "calc/calc.go")) {
    const auto it = std::find_if(fns.begin(), fns.end(), [&](const auto& o) { return o.name == f.name; });
    ASSERT_NE(it, fns.end());
    EXPECT_EQ(it->decl_line, f.decl_line);
  }
}

TEST(Instrument, NothingToInject) {
  const std::string src = "package p\n\nfunc a() {}\n";
  EXPECT_EQ(instrument_source(src, parse_go_functions(src, "p.go"), "m"), src);
}

TEST(Instrument, ModulePath) {
  EXPECT_EQ(go_module_path(fixtures() / "async_chain"), "example.com/programs");
  EXPECT_EQ(go_module_path(fixtures() / "flaky5"), "example.com/flaky5");
}

TEST(Instrument, ShadowLeavesWorkspaceAlone) {
  GoAdapter adapter;
  const auto before = tree_hash(fixtures() / "async_chain");
  TempDir tmp("shadow");
  const auto iw = instrument_workspace(adapter, fixtures() / "async_chain",
                                       all_packages(adapter, fixtures() / "async_chain"),
                                       tmp / "shadow", tmp / "trace.log");
  EXPECT_EQ(tree_hash(fixtures() / "async_chain"), before);
  EXPECT_TRUE(fs::exists(iw.shadow / iw.manifest.support_unit));
  const auto skipped = std::count_if(iw.manifest.entries.begin(), iw.manifest.entries.end(),
                                     [](const auto& e) { return e.skipped; });
  EXPECT_GT(iw.manifest.entries.size(), 8u);
  EXPECT_EQ(skipped, 0);
  const auto text = slurp(iw.shadow / "controller/validator.go");
  EXPECT_EQ(lines(text), lines(slurp(fixtures() / "async_chain/controller/validator.go")));
}

TEST(InstrumentLive, TraceOfFailingRun) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  GoAdapter adapter;
  TempDir tmp("trace");
  const fs::path ws = fixtures() / "async_chain";
  const auto iw = instrument_workspace(adapter, ws, all_packages(adapter, ws), tmp / "shadow",
                                       tmp / "default.log");
  ASSERT_TRUE(adapter.compile(iw.shadow).empty());
  RunRequest req;
  req.selector = parse_ticket("./backend/TestAddProgram/valid_program");
  req.race = false;
  req.env[std::string(kTraceLogEnv)] = (tmp / "run.log").string();
  adapter.run_test(iw.shadow, req);
  std::ifstream in(tmp / "run.log");
  const auto parsed = parse_log(in);
  EXPECT_EQ(parsed.recorder_errors, 0u);
  const auto g = build_graph(parsed.edges, FunctionIndex::build(adapter, ws), "TestAddProgram");
  const NodeId validate{"controller/validator.go", 11};
  const NodeId add{"controller/controller.go", 27};
  ASSERT_TRUE(g.contains(validate));
  EXPECT_TRUE(g.has_edge(add, validate));
  // The goroutine's caller is not attributable from its stack.
  EXPECT_TRUE(g.root_entries().count(NodeId{"backend/backend_test.go", 18}));
}
