#include <gtest/gtest.h>

#include <random>

#include "flakyfix/dcg.hpp"
#include "flakyfix/errors.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

SubjectFunction fn(const std::string& name, const std::string& file, std::uint32_t line) {
  SubjectFunction f;
  f.name = name;
  f.file = file;
  f.decl_line = line;
  f.decl_text = "func " + name + "() {}";
  return f;
}

FunctionIndex small_index() {
  FunctionIndex idx;
  idx.add(fn("TestA", "a_test.go", 3));
  idx.add(fn("A", "a.go", 3));
  idx.add(fn("B", "a.go", 9));
  idx.add(fn("C", "b.go", 1));
  return idx;
}

LogEndpoint ep(const std::string& name, const std::string& file, std::uint32_t line) {
  return {file, line, name};
}

}  // namespace

TEST(Log, RenderAndParse) {
  const RawEdge e{ep("Store.Put", "pkg/store.go", 42), ep("Run$anon1", "pkg/run.go", 7)};
  const std::string line = render_record(e);
  EXPECT_EQ(line, "MethodEntry: pkg/store.go, 42, Store.Put Caller: pkg/run.go, 7, Run$anon1");
  const auto parsed = parse_log_text(line + "\n" + render_record({e.callee, LogEndpoint::sentinel()}) + "\n");
  ASSERT_EQ(parsed.edges.size(), 2u);
  EXPECT_EQ(parsed.edges[0], e);
  EXPECT_TRUE(parsed.edges[1].caller.is_sentinel());
}

TEST(Log, MalformedLines) {
  const std::string text =
      "MethodEntry: a.go, 3, A Caller: -, 0, -\n"
      "garbage\n"
      "RECORDER-ERROR: write failed\n"
      "MethodEntry: a.go, 3, A Caller: -, 5, -\n";
  EXPECT_THROW(parse_log_text(text, LogMode::strict), MalformedLine);
  const auto lenient = parse_log_text(text, LogMode::lenient);
  EXPECT_EQ(lenient.edges.size(), 1u);
  EXPECT_EQ(lenient.malformed, 2u);
  EXPECT_EQ(lenient.recorder_errors, 1u);
}

TEST(Graph, BuildRootsAndDedup) {
  const auto idx = small_index();
  const std::vector<RawEdge> edges = {
      {ep("TestA", "a_test.go", 3), LogEndpoint::sentinel()},
      {ep("A", "a.go", 3), ep("TestA", "a_test.go", 3)},
      {ep("B", "a.go", 9), ep("A", "a.go", 3)},
      {ep("B", "a.go", 9), ep("A", "a.go", 3)},
      {ep("C", "b.go", 1), LogEndpoint::sentinel()},
  };
  const auto g = build_graph(edges, idx, "TestA");
  EXPECT_EQ(g.nodes().size(), 4u);
  EXPECT_EQ(g.edges().size(), 2u);
  const auto roots = g.roots();
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_EQ(roots[0], (NodeId{"a_test.go", 3}));
  EXPECT_EQ(roots[1], (NodeId{"b.go", 1}));
  EXPECT_EQ(graph_stats(g), (GraphStats{4, 2, 2}));
}

TEST(Graph, UnknownEndpointThrows) {
  const std::vector<RawEdge> edges = {{ep("Z", "z.go", 1), LogEndpoint::sentinel()}};
  EXPECT_THROW(build_graph(edges, small_index()), UnresolvedNode);
}

TEST(Graph, CycleGetsARoot) {
  DynamicCallGraph g;
  for (const auto& f : {fn("A", "a.go", 1), fn("B", "a.go", 5), fn("T", "t.go", 1)}) g.add_node(f);
  g.add_edge({{"a.go", 1}, {"a.go", 5}});
  g.add_edge({{"a.go", 5}, {"a.go", 1}});
  g.add_edge({{"t.go", 1}, {"t.go", 1}});
  const auto roots = g.roots();
  // T only has a self-loop; the A<->B cycle then contributes its first node.
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_EQ(roots[0], (NodeId{"t.go", 1}));
  EXPECT_EQ(roots[1], (NodeId{"a.go", 1}));
}

TEST(Graph, InferredEdgeNeverDuplicatesRuntimeEdge) {
  DynamicCallGraph g;
  g.add_node(fn("A", "a.go", 1));
  g.add_node(fn("B", "a.go", 5));
  EXPECT_TRUE(g.add_edge({{"a.go", 1}, {"a.go", 5}, EdgeKind::runtime}));
  EXPECT_FALSE(g.add_edge({{"a.go", 1}, {"a.go", 5}, EdgeKind::async_inferred}));
  EXPECT_EQ(g.edges().size(), 1u);
}

TEST(Graph, DepthMatchesBruteForce) {
  std::mt19937 rng(7);
  for (int round = 0; round < 100; ++round) {
    const int n = 2 + static_cast<int>(rng() % 12);
    DynamicCallGraph g;
    for (int i = 0; i < n; ++i) g.add_node(fn("F" + std::to_string(i), "f.go", i + 1));
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 3 == 0) {
          g.add_edge({{"f.go", static_cast<std::uint32_t>(i + 1)}, {"f.go", static_cast<std::uint32_t>(j + 1)}});
          adj[i].push_back(j);
        }
      }
    }
    // Longest path in edges over a DAG by exhaustive DFS.
    std::function<std::size_t(int)> longest = [&](int v) {
      std::size_t best = 0;
      for (int w : adj[v]) best = std::max(best, 1 + longest(w));
      return best;
    };
    std::size_t expect = 0;
    for (int i = 0; i < n; ++i) expect = std::max(expect, longest(i));
    EXPECT_EQ(graph_stats(g).max_depth, expect) << "round " << round;
  }
}

TEST(Graph, AsyncInferenceOnFixture) {
  GoAdapter adapter;
  const fs::path ws = fixtures() / "async_chain";
  const auto parsed = parse_log_text(async_chain_trace());
  auto g = build_graph(parsed.edges, FunctionIndex::build(adapter, ws), "TestAddProgram");
  const auto report = infer_async_edges(g, adapter);
  ASSERT_EQ(report.added.size(), 1u);
  EXPECT_EQ(report.added[0].caller, (NodeId{"controller/validator.go", 11}));
  EXPECT_EQ(report.added[0].callee, (NodeId{"backend/backend_test.go", 18}));
  EXPECT_EQ(report.added[0].kind, EdgeKind::async_inferred);
  EXPECT_EQ(graph_stats(g), (GraphStats{9, 7, 4}));
  const auto dot = to_dot(g);
  EXPECT_NE(dot.find("[style=dashed]"), std::string::npos);
  EXPECT_NE(dot.find("Controller.ValidateIdentity@controller/validator.go:11"), std::string::npos);
}
