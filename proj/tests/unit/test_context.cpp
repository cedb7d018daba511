#include <gtest/gtest.h>

#include <random>

#include "flakyfix/context.hpp"
#include "flakyfix/errors.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

ScriptedOracle fixed(std::string select, std::string filter = "1") {
  return ScriptedOracle([select](const SelectQuery&) { return select; },
                        [filter](const SelectQuery&) { return filter; });
}

// 0 -> 1,2,3 ; 1 -> 4 ; 2 -> 5 ; 4 -> 6
DynamicCallGraph tree() {
  return make_graph(7, {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 5}, {4, 6}});
}

}  // namespace

TEST(Traversal, BfsAllMatchesTextbookOrder) {
  const auto g = tree();
  SelectAllOracle unused;
  TraversalConfig cfg;
  cfg.strategy = Strategy::bfs_all;
  cfg.k = 1;  // ignored by the exhaustive strategy
  EXPECT_EQ(collect_context(g, cfg, unused, "e"), brute_force_bfs(g));
}

TEST(Traversal, GuidedRespectsK) {
  const auto g = tree();
  auto oracle = fixed("3, 1, 2");
  TraversalConfig cfg;
  cfg.k = 2;
  TraversalTrace trace;
  const auto L = collect_context(g, cfg, oracle, "e", "", &trace);
  // Root, then children 3 and 1 of node 0, then node 1's only child.
  EXPECT_EQ(L, (std::vector<NodeId>{synthetic_id(0), synthetic_id(3), synthetic_id(1), synthetic_id(4),
                                    synthetic_id(6)}));
  for (const auto& s : trace.steps) EXPECT_LE(s.selected.size(), cfg.k);
}

TEST(Traversal, DepthBound) {
  const auto g = tree();
  SelectAllOracle all;
  TraversalConfig cfg;
  cfg.strategy = Strategy::bfs_all;
  cfg.depth = 0;
  EXPECT_EQ(collect_context(g, cfg, all, "e"), (std::vector<NodeId>{synthetic_id(0)}));
  cfg.depth = 1;
  EXPECT_EQ(collect_context(g, cfg, all, "e").size(), 4u);
}

TEST(Traversal, OracleFailureFallsBack) {
  const auto g = tree();
  int calls = 0;
  ScriptedOracle oracle([&](const SelectQuery&) { ++calls; return std::string("none of them"); },
                        [](const SelectQuery&) { return std::string("1"); });
  TraversalConfig cfg;
  cfg.k = 1;
  TraversalTrace trace;
  const auto L = collect_context(g, cfg, oracle, "e", "", &trace);
  EXPECT_EQ(L[1], synthetic_id(1));
  EXPECT_FALSE(trace.fallbacks.empty());
  // One call plus the retries for every expanded node.
  EXPECT_EQ(calls % (kOracleRetries + 1), 0);
}

TEST(Traversal, CyclesTerminate) {
  const auto g = make_graph(3, {{0, 1}, {1, 2}, {2, 0}, {1, 1}});
  SelectAllOracle all;
  TraversalConfig cfg;
  const auto L = collect_context(g, cfg, all, "e");
  EXPECT_EQ(L.size(), 3u);
}

TEST(Traversal, KZeroRejected) {
  const auto g = tree();
  SelectAllOracle all;
  TraversalConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(collect_context(g, cfg, all, "e"), std::invalid_argument);
}

TEST(GlobalFilter, KeepsRootsAndAtMostF) {
  const auto g = tree();
  SelectAllOracle all;
  TraversalConfig cfg;
  cfg.strategy = Strategy::bfs_all;
  const auto L = collect_context(g, cfg, all, "e");
  auto oracle = fixed("1", "6, 2, 9, 2");
  cfg.strategy = Strategy::guided;
  cfg.f = 2;
  const auto b = global_filter(L, g, cfg, oracle, "e");
  ASSERT_EQ(b.final.size(), 3u);
  EXPECT_EQ(b.final[0], synthetic_id(0));
  // Kept nodes keep their traversal order.
  EXPECT_EQ(b.final[1], L[2]);
  EXPECT_EQ(b.final[2], L[6]);
  EXPECT_NE(b.rendered.find("=== F0 (pkg/f0.go:1) ==="), std::string::npos);
}

TEST(GlobalFilter, SmallSetsSkipTheOracle) {
  const auto g = tree();
  int calls = 0;
  ScriptedOracle oracle([](const SelectQuery&) { return std::string("1"); },
                        [&](const SelectQuery&) { ++calls; return std::string("1"); });
  TraversalConfig cfg;
  cfg.f = 10;
  const std::vector<NodeId> L = {synthetic_id(0), synthetic_id(1), synthetic_id(2)};
  EXPECT_EQ(global_filter(L, g, cfg, oracle, "e").final, L);
  EXPECT_EQ(calls, 0);
  cfg.f = 0;
  EXPECT_EQ(global_filter(L, g, cfg, oracle, "e").final, (std::vector<NodeId>{synthetic_id(0)}));
}

TEST(GlobalFilter, FallbackTakesFirstF) {
  const auto g = tree();
  auto oracle = fixed("1", "no idea");
  TraversalConfig cfg;
  cfg.f = 2;
  SelectAllOracle all;
  TraversalConfig bfs;
  bfs.strategy = Strategy::bfs_all;
  const auto L = collect_context(g, bfs, all, "e");
  const auto b = global_filter(L, g, cfg, oracle, "e");
  EXPECT_EQ(b.final, (std::vector<NodeId>{L[0], L[1], L[2]}));
  EXPECT_EQ(b.fallbacks.size(), 1u);
}

TEST(LlmOracle, PromptsCarryCandidates) {
  const auto g = tree();
  ScriptedBackend backend({{Purpose::select, {}, {"2"}}, {Purpose::filter, {}, {"1"}}});
  Gateway gw(backend);
  LlmSelectionOracle oracle(gw);
  TraversalConfig cfg;
  cfg.k = 1;
  cfg.depth = 1;
  const auto L = collect_context(g, cfg, oracle, "evidence text", "avoid F1");
  EXPECT_EQ(L, (std::vector<NodeId>{synthetic_id(0), synthetic_id(2)}));
  ASSERT_EQ(backend.prompts().size(), 1u);
  const auto& user = backend.prompts()[0].user;
  EXPECT_NE(user.find("evidence text"), std::string::npos);
  EXPECT_NE(user.find("[2] F2 (pkg/f2.go:3)"), std::string::npos);
  EXPECT_NE(user.find("avoid F1"), std::string::npos);
}
