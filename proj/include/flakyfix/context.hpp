#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flakyfix/dcg.hpp"
#include "flakyfix/llm.hpp"
#include "flakyfix/prompts.hpp"

namespace flakyfix {

enum class Strategy { guided, bfs_all };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

struct TraversalConfig {
  std::optional<std::size_t> depth;  // unbounded when empty
  std::size_t k = 3;
  std::size_t f = 5;
  Strategy strategy = Strategy::guided;
};

struct SelectQuery {
  const std::string& evidence;
  const SubjectFunction& parent;
  const std::vector<const SubjectFunction*>& candidates;
  std::size_t cap;
  const std::string& guidance;
};

// Answers are free text holding 1-based candidate numbers; the collector
// parses and bounds them.
class SelectionOracle {
 public:
  virtual ~SelectionOracle() = default;
  virtual std::string select(const SelectQuery& query) = 0;
  virtual std::string filter(const SelectQuery& query) = 0;
};

// Picks every candidate, up to the cap.
class SelectAllOracle : public SelectionOracle {
 public:
  std::string select(const SelectQuery& query) override;
  std::string filter(const SelectQuery& query) override;
};

class LlmSelectionOracle : public SelectionOracle {
 public:
  explicit LlmSelectionOracle(Gateway& gateway) : gateway_(gateway) {}
  std::string select(const SelectQuery& query) override;
  std::string filter(const SelectQuery& query) override;

 private:
  Gateway& gateway_;
};

class ScriptedOracle : public SelectionOracle {
 public:
  using Fn = std::function<std::string(const SelectQuery&)>;
  ScriptedOracle(Fn select, Fn filter) : select_(std::move(select)), filter_(std::move(filter)) {}
  std::string select(const SelectQuery& query) override { return select_(query); }
  std::string filter(const SelectQuery& query) override { return filter_(query); }

 private:
  Fn select_;
  Fn filter_;
};

struct SelectionStep {
  NodeId parent;
  std::size_t depth = 0;
  std::vector<NodeId> candidates;
  std::vector<NodeId> selected;
  bool fallback = false;
};

struct TraversalTrace {
  std::vector<SelectionStep> steps;
  std::vector<std::string> fallbacks;
};

struct ContextBundle {
  std::vector<NodeId> ordered;  // L: roots, then selections in BFS order
  std::vector<NodeId> final;    // roots first, then kept nodes in L order
  std::string rendered;
  std::vector<std::string> fallbacks;
};

inline constexpr int kOracleRetries = 2;

// Oracle-guided breadth-first traversal from the graph roots. Nodes already
// selected are never offered again, so cyclic graphs terminate.
std::vector<NodeId> collect_context(const DynamicCallGraph& graph, const TraversalConfig& cfg,
                                    SelectionOracle& oracle, const std::string& evidence,
                                    const std::string& guidance = "",
                                    TraversalTrace* trace = nullptr);

ContextBundle global_filter(const std::vector<NodeId>& ordered, const DynamicCallGraph& graph,
                            const TraversalConfig& cfg, SelectionOracle& oracle,
                            const std::string& evidence, const std::string& guidance = "");

std::vector<CandidateView> candidate_views(const std::vector<const SubjectFunction*>& fns);
std::string render_candidates(const std::vector<const SubjectFunction*>& children);

// `=== name (file:line) ===` followed by the full declaration, per node.
std::string render_bundle(const DynamicCallGraph& graph, const std::vector<NodeId>& nodes);

}  // namespace flakyfix
