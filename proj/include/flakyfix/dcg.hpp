#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/subject.hpp"

namespace flakyfix {

// One side of a log record. The sentinel `-, 0, -` stands for "no caller".
struct LogEndpoint {
  std::string file;
  std::uint32_t line = 0;
  std::string name;

  static LogEndpoint sentinel() { return {"-", 0, "-"}; }
  bool is_sentinel() const { return file == "-" && line == 0 && name == "-"; }
  NodeId id() const { return {file, line}; }
  bool operator==(const LogEndpoint&) const = default;
};

struct RawEdge {
  LogEndpoint callee;
  LogEndpoint caller;
  bool operator==(const RawEdge&) const = default;
};

// `MethodEntry: <file>, <line>, <name> Caller: <file>, <line>, <name>`
std::string render_record(const RawEdge& edge);

enum class LogMode { strict, lenient };

struct ParsedLog {
  std::vector<RawEdge> edges;
  std::size_t recorder_errors = 0;
  std::size_t malformed = 0;
};

inline constexpr std::string_view kRecorderError = "RECORDER-ERROR";

// Throws MalformedLine in strict mode.
ParsedLog parse_log(std::istream& in, LogMode mode = LogMode::strict);
ParsedLog parse_log_text(std::string_view text, LogMode mode = LogMode::strict);

enum class EdgeKind { runtime, async_inferred };

struct CallEdge {
  NodeId caller;
  NodeId callee;
  EdgeKind kind = EdgeKind::runtime;
  bool operator==(const CallEdge&) const = default;
};

// Every function of a workspace snapshot keyed by (file, decl_line).
class FunctionIndex {
 public:
  static FunctionIndex build(const SubjectAdapter& adapter, const std::filesystem::path& workspace);
  void add(SubjectFunction fn);
  const SubjectFunction* find(const NodeId& id) const;
  const std::map<NodeId, SubjectFunction>& functions() const { return functions_; }
  // (file, line) pairs claimed by more than one function.
  const std::vector<NodeId>& collisions() const { return collisions_; }

 private:
  std::map<NodeId, SubjectFunction> functions_;
  std::vector<NodeId> collisions_;
};

class DynamicCallGraph {
 public:
  // Returns false when the node already exists.
  bool add_node(const SubjectFunction& fn);
  // Returns false for duplicates; a pair joined by a runtime edge never
  // receives an inferred one.
  bool add_edge(const CallEdge& edge);
  void add_root_entry(const NodeId& id);
  void set_test_function(const NodeId& id) { test_function_ = id; }

  const std::map<NodeId, SubjectFunction>& nodes() const { return nodes_; }
  const SubjectFunction& node(const NodeId& id) const;
  bool contains(const NodeId& id) const { return nodes_.count(id) > 0; }
  // Edges in insertion order.
  const std::vector<CallEdge>& edges() const { return edges_; }
  // Nodes logged with the sentinel caller.
  const std::set<NodeId>& root_entries() const { return root_entries_; }
  // Nodes in order of first mention.
  const std::vector<NodeId>& appearance() const { return appearance_; }
  const std::optional<NodeId>& test_function() const { return test_function_; }

  // Targets of outgoing edges in edge insertion order.
  std::vector<NodeId> children(const NodeId& id) const;
  bool has_edge(const NodeId& caller, const NodeId& callee) const;

  // Nodes without incoming edges (self-loops ignored), test function first,
  // then by first appearance. A cycle unreachable from those contributes its
  // earliest-appearing node.
  std::vector<NodeId> roots() const;

 private:
  void note(const NodeId& id);

  std::map<NodeId, SubjectFunction> nodes_;
  std::vector<CallEdge> edges_;
  std::set<std::pair<NodeId, NodeId>> pairs_;
  std::map<NodeId, std::vector<NodeId>> children_;
  std::set<NodeId> root_entries_;
  std::vector<NodeId> appearance_;
  std::set<NodeId> seen_;
  std::optional<NodeId> test_function_;
};

// Binds every endpoint to its declaration. Throws UnresolvedNode.
DynamicCallGraph build_graph(const std::vector<RawEdge>& edges, const FunctionIndex& index,
                             const std::optional<std::string>& test_function_name = std::nullopt);

struct AsyncAmbiguity {
  AsyncLaunchSite site;
  std::vector<NodeId> matches;
};

struct AsyncInferenceReport {
  std::vector<CallEdge> added;
  std::vector<AsyncAmbiguity> ambiguous;
  std::vector<AsyncLaunchSite> unmatched;
};

AsyncInferenceReport infer_async_edges(DynamicCallGraph& graph, const SubjectAdapter& adapter);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t max_depth = 0;
  bool operator==(const GraphStats&) const = default;
};

GraphStats graph_stats(const DynamicCallGraph& graph);

// Node label `name@file:line`; inferred edges are dashed.
std::string to_dot(const DynamicCallGraph& graph);

}  // namespace flakyfix
