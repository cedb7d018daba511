#include "flakyfix/dcg.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "flakyfix/errors.hpp"

namespace fs = std::filesystem;

namespace flakyfix {

std::string render_record(const RawEdge& e) {
  return "MethodEntry: " + e.callee.file + ", " + std::to_string(e.callee.line) + ", " +
         e.callee.name + " Caller: " + e.caller.file + ", " + std::to_string(e.caller.line) +
         ", " + e.caller.name;
}

namespace {

std::optional<RawEdge> parse_record(const std::string& line) {
  static const std::regex re(
      "MethodEntry: ([^,\n]+), (0|[1-9][0-9]*), ([^,\\s]+) Caller: ([^,\n]+), (0|[1-9][0-9]*), "
      "([^,\\s]+)");
  std::smatch m;
  if (!std::regex_match(line, m, re)) return std::nullopt;
  auto number = [](const std::string& s) -> std::optional<std::uint32_t> {
    if (s.size() > 9) return std::nullopt;
    return static_cast<std::uint32_t>(std::stoul(s));
  };
  const auto callee_line = number(m[2].str());
  const auto caller_line = number(m[5].str());
  if (!callee_line || !caller_line) return std::nullopt;
  RawEdge e{{m[1].str(), *callee_line, m[3].str()}, {m[4].str(), *caller_line, m[6].str()}};
  if (e.callee.line == 0 || e.callee.file == "-") return std::nullopt;
  const bool caller_dash = e.caller.file == "-" || e.caller.name == "-" || e.caller.line == 0;
  if (caller_dash && !e.caller.is_sentinel()) return std::nullopt;
  return e;
}

}  // namespace

ParsedLog parse_log(std::istream& in, LogMode mode) {
  ParsedLog log;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.rfind(kRecorderError, 0) == 0) {
      ++log.recorder_errors;
      continue;
    }
    if (auto edge = parse_record(line)) {
      log.edges.push_back(std::move(*edge));
      continue;
    }
    if (mode == LogMode::strict) throw MalformedLine(number, line);
    ++log.malformed;
  }
  return log;
}

ParsedLog parse_log_text(std::string_view text, LogMode mode) {
  std::istringstream in{std::string(text)};
  return parse_log(in, mode);
}

// ----------------------------------------------------------------- index

FunctionIndex FunctionIndex::build(const SubjectAdapter& adapter, const fs::path& workspace) {
  FunctionIndex index;
  for (const auto& rel : adapter.source_files(workspace)) {
    std::ifstream in(workspace / rel, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    for (auto& fn : adapter.parse_functions(ss.str(), rel)) index.add(std::move(fn));
  }
  return index;
}

void FunctionIndex::add(SubjectFunction fn) {
  const NodeId id = fn.id();
  if (functions_.count(id) > 0) {
    collisions_.push_back(id);
    return;
  }
  functions_.emplace(id, std::move(fn));
}

const SubjectFunction* FunctionIndex::find(const NodeId& id) const {
  const auto it = functions_.find(id);
  return it == functions_.end() ? nullptr : &it->second;
}

// ----------------------------------------------------------------- graph

void DynamicCallGraph::note(const NodeId& id) {
  if (seen_.insert(id).second) appearance_.push_back(id);
}

bool DynamicCallGraph::add_node(const SubjectFunction& fn) {
  const bool inserted = nodes_.emplace(fn.id(), fn).second;
  note(fn.id());
  return inserted;
}

bool DynamicCallGraph::add_edge(const CallEdge& edge) {
  if (!contains(edge.caller) || !contains(edge.callee)) {
    throw std::invalid_argument("edge endpoint not in graph: " + edge.caller.render() + " -> " +
                                edge.callee.render());
  }
  if (!pairs_.insert({edge.caller, edge.callee}).second) return false;
  edges_.push_back(edge);
  children_[edge.caller].push_back(edge.callee);
  return true;
}

void DynamicCallGraph::add_root_entry(const NodeId& id) {
  note(id);
  root_entries_.insert(id);
}

const SubjectFunction& DynamicCallGraph::node(const NodeId& id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("no graph node " + id.render());
  return it->second;
}

std::vector<NodeId> DynamicCallGraph::children(const NodeId& id) const {
  const auto it = children_.find(id);
  return it == children_.end() ? std::vector<NodeId>{} : it->second;
}

bool DynamicCallGraph::has_edge(const NodeId& caller, const NodeId& callee) const {
  return pairs_.count({caller, callee}) > 0;
}

std::vector<NodeId> DynamicCallGraph::roots() const {
  std::set<NodeId> has_incoming;
  for (const auto& e : edges_) {
    if (!(e.caller == e.callee)) has_incoming.insert(e.callee);
  }
  std::vector<NodeId> out;
  if (test_function_ && contains(*test_function_) && has_incoming.count(*test_function_) == 0) {
    out.push_back(*test_function_);
  }
  for (const auto& id : appearance_) {
    if (has_incoming.count(id) == 0 && std::find(out.begin(), out.end(), id) == out.end()) {
      out.push_back(id);
    }
  }
  std::set<NodeId> reached;
  auto reach = [&](const NodeId& start) {
    std::deque<NodeId> queue{start};
    reached.insert(start);
    while (!queue.empty()) {
      const NodeId n = queue.front();
      queue.pop_front();
      for (const auto& c : children(n)) {
        if (reached.insert(c).second) queue.push_back(c);
      }
    }
  };
  for (const auto& r : out) reach(r);
  for (const auto& id : appearance_) {
    if (reached.count(id) == 0) {
      out.push_back(id);
      reach(id);
    }
  }
  return out;
}

DynamicCallGraph build_graph(const std::vector<RawEdge>& edges, const FunctionIndex& index,
                             const std::optional<std::string>& test_function_name) {
  DynamicCallGraph graph;
  auto bind = [&](const LogEndpoint& end, const RawEdge& edge) -> NodeId {
    const SubjectFunction* fn = index.find(end.id());
    if (fn == nullptr) throw UnresolvedNode("no declaration for record: " + render_record(edge));
    graph.add_node(*fn);
    return fn->id();
  };
  for (const auto& e : edges) {
    if (e.caller.is_sentinel()) {
      graph.add_root_entry(bind(e.callee, e));
      continue;
    }
    const NodeId caller = bind(e.caller, e);
    const NodeId callee = bind(e.callee, e);
    graph.add_edge({caller, callee, EdgeKind::runtime});
  }
  if (test_function_name) {
    for (const auto& id : graph.appearance()) {
      const auto& fn = graph.node(id);
      if (fn.kind == FunctionKind::named && fn.name == *test_function_name) {
        graph.set_test_function(id);
        break;
      }
    }
  }
  return graph;
}

AsyncInferenceReport infer_async_edges(DynamicCallGraph& graph, const SubjectAdapter& adapter) {
  AsyncInferenceReport report;
  std::map<std::string, std::vector<NodeId>> by_name;
  for (const auto& [id, fn] : graph.nodes()) by_name[fn.unqualified_name()].push_back(id);

  const std::vector<NodeId> order = graph.appearance();
  for (const auto& id : order) {
    for (const auto& site : adapter.find_async_launches(graph.node(id))) {
      std::vector<NodeId> matches;
      if (site.literal) {
        if (graph.contains(*site.literal)) matches.push_back(*site.literal);
      } else if (auto it = by_name.find(site.callee_name); it != by_name.end()) {
        matches = it->second;
      }
      if (matches.empty()) {
        report.unmatched.push_back(site);
      } else if (matches.size() > 1) {
        report.ambiguous.push_back({site, matches});
      } else {
        CallEdge edge{id, matches.front(), EdgeKind::async_inferred};
        if (graph.add_edge(edge)) report.added.push_back(edge);
      }
    }
  }
  return report;
}

GraphStats graph_stats(const DynamicCallGraph& graph) {
  GraphStats stats;
  stats.node_count = graph.nodes().size();
  stats.edge_count = graph.edges().size();
  std::map<NodeId, std::size_t> memo;
  std::set<NodeId> on_stack;
  std::function<std::size_t(const NodeId&)> longest = [&](const NodeId& n) -> std::size_t {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    on_stack.insert(n);
    std::size_t best = 0;
    for (const auto& c : graph.children(n)) {
      if (on_stack.count(c) > 0) continue;  // back edge
      best = std::max(best, 1 + longest(c));
    }
    on_stack.erase(n);
    memo[n] = best;
    return best;
  };
  for (const auto& r : graph.roots()) stats.max_depth = std::max(stats.max_depth, longest(r));
  return stats;
}

std::string to_dot(const DynamicCallGraph& graph) {
  std::map<NodeId, std::size_t> ids;
  std::ostringstream out;
  out << "digraph dcg {\n  node [shape=box];\n";
  for (const auto& [id, fn] : graph.nodes()) {
    const std::size_t n = ids.size();
    ids[id] = n;
    out << "  n" << n << " [label=\"" << fn.name << "@" << id.file << ":" << id.line << "\"];\n";
  }
  for (const auto& e : graph.edges()) {
    out << "  n" << ids[e.caller] << " -> n" << ids[e.callee];
    if (e.kind == EdgeKind::async_inferred) out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace flakyfix
