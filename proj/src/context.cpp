#include "flakyfix/context.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "flakyfix/errors.hpp"

namespace flakyfix {

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::guided ? "guided" : "bfs-all";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "guided") return Strategy::guided;
  if (text == "bfs-all") return Strategy::bfs_all;
  throw std::invalid_argument("unknown strategy: " + std::string(text));
}

namespace {

std::string all_indices(std::size_t n, std::size_t cap) {
  std::string out;
  for (std::size_t i = 1; i <= std::min(n, cap); ++i) out += std::to_string(i) + " ";
  return out;
}

// Oracle call with retries. nullopt means every try failed.
std::optional<std::vector<std::size_t>> ask(const std::function<std::string()>& call,
                                            std::size_t n, std::size_t cap) {
  for (int attempt = 0; attempt <= kOracleRetries; ++attempt) {
    try {
      return parse_selection(call(), n, cap);
    } catch (const EmptySelection&) {
    } catch (const OracleFailure&) {
    }
  }
  return std::nullopt;
}

}  // namespace

std::string SelectAllOracle::select(const SelectQuery& q) {
  return all_indices(q.candidates.size(), q.cap);
}

std::string SelectAllOracle::filter(const SelectQuery& q) {
  return all_indices(q.candidates.size(), q.cap);
}

std::vector<CandidateView> candidate_views(const std::vector<const SubjectFunction*>& fns) {
  std::vector<CandidateView> views;
  views.reserve(fns.size());
  for (const auto* fn : fns) views.push_back({fn->name, fn->file, fn->decl_line, fn->decl_text});
  return views;
}

std::string render_candidates(const std::vector<const SubjectFunction*>& children) {
  return render_candidate_list(candidate_views(children));
}

std::string LlmSelectionOracle::select(const SelectQuery& q) {
  const SubjectFunction& p = q.parent;
  return gateway_.complete(select_prompt(q.evidence, {p.name, p.file, p.decl_line, p.decl_text},
                                         candidate_views(q.candidates), q.cap, q.guidance));
}

std::string LlmSelectionOracle::filter(const SelectQuery& q) {
  return gateway_.complete(
      filter_prompt(q.evidence, candidate_views(q.candidates), q.cap, q.guidance));
}

std::vector<NodeId> collect_context(const DynamicCallGraph& graph, const TraversalConfig& cfg,
                                    SelectionOracle& oracle, const std::string& evidence,
                                    const std::string& guidance, TraversalTrace* trace) {
  if (cfg.k == 0) throw std::invalid_argument("traversal needs k >= 1");
  SelectAllOracle select_all;
  SelectionOracle& chosen = cfg.strategy == Strategy::bfs_all ? select_all : oracle;

  std::vector<NodeId> selected = graph.roots();
  std::set<NodeId> visited(selected.begin(), selected.end());
  std::deque<std::pair<NodeId, std::size_t>> queue;
  for (const auto& r : selected) queue.emplace_back(r, 0);

  while (!queue.empty()) {
    const auto [node, depth] = queue.front();
    queue.pop_front();
    if (cfg.depth && depth >= *cfg.depth) continue;

    std::vector<NodeId> candidates;
    for (const auto& c : graph.children(node)) {
      if (visited.count(c) == 0 && std::find(candidates.begin(), candidates.end(), c) == candidates.end()) {
        candidates.push_back(c);
      }
    }
    if (candidates.empty()) continue;

    std::vector<const SubjectFunction*> fns;
    for (const auto& c : candidates) fns.push_back(&graph.node(c));
    // The exhaustive baseline expands every child.
    const std::size_t cap = cfg.strategy == Strategy::bfs_all ? candidates.size() : cfg.k;
    const SelectQuery query{evidence, graph.node(node), fns, cap, guidance};

    SelectionStep step{node, depth, candidates, {}, false};
    auto picks = ask([&] { return chosen.select(query); }, candidates.size(), cap);
    if (!picks) {
      step.fallback = true;
      picks.emplace();
      for (std::size_t i = 1; i <= std::min(cap, candidates.size()); ++i) picks->push_back(i);
      const std::string note = "selection under " + graph.node(node).name +
                               " fell back to the first " + std::to_string(picks->size());
      spdlog::warn("{}", note);
      if (trace) trace->fallbacks.push_back(note);
    }
    for (const std::size_t i : *picks) {
      const NodeId& c = candidates[i - 1];
      if (!visited.insert(c).second) continue;
      selected.push_back(c);
      step.selected.push_back(c);
      queue.emplace_back(c, depth + 1);
    }
    if (trace) trace->steps.push_back(std::move(step));
  }
  return selected;
}

ContextBundle global_filter(const std::vector<NodeId>& ordered, const DynamicCallGraph& graph,
                            const TraversalConfig& cfg, SelectionOracle& oracle,
                            const std::string& evidence, const std::string& guidance) {
  ContextBundle bundle;
  bundle.ordered = ordered;
  const std::vector<NodeId> roots = graph.roots();
  std::vector<NodeId> rest;
  for (const auto& id : ordered) {
    if (std::find(roots.begin(), roots.end(), id) == roots.end()) rest.push_back(id);
  }
  for (const auto& id : roots) {
    if (std::find(ordered.begin(), ordered.end(), id) != ordered.end()) bundle.final.push_back(id);
  }

  std::set<std::size_t> keep;
  if (rest.size() <= cfg.f) {
    for (std::size_t i = 0; i < rest.size(); ++i) keep.insert(i);
  } else if (cfg.f > 0) {
    std::vector<const SubjectFunction*> fns;
    for (const auto& id : rest) fns.push_back(&graph.node(id));
    SelectAllOracle select_all;
    SelectionOracle& chosen = cfg.strategy == Strategy::bfs_all ? select_all : oracle;
    const SelectQuery query{evidence, graph.node(bundle.final.empty() ? rest.front() : bundle.final.front()),
                            fns, cfg.f, guidance};
    auto picks = ask([&] { return chosen.filter(query); }, rest.size(), cfg.f);
    if (!picks) {
      picks.emplace();
      for (std::size_t i = 1; i <= cfg.f; ++i) picks->push_back(i);
      bundle.fallbacks.push_back("global filter fell back to the first " + std::to_string(cfg.f));
      spdlog::warn("{}", bundle.fallbacks.back());
    }
    for (const std::size_t i : *picks) keep.insert(i - 1);
  }
  for (const std::size_t i : keep) bundle.final.push_back(rest[i]);
  bundle.rendered = render_bundle(graph, bundle.final);
  return bundle;
}

std::string render_bundle(const DynamicCallGraph& graph, const std::vector<NodeId>& nodes) {
  std::ostringstream out;
  for (const auto& id : nodes) {
    const auto& fn = graph.node(id);
    out << "=== " << fn.name << " (" << id.file << ":" << id.line << ") ===\n" << fn.decl_text;
    if (fn.decl_text.empty() || fn.decl_text.back() != '\n') out << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace flakyfix
