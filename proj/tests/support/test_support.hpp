#pragma once

#include <cstdlib>
#include <deque>
#include <set>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flakyfix/dcg.hpp"
#include "flakyfix/go_adapter.hpp"
#include "flakyfix/instrumenter.hpp"
#include "flakyfix/orchestrator.hpp"

namespace flakyfix::testing {

namespace fs = std::filesystem;

inline fs::path fixtures() { return FLAKYFIX_FIXTURES_DIR; }
inline fs::path golden_dir() { return FLAKYFIX_GOLDEN_DIR; }
inline fs::path cli_path() { return FLAKYFIX_CLI_PATH; }

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, std::string_view text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = fs::temp_directory_path() / ("flakyfix-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    if (!std::getenv("FLAKYFIX_KEEP_TMP")) fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline bool go_available() {
  static const bool ok = std::system("go version >/dev/null 2>&1") == 0;
  return ok;
}

class FakeClock : public Clock {
 public:
  double now_s() override { return t; }
  double t = 1000.0;
};

// Real Go parsing with scripted builds and runs. A run fails unless every
// marker in `passing_markers` occurs in the test file; a trace-log run writes
// `trace_log` to the requested path.
class FakeGoAdapter : public GoAdapter {
 public:
  std::vector<CompileDiagnostic> compile(const fs::path& ws) override {
    ++compiles;
    for (const auto& rel : source_files(ws)) {
      const std::string text = slurp(ws / rel);
      std::istringstream in(text);
      std::string line;
      std::uint32_t n = 0;
      std::vector<CompileDiagnostic> diags;
      while (std::getline(in, line)) {
        ++n;
        if (line.find("BROKEN") != std::string::npos && line.find("//") == std::string::npos) {
          diags.push_back({rel, n, 2, "undefined: BROKEN", DiagnosticKind::other});
        }
      }
      if (!diags.empty()) return diags;
    }
    return {};
  }

  std::vector<RunOutcome> run_test(const fs::path& ws, const RunRequest& req) override {
    ++run_batches;
    if (clock) clock->t += seconds_per_batch;
    if (auto it = req.env.find(std::string(kTraceLogEnv)); it != req.env.end()) {
      spit(it->second, trace_log);
    }
    bool pass = !passing_marker.empty();
    const std::string text = slurp(ws / test_file);
    if (!passing_marker.empty() && text.find(passing_marker) == std::string::npos) pass = false;
    std::vector<RunOutcome> out;
    for (std::size_t i = 0; i < req.runs; ++i) {
      RunOutcome o;
      o.test = req.selector;
      o.run_index = i;
      o.verdict = pass ? Verdict::pass : Verdict::fail;
      if (!pass) o.raw_output = failure_output;
      out.push_back(o);
    }
    return out;
  }

  std::string test_file;
  std::string passing_marker;
  std::string failure_output;
  std::string trace_log;
  FakeClock* clock = nullptr;
  double seconds_per_batch = 0.0;
  std::size_t compiles = 0;
  std::size_t run_batches = 0;
};

// Trace log of one failing run of the async_chain fixture, as the recorder
// would write it.
inline std::string async_chain_trace() {
  const LogEndpoint none = LogEndpoint::sentinel();
  const LogEndpoint test{"backend/backend_test.go", 36, "TestAddProgram"};
  const LogEndpoint sub{"backend/backend_test.go", 45, "TestAddProgram$anon1"};
  const LogEndpoint ctor{"controller/controller.go", 21, "New"};
  const LogEndpoint handler_ctor{"backend/backend.go", 13, "NewHandler"};
  const LogEndpoint handler{"backend/backend.go", 17, "Handler.AddProgram"};
  const LogEndpoint add{"controller/controller.go", 27, "Controller.AddProgram"};
  const LogEndpoint validate{"controller/validator.go", 11, "Controller.ValidateIdentity"};
  const LogEndpoint update{"backend/backend_test.go", 18, "fakeStore.UpdateInfo"};
  const LogEndpoint check{"backend/backend_test.go", 25, "fakeStore.assertExpectations"};
  std::string log;
  for (const RawEdge& e : std::vector<RawEdge>{{test, none}, {sub, none}, {ctor, sub},
                                              {handler_ctor, sub}, {handler, sub}, {add, handler},
                                              {validate, add}, {check, sub}, {update, none}}) {
    log += render_record(e) + "\n";
  }
  return log;
}

inline SubjectFunction synthetic_fn(std::size_t i) {
  SubjectFunction f;
  f.name = "F" + std::to_string(i);
  f.file = "pkg/f" + std::to_string(i % 7) + ".go";
  f.decl_line = static_cast<std::uint32_t>(i + 1);
  f.decl_text = "func " + f.name + "() {\n\twork(" + std::to_string(i) + ")\n}";
  return f;
}

inline NodeId synthetic_id(std::size_t i) { return synthetic_fn(i).id(); }

// Graph over synthetic_fn(0..n-1) with the given (caller, callee) pairs.
inline DynamicCallGraph make_graph(std::size_t n,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  DynamicCallGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(synthetic_fn(i));
  for (const auto& [a, b] : edges) g.add_edge({synthetic_id(a), synthetic_id(b)});
  return g;
}

// Random DAG: edges only go from lower to higher index.
inline DynamicCallGraph random_dag(std::mt19937& rng, std::size_t max_nodes, std::size_t max_children) {
  const std::size_t n = 1 + rng() % max_nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t kids = rng() % (max_children + 1);
    for (std::size_t c = 0; c < kids; ++c) edges.emplace_back(i, i + 1 + rng() % (n - i - 1));
  }
  return make_graph(n, edges);
}

// Random graph that may contain cycles and self-loops.
inline DynamicCallGraph random_cyclic(std::mt19937& rng, std::size_t max_nodes, std::size_t max_children) {
  const std::size_t n = 2 + rng() % (max_nodes - 1);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t kids = rng() % (max_children + 1);
    for (std::size_t c = 0; c < kids; ++c) edges.emplace_back(i, rng() % n);
  }
  edges.emplace_back(n - 1, 0);
  return make_graph(n, edges);
}

// Textbook breadth-first order from the roots, children in edge order.
inline std::vector<NodeId> brute_force_bfs(const DynamicCallGraph& g) {
  std::vector<NodeId> order;
  std::set<NodeId> seen;
  std::deque<NodeId> queue;
  for (const auto& r : g.roots()) {
    if (seen.insert(r).second) {
      order.push_back(r);
      queue.push_back(r);
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (const auto& e : g.edges()) {
      if (e.caller != v || !seen.insert(e.callee).second) continue;
      order.push_back(e.callee);
      queue.push_back(e.callee);
    }
  }
  return order;
}

inline const char* kAsyncChainFailure =
    "=== RUN   TestAddProgram/valid_program\n"
    "    backend_test.go:52: Not all calls expected by the mock for UpdateInfo were made\n"
    "--- FAIL: TestAddProgram/valid_program (0.00s)\n";

}  // namespace flakyfix::testing
