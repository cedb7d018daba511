// Runs the ten acceptance checks and prints one ACCEPTANCE line per check.
// Live checks need the Go toolchain; without it they report FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "flakyfix/cli.hpp"
#include "flakyfix/context.hpp"
#include "flakyfix/edits.hpp"
#include "flakyfix/errors.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/process.hpp"
#include "flakyfix/reproducer.hpp"
#include "flakyfix/simplifier.hpp"
#include "flakyfix/transplanter.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kTraversalBudgetS = 5.0;
constexpr double kLiveGraphBudgetS = 60.0;
constexpr double kReplayBudgetS = 15 * 60.0;
constexpr std::size_t kReplayRuns = 200;
constexpr std::size_t kMinFixed = 4;
constexpr std::size_t kMaxAttempts = 18;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
  bool ok = true;
  std::vector<std::string> why;
  void expect(bool cond, const std::string& msg) {
    if (cond) return;
    ok = false;
    if (why.size() < 8) why.push_back(msg);
  }
};

std::string junk_answer(std::mt19937& rng) {
  static const char* words[] = {"none", "I pick", "and", "-1", "0", "99", "x", ",", "\n", "maybe"};
  std::string s;
  const int n = static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) {
    if (rng() % 2) s += std::to_string(rng() % 12);
    else s += words[rng() % 10];
    s += ' ';
  }
  return s;
}

// ------------------------------------------------------------------ 1

Check traversal_oracle() {
  Check c;
  std::mt19937 rng(1);
  SelectAllOracle unused;
  TraversalConfig cfg;
  cfg.strategy = Strategy::bfs_all;
  const auto start = Clock::now();
  for (int i = 0; i < 200; ++i) {
    const auto g = random_dag(rng, 50, 4);
    c.expect(collect_context(g, cfg, unused, "e") == brute_force_bfs(g), "graph " + std::to_string(i));
  }
  const double s = since(start);
  c.expect(s < kTraversalBudgetS, "took " + std::to_string(s) + " s");
  return c;
}

// ------------------------------------------------------------------ 2

std::map<NodeId, std::size_t> root_distances(const DynamicCallGraph& g) {
  std::map<NodeId, std::size_t> dist;
  std::deque<NodeId> queue;
  for (const auto& r : g.roots()) {
    dist.emplace(r, 0);
    queue.push_back(r);
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto& e : g.edges()) {
      if (e.caller == v && dist.emplace(e.callee, dist[v] + 1).second) queue.push_back(e.callee);
    }
  }
  return dist;
}

Check depth_and_cardinality() {
  Check c;
  std::mt19937 rng(2);
  for (int i = 0; i < 250; ++i) {
    const bool cyclic = i >= 200;
    const auto g = cyclic ? random_cyclic(rng, 40, 4) : random_dag(rng, 50, 4);
    TraversalConfig cfg;
    cfg.depth = rng() % 6;
    cfg.k = 1 + rng() % 4;
    std::mt19937 oracle_rng(static_cast<unsigned>(i));
    ScriptedOracle oracle([&](const SelectQuery&) { return junk_answer(oracle_rng); },
                          [&](const SelectQuery&) { return junk_answer(oracle_rng); });
    TraversalTrace trace;
    const auto L = collect_context(g, cfg, oracle, "e", "", &trace);
    const auto dist = root_distances(g);
    const auto roots = g.roots();
    const std::string tag = "graph " + std::to_string(i);
    std::set<NodeId> unique(L.begin(), L.end());
    c.expect(unique.size() == L.size(), tag + ": repeated node");
    for (const auto& step : trace.steps) {
      c.expect(step.selected.size() <= cfg.k, tag + ": more than k selected");
      for (const auto& s : step.selected) {
        c.expect(step.depth + 1 <= *cfg.depth, tag + ": selected beyond depth");
        c.expect(g.has_edge(step.parent, s), tag + ": selected a non-child");
      }
    }
    for (const auto& id : L) {
      if (std::find(roots.begin(), roots.end(), id) != roots.end()) continue;
      c.expect(dist.count(id) && dist.at(id) <= *cfg.depth, tag + ": node farther than depth");
    }
  }
  return c;
}

// ------------------------------------------------------------------ 3

// Test root 0; 1..3 its first children; 4..12 theirs; 13..27 a pool every
// node of 4..12 calls. 28..263 hang below the pool, past the depth bound, and
// also trail the first three children of nodes 0..3.
DynamicCallGraph shaped_graph() {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i <= 3; ++i) edges.emplace_back(0, i);
  for (std::size_t p = 1; p <= 3; ++p) {
    for (std::size_t j = 0; j < 3; ++j) edges.emplace_back(p, 4 + (p - 1) * 3 + j);
  }
  for (std::size_t p = 4; p <= 12; ++p) {
    for (std::size_t q = 13; q <= 27; ++q) edges.emplace_back(p, q);
  }
  for (std::size_t x = 28; x < 264; ++x) {
    edges.emplace_back(13 + (x - 28) % 15, x);
    edges.emplace_back(x % 4, x);
  }
  return make_graph(264, edges);
}

Check global_filter_shape() {
  Check c;
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto g = random_dag(rng, 50, 4);
    TraversalConfig cfg;
    cfg.f = 1 + rng() % 6;
    std::mt19937 orng(static_cast<unsigned>(i));
    ScriptedOracle oracle([&](const SelectQuery&) { return junk_answer(orng); },
                          [&](const SelectQuery&) { return junk_answer(orng); });
    const auto L = collect_context(g, cfg, oracle, "e");
    const auto b = global_filter(L, g, cfg, oracle, "e");
    const auto roots = g.roots();
    std::size_t extra = 0;
    for (const auto& id : b.final) {
      if (std::find(roots.begin(), roots.end(), id) == roots.end()) ++extra;
    }
    for (const auto& r : roots) {
      if (std::find(L.begin(), L.end(), r) != L.end()) {
        c.expect(std::find(b.final.begin(), b.final.end(), r) != b.final.end(), "root dropped");
      }
    }
    c.expect(extra <= cfg.f, "more than F kept");
  }

  const auto g = shaped_graph();
  c.expect(g.nodes().size() == 264 && g.roots().size() == 1, "shaped graph is not 264 nodes/1 root");
  TraversalConfig cfg;
  cfg.depth = 3;
  cfg.k = 3;
  cfg.f = 5;
  ScriptedOracle oracle([](const SelectQuery&) { return std::string("1, 2, 3"); },
                        [](const SelectQuery&) { return std::string("2, 5, 9, 14, 20, 27"); });
  const auto L = collect_context(g, cfg, oracle, "e");
  const auto b = global_filter(L, g, cfg, oracle, "e");
  c.expect(L.size() - 1 == 27, "selected " + std::to_string(L.size() - 1) + ", want 27");
  c.expect(b.final.size() - 1 == 5, "kept " + std::to_string(b.final.size() - 1) + ", want 5");
  std::cout << "  shaped graph: 264 nodes, " << L.size() - 1 << " selected, " << b.final.size() - 1
            << " after the filter\n";
  return c;
}

// ------------------------------------------------------------------ 4

std::string mark_entry(std::string fn, const CaseEntry& e, const std::string& tag) {
  fn.insert(e.span.end - 1, " /*" + tag + "*/");
  return fn;
}

Check transplant_identity() {
  Check c;
  GoAdapter adapter;
  std::mt19937 rng(4);
  std::size_t fixtures_seen = 0, cases_seen = 0;
  for (const auto& entry : fs::directory_iterator(fixtures() / "tables")) {
    if (entry.path().extension() != ".go") continue;
    const std::string text = slurp(entry.path());
    const std::string file = entry.path().filename().string();
    for (const auto& fn : adapter.parse_functions(text, file)) {
      if (fn.kind != FunctionKind::named || fn.name.rfind("Test", 0) != 0) continue;
      const auto table = find_case_table(fn.decl_text);
      c.expect(table.has_value(), file + ": no table");
      if (!table) continue;
      ++fixtures_seen;
      for (const auto& ce : table->entries) {
        ++cases_seen;
        const std::string tag = file + "/" + ce.name;
        const auto s = simplify_test(text, fn.name, ce.name);
        c.expect(s.simplified, tag + ": not simplified");
        try {
          c.expect(transplant(s.t_simp, s.t_simp, s.t_orig, ce.name) == s.t_orig, tag + ": identity broken");
        } catch (const std::exception& e) {
          c.expect(false, tag + ": identity: " + e.what());
          continue;
        }

        const std::string seed = "fix " + std::to_string(rng());
        const auto simp_table = find_case_table(s.t_simp);
        const auto target = simp_table->entries.at(match_case(*simp_table, ce.name));
        const auto fixed = mark_entry(s.t_simp, target, seed);
        std::string merged;
        try {
          merged = transplant(s.t_simp, fixed, s.t_orig, ce.name);
        } catch (const std::exception& e) {
          c.expect(false, tag + ": " + e.what() + "\n" + fixed);
          continue;
        }
        c.expect(merged == mark_entry(s.t_orig, ce, seed), tag + ": siblings changed");
        c.expect(merged.find(kRestoreMarker) == std::string::npos, tag + ": marker left");
      }
    }
  }
  c.expect(fixtures_seen >= 10, "only " + std::to_string(fixtures_seen) + " table tests");

  // Neutralized helpers must come back when a fix refers to them again, and
  // restoration must leave no markers.
  if (go_available()) {
    TempDir tmp("accept4");
    copy_tree(fixtures() / "tables", tmp.path());
    const std::string file = "grouped_helpers_test.go";
    const std::string text = slurp(tmp / file);
    const auto table = find_case_table(find_function(text, "TestGroupedHelpers")->decl_text);
    for (const auto& ce : table->entries) {
      const auto s = simplify_test(text, "TestGroupedHelpers", ce.name);
      spit(tmp / file, replace_function(text, "TestGroupedHelpers", s.t_simp));
      const auto neutral = neutralize_unused(adapter, tmp.path(), file);
      const auto t_simp = find_function(neutral.text, "TestGroupedHelpers")->decl_text;
      const auto merged = restore_neutralized(transplant(t_simp, t_simp, s.t_orig, ce.name));
      c.expect(merged == s.t_orig, "grouped_helpers/" + ce.name + ": identity broken after neutralization");
      c.expect(merged.find(kRestoreMarker) == std::string::npos, "marker left after restore");
      spit(tmp / file, text);
    }
  } else {
    c.expect(false, "go toolchain missing for the neutralization part");
  }
  std::cout << "  " << fixtures_seen << " table tests, " << cases_seen << " cases\n";
  return c;
}

// ------------------------------------------------------------------ 5

Check edit_oracle() {
  Check c;
  std::mt19937 rng(5);
  for (int round = 0; round < 1000; ++round) {
    const std::size_t len = rng() % 200;
    std::string text;
    for (std::size_t i = 0; i < len; ++i) text.push_back(static_cast<char>('a' + rng() % 26));
    // Cut points split the text into segments. Each segment is kept or
    // replaced; a kept segment may get an insert in front of it.
    std::set<std::size_t> cuts = {0, len};
    const std::size_t ncuts = rng() % 12;
    for (std::size_t i = 0; i < ncuts; ++i) cuts.insert(rng() % (len + 1));
    const std::vector<std::size_t> points(cuts.begin(), cuts.end());
    std::vector<Edit> edits;
    std::string expected;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const std::size_t a = points[i], b = points[i + 1];
      if (rng() % 2 == 0) {
        const std::string rep = rng() % 3 == 0 ? "" : "[" + std::to_string(rng() % 1000) + "]";
        edits.push_back({{a, b}, rep});
        expected += rep;
        continue;
      }
      if (rng() % 3 == 0) {
        const std::string ins = "<" + std::to_string(i) + ">";
        edits.push_back({{a, a}, ins});
        expected += ins;
      }
      expected += text.substr(a, b - a);
    }
    std::shuffle(edits.begin(), edits.end(), rng);
    try {
      const auto got = apply_edits(text, edits);
      c.expect(got == expected, "round " + std::to_string(round));
    } catch (const Error& e) {
      c.expect(false, "round " + std::to_string(round) + ": " + e.what());
    }
  }
  return c;
}

// ------------------------------------------------------------------ 6

Check log_round_trip() {
  Check c;
  std::mt19937 rng(6);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  auto word = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    return s;
  };
  auto endpoint = [&] {
    LogEndpoint e;
    e.file = word(1 + rng() % 6) + "/" + word(1 + rng() % 8) + (rng() % 2 ? "_test.go" : ".go");
    e.line = 1 + static_cast<std::uint32_t>(rng() % 100000);
    e.name = word(1 + rng() % 5);
    if (rng() % 3 == 0) e.name = word(3) + "." + e.name;
    if (rng() % 4 == 0) e.name += "$anon" + std::to_string(1 + rng() % 5);
    return e;
  };
  std::vector<RawEdge> edges;
  for (int i = 0; i < 1000; ++i) {
    RawEdge e{endpoint(), rng() % 5 == 0 ? LogEndpoint::sentinel() : endpoint()};
    const auto parsed = parse_log_text(render_record(e) + "\n");
    c.expect(parsed.edges.size() == 1 && parsed.edges[0] == e, "edge " + std::to_string(i));
    edges.push_back(e);
  }

  // Duplicate lines must not change the graph.
  std::vector<SubjectFunction> pool;
  for (std::size_t i = 0; i < 40; ++i) pool.push_back(synthetic_fn(i));
  FunctionIndex index;
  for (const auto& f : pool) index.add(f);
  auto ep = [&](std::size_t i) { return LogEndpoint{pool[i].file, pool[i].decl_line, pool[i].name}; };
  for (int round = 0; round < 50; ++round) {
    std::vector<RawEdge> log;
    for (int i = 0; i < 60; ++i) {
      log.push_back({ep(rng() % pool.size()), rng() % 6 == 0 ? LogEndpoint::sentinel() : ep(rng() % pool.size())});
    }
    // A repeated call logs a line seen before, anywhere later in the log.
    std::vector<RawEdge> doubled;
    for (std::size_t i = 0; i < log.size(); ++i) {
      doubled.push_back(log[i]);
      const auto copies = rng() % 3;
      for (std::size_t k = 0; k < copies; ++k) doubled.push_back(log[rng() % (i + 1)]);
    }
    std::string text;
    for (const auto& e : doubled) text += render_record(e) + "\n";
    const auto g1 = build_graph(log, index, "F0");
    const auto g2 = build_graph(parse_log_text(text).edges, index, "F0");
    c.expect(g1.edges() == g2.edges() && g1.nodes().size() == g2.nodes().size() &&
                 g1.roots() == g2.roots() && g1.root_entries() == g2.root_entries() &&
                 g1.appearance() == g2.appearance() && graph_stats(g1) == graph_stats(g2),
             "duplicates changed the graph in round " + std::to_string(round));
  }
  return c;
}

// ------------------------------------------------------------------ 7

Check live_graph() {
  Check c;
  if (!go_available()) {
    c.expect(false, "go toolchain missing");
    return c;
  }
  const auto start = Clock::now();
  TempDir work("accept7");
  GoAdapter adapter;
  ScriptedBackend none({});
  Gateway gateway(none);
  const auto extractor = FailureExtractor::shipped();
  SteadyClock clock;
  PipelineConfig cfg;
  cfg.race = false;
  Pipeline pipeline(adapter, gateway, extractor, cfg, fixtures() / "async_chain", work.path(), clock);
  const auto trace = pipeline.trace_failure(parse_ticket("./backend/TestAddProgram/valid_program"),
                                            RunScope::case_scope);

  // Expected by reading the fixture: the test, its subtest literal, the
  // handler and controller chain, the validator and the mock.
  const NodeId test{"backend/backend_test.go", 36}, sub{"backend/backend_test.go", 45},
      ctor{"controller/controller.go", 21}, hctor{"backend/backend.go", 13},
      handler{"backend/backend.go", 17}, add{"controller/controller.go", 27},
      validate{"controller/validator.go", 11}, update{"backend/backend_test.go", 18},
      check{"backend/backend_test.go", 25};
  const std::set<NodeId> want_nodes = {test, sub, ctor, hctor, handler, add, validate, update, check};
  const std::set<std::tuple<NodeId, NodeId, EdgeKind>> want_edges = {
      {sub, ctor, EdgeKind::runtime},        {sub, hctor, EdgeKind::runtime},
      {sub, handler, EdgeKind::runtime},     {handler, add, EdgeKind::runtime},
      {add, validate, EdgeKind::runtime},    {sub, check, EdgeKind::runtime},
      {validate, update, EdgeKind::async_inferred}};
  std::set<NodeId> got_nodes;
  for (const auto& [id, fn] : trace.graph.nodes()) got_nodes.insert(id);
  std::set<std::tuple<NodeId, NodeId, EdgeKind>> got_edges;
  std::size_t async = 0;
  for (const auto& e : trace.graph.edges()) {
    got_edges.insert({e.caller, e.callee, e.kind});
    if (e.kind == EdgeKind::async_inferred) ++async;
  }
  c.expect(got_nodes == want_nodes, "node set differs");
  c.expect(got_edges == want_edges, "edge set differs");
  c.expect(async == 1, std::to_string(async) + " async edges");
  c.expect(trace.stats.max_depth == 4, "depth " + std::to_string(trace.stats.max_depth));
  const double s = since(start);
  c.expect(s < kLiveGraphBudgetS, "took " + std::to_string(s) + " s");
  std::cout << "  live graph: " << trace.stats.node_count << " nodes, " << trace.stats.edge_count
            << " edges, depth " << trace.stats.max_depth << ", " << trace.runs_used << " traced runs, "
            << s << " s\n";
  return c;
}

// ------------------------------------------------------------------ 8, 10

ProcessResult run_cli_binary(const std::vector<std::string>& args) {
  std::vector<std::string> argv = {cli_path().string()};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_process(argv, fs::current_path(), {}, kReplayBudgetS);
}

std::vector<std::string> tickets() {
  std::vector<std::string> out;
  std::istringstream in(slurp(fixtures() / "flaky5_transcripts/tickets.txt"));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::map<std::string, std::string> artifacts(const fs::path& out) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    // Failure counts vary from run to run.
    if (e.path().filename() == "reproduction.json") continue;
    files[fs::relative(e.path(), out).string()] = slurp(e.path());
  }
  return files;
}

ProcessResult suite(const fs::path& out, const std::string& transcript, bool simplify) {
  std::vector<std::string> args = {"fix", "--workspace", (fixtures() / "flaky5").string(), "--runs",
                                   std::to_string(kReplayRuns), "--backend", "replay", "--transcript",
                                   (fixtures() / "flaky5_transcripts" / transcript).string(), "--out",
                                   out.string(), "--tickets",
                                   (fixtures() / "flaky5_transcripts/tickets.txt").string()};
  if (!simplify) args.push_back("--no-simplify");
  return run_cli_binary(args);
}

Check replay_pipeline() {
  Check c;
  if (!go_available()) {
    c.expect(false, "go toolchain missing");
    return c;
  }
  const auto start = Clock::now();
  TempDir tmp("accept8");
  const auto r1 = suite(tmp / "run1", "simplified.jsonl", true);
  const auto r2 = suite(tmp / "run2", "simplified.jsonl", true);
  std::cout << r1.out;
  c.expect(r1.exit_code >= 0 && r1.exit_code <= 3, "first run exit " + std::to_string(r1.exit_code) + ": " + r1.err);
  c.expect(r2.exit_code >= 0 && r2.exit_code <= 3, "second run exit " + std::to_string(r2.exit_code));
  c.expect(artifacts(tmp / "run1") == artifacts(tmp / "run2"), "artifacts differ between runs");

  GoAdapter adapter;
  std::size_t fixed = 0;
  for (const auto& raw : tickets()) {
    const auto test = parse_ticket(raw);
    const fs::path dir = tmp / "run1" / ticket_slug(test);
    if (!fs::exists(dir / "fix.diff")) continue;
    ++fixed;
    const fs::path fresh = tmp / ("check-" + ticket_slug(test));
    copy_tree(fixtures() / "flaky5", fresh);
    const auto applied = run_process({"git", "apply", (dir / "fix.diff").string()}, fresh, {}, 60.0);
    c.expect(applied.exit_code == 0, raw + ": diff does not apply: " + applied.err);
    const auto repro = json::parse(slurp(dir / "reproduction.json"));
    RunRequest req;
    req.selector = test;
    req.scope = parse_scope(repro.at("scope_used").get<std::string>());
    req.runs = kReplayRuns;
    const auto outcomes = adapter.run_test(fresh, req);
    const auto passed = std::count_if(outcomes.begin(), outcomes.end(),
                                      [](const RunOutcome& o) { return o.verdict == Verdict::pass; });
    std::cout << "  " << raw << ": fixed, " << passed << "/" << kReplayRuns << " reruns pass\n";
    c.expect(static_cast<std::size_t>(passed) == kReplayRuns && outcomes.size() == kReplayRuns,
             raw + ": " + std::to_string(passed) + " of " + std::to_string(kReplayRuns) + " reruns passed");
  }
  c.expect(fixed >= kMinFixed, "fixed " + std::to_string(fixed) + " of 5");
  const double s = since(start);
  c.expect(s < kReplayBudgetS, "took " + std::to_string(s) + " s");
  std::cout << "  fixed " << fixed << "/5 in " << s << " s\n";
  return c;
}

Check ablation_parity() {
  Check c;
  if (!go_available()) {
    c.expect(false, "go toolchain missing");
    return c;
  }
  TempDir tmp("accept10");
  const auto r = suite(tmp / "out", "unsimplified.jsonl", false);
  std::cout << r.out;
  c.expect(r.exit_code >= 0 && r.exit_code <= 3, "exit " + std::to_string(r.exit_code) + ": " + r.err);
  for (const auto& raw : tickets()) {
    const fs::path report = tmp / "out" / ticket_slug(parse_ticket(raw)) / "report.md";
    const std::string text = slurp(report);
    c.expect(text.find("Status: **") != std::string::npos, raw + ": no report");
    c.expect(text.find("not simplified") != std::string::npos, raw + ": simplification not disabled");
  }
  return c;
}

// ------------------------------------------------------------------ 9

struct FakeRun {
  TempDir ws{"accept9ws"};
  TempDir work{"accept9work"};
  FakeClock clock;
  FakeGoAdapter adapter;
  std::unique_ptr<ScriptedBackend> backend;
  std::unique_ptr<Gateway> gateway;
  FailureExtractor extractor = FailureExtractor::shipped();
  PipelineConfig cfg;

  FakeRun() {
    copy_tree(fixtures() / "async_chain", ws.path());
    adapter.test_file = "backend/backend_test.go";
    adapter.passing_marker = "never present";
    adapter.failure_output = kAsyncChainFailure;
    adapter.trace_log = async_chain_trace();
    adapter.clock = &clock;
    const auto s = simplify_test(slurp(ws / "backend/backend_test.go"), "TestAddProgram", "valid program");
    std::string bad = s.t_simp;
    bad.insert(bad.find("{\n") + 2, "\t_ = 0\n");
    backend = std::make_unique<ScriptedBackend>(std::vector<ScriptRule>{
        {Purpose::select, {}, {"1, 2, 3"}},
        {Purpose::filter, {}, {"1, 2, 3, 4, 5"}},
        {Purpose::thought, {}, {"CATEGORY: schedule randomness\nEXPLANATION: e\nPLAN: p\n"}},
        {Purpose::fix, {}, {"```go\n" + bad + "\n```\n"}}});
    gateway = std::make_unique<Gateway>(*backend);
    cfg.runs = 10;
    cfg.race = false;
  }
  FixOutcome run() {
    Pipeline p(adapter, *gateway, extractor, cfg, ws.path(), work.path(), clock);
    return p.fix({"./backend", "TestAddProgram", "valid program"});
  }
};

Check attempt_discipline() {
  Check c;
  {
    FakeRun f;
    const auto ws_hash = tree_hash(f.ws.path());
    const auto o = f.run();
    c.expect(o.status == FixStatus::exhausted, "status " + std::string(to_string(o.status)));
    c.expect(o.fix_attempts() <= kMaxAttempts, std::to_string(o.fix_attempts()) + " attempts");
    c.expect(o.fix_attempts() == f.cfg.m * f.cfg.p * f.cfg.n, "budget not used up");
    for (const auto& a : o.attempts) {
      c.expect(a.stage == "fix" && a.reverted && a.revert_verified, "attempt without verified revert");
    }
    c.expect(tree_hash(f.ws.path()) == ws_hash, "workspace modified");
    std::cout << "  all-bad: " << o.fix_attempts() << " attempts\n";
  }
  {
    FakeRun f;
    f.cfg.time_limit_s = 10;
    f.adapter.seconds_per_batch = 4;
    const auto o = f.run();
    c.expect(o.status == FixStatus::timed_out, "status " + std::string(to_string(o.status)));
    c.expect(o.fix_attempts() <= 1, std::to_string(o.fix_attempts()) + " attempts before the limit");
    std::cout << "  time limit: " << to_string(o.status) << " after " << o.fix_attempts() << " attempt(s)\n";
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Check()>>> checks = {
      {"1", traversal_oracle},     {"2", depth_and_cardinality}, {"3", global_filter_shape},
      {"4", transplant_identity},  {"5", edit_oracle},           {"6", log_round_trip},
      {"7", live_graph},           {"8", replay_pipeline},       {"9", attempt_discipline},
      {"10", ablation_parity}};
  // Junk oracles trigger a fallback warning per node.
  spdlog::set_level(spdlog::level::err);
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) only.insert(argv[i]);
  int failed = 0;
  for (const auto& [id, fn] : checks) {
    if (!only.empty() && !only.count(id)) continue;
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.why.push_back(std::string("exception: ") + e.what());
    }
    for (const auto& w : c.why) std::cout << "  " << w << "\n";
    std::cout << "ACCEPTANCE " << id << " " << (c.ok ? "PASS" : "FAIL") << std::endl;
    if (!c.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
