#include "flakyfix/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/instrumenter.hpp"
#include "flakyfix/reproducer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flakyfix {
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

template <typename T>
T get_as(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::size_t get_count(const json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

BackendKind parse_backend(const std::string& text) {
  if (text == "replay") return BackendKind::replay;
  if (text == "http") return BackendKind::http;
  if (text == "scripted") return BackendKind::scripted;
  throw ConfigError("backend", "unknown backend " + text);
}

Strategy strategy_of(const std::string& text) {
  try {
    return parse_strategy(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("strategy", e.what());
  }
}

std::vector<TestId> read_tickets(const std::vector<std::string>& args, const std::string& file) {
  std::vector<std::string> raw = args;
  if (!file.empty()) {
    std::ifstream in_file;
    std::istream* in = &std::cin;
    if (file != "-") {
      in_file.open(file);
      if (!in_file) throw ConfigError("tickets", "cannot open " + file);
      in = &in_file;
    }
    std::string line;
    while (std::getline(*in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (!line.empty() && line[0] != '#') raw.push_back(line);
    }
  }
  if (raw.empty()) throw ConfigError("tickets", "no ticket given");
  std::vector<TestId> tickets;
  for (const auto& r : raw) tickets.push_back(parse_ticket(r));
  return tickets;
}

class BackendStack {
 public:
  // Without `required`, a missing replay transcript leaves a backend that
  // answers nothing; reproduce and graph only use the model as a fallback.
  BackendStack(const Settings& s, bool required) {
    switch (s.backend) {
      case BackendKind::replay:
        if (s.transcript.empty() && !required) {
          base_ = std::make_unique<ScriptedBackend>(std::vector<ScriptRule>{});
          has_model_ = false;
          break;
        }
        if (s.transcript.empty()) throw ConfigError("transcript", "replay needs --transcript");
        base_ = std::make_unique<ReplayBackend>(Transcript::load(s.transcript));
        break;
      case BackendKind::http:
        base_ = std::make_unique<HttpBackend>(s.http);
        break;
      case BackendKind::scripted:
        if (s.transcript.empty()) throw ConfigError("transcript", "scripted needs a rules file");
        base_ = std::make_unique<ScriptedBackend>(ScriptedBackend::from_json_file(s.transcript));
        break;
    }
    LlmBackend* top = base_.get();
    if (!s.record_to.empty()) {
      recorder_ = std::make_unique<RecordingBackend>(*top, s.record_to);
      top = recorder_.get();
    }
    gateway_ = std::make_unique<Gateway>(*top);
  }
  Gateway& gateway() { return *gateway_; }
  bool has_model() const { return has_model_; }

 private:
  std::unique_ptr<LlmBackend> base_;
  std::unique_ptr<RecordingBackend> recorder_;
  std::unique_ptr<Gateway> gateway_;
  bool has_model_ = true;
};

enum class Command { reproduce, graph, fix };

std::string stats_line(const GraphStats& s) {
  return "nodes=" + std::to_string(s.node_count) + " edges=" + std::to_string(s.edge_count) +
         " depth=" + std::to_string(s.max_depth);
}

int run_ticket(Command cmd, const Settings& s, const TestId& test, BackendStack& backends,
               const FailureExtractor& extractor) {
  GoAdapter adapter(s.go);
  SteadyClock clock;
  const fs::path dir = s.out / ticket_slug(test);
  const fs::path work = dir / "work";
  fs::create_directories(dir);
  for (const char* name : {"fix.diff", "report.md", "attempts.jsonl", "graph.dot", "graph.json",
                           "reproduction.json"}) {
    fs::remove(dir / name);
  }
  const fs::path workspace = fs::absolute(s.workspace);
  int code = kExitOk;

  if (cmd == Command::fix) {
    Pipeline pipeline(adapter, backends.gateway(), extractor, s.pipeline, workspace, work, clock);
    const FixOutcome outcome = pipeline.fix(test);
    if (outcome.reproduction) write_file(dir / "reproduction.json", to_json(*outcome.reproduction));
    if (!outcome.dot.empty()) write_file(dir / "graph.dot", outcome.dot);
    if (outcome.status == FixStatus::fixed) write_file(dir / "fix.diff", outcome.diff);
    write_file(dir / "report.md", render_report(outcome));
    write_file(dir / "attempts.jsonl", render_attempts(outcome));
    std::cout << test.render() << ": " << to_string(outcome.status) << "\n";
    switch (outcome.status) {
      case FixStatus::fixed: code = kExitOk; break;
      case FixStatus::not_reproduced: code = kExitNotReproduced; break;
      case FixStatus::exhausted:
      case FixStatus::timed_out: code = kExitNotFixed; break;
    }
  } else {
    Reproducer reproducer(adapter, workspace, extractor,
                          backends.has_model() ? &backends.gateway() : nullptr);
    RunRequest base;
    base.runs = s.pipeline.runs;
    base.race = s.pipeline.race;
    base.timeout_s = s.pipeline.run_timeout_s;
    const auto report = reproducer.reproduce(test, base);
    write_file(dir / "reproduction.json", to_json(report));
    if (!report.reproduced) {
      std::cout << test.render() << ": not reproduced\n";
      code = kExitNotReproduced;
    } else if (cmd == Command::reproduce) {
      std::cout << test.render() << ": reproduced in " << to_string(report.scope_used) << " scope, "
                << report.failures.size() << "/" << report.attempted_runs << " runs failed\n";
    } else {
      Pipeline pipeline(adapter, backends.gateway(), extractor, s.pipeline, workspace, work, clock);
      const auto trace = pipeline.trace_failure(test, report.scope_used);
      write_file(dir / "graph.dot", to_dot(trace.graph));
      const json stats = {{"nodes", trace.stats.node_count},
                          {"edges", trace.stats.edge_count},
                          {"max_depth", trace.stats.max_depth},
                          {"async_edges", trace.async.added.size()},
                          {"traced_runs", trace.runs_used}};
      write_file(dir / "graph.json", stats.dump(2) + "\n");
      std::cout << test.render() << ": " << stats_line(trace.stats) << "\n";
    }
  }
  if (!s.keep_work) {
    std::error_code ec;
    fs::remove_all(work, ec);
  }
  return code;
}

}  // namespace

void apply_config_json(Settings& s, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "expected an object");
  auto& p = s.pipeline;
  for (const auto& [key, value] : doc.items()) {
    if (key == "m") p.m = get_count(doc, key);
    else if (key == "p") p.p = get_count(doc, key);
    else if (key == "n") p.n = get_count(doc, key);
    else if (key == "k") p.traversal.k = get_count(doc, key);
    else if (key == "f") p.traversal.f = get_count(doc, key);
    else if (key == "depth") {
      if (value.is_null()) p.traversal.depth.reset();
      else p.traversal.depth = get_count(doc, key);
    }
    else if (key == "runs") p.runs = get_count(doc, key);
    else if (key == "repair_rounds") p.repair_rounds = get_count(doc, key);
    else if (key == "time_limit") p.time_limit_s = get_as<double>(doc, key);
    else if (key == "run_timeout") p.run_timeout_s = get_as<double>(doc, key);
    else if (key == "race") p.race = get_as<bool>(doc, key);
    else if (key == "simplify") p.simplify = get_as<bool>(doc, key);
    else if (key == "strategy") p.traversal.strategy = strategy_of(get_as<std::string>(doc, key));
    else if (key == "backend") s.backend = parse_backend(get_as<std::string>(doc, key));
    else if (key == "transcript") s.transcript = get_as<std::string>(doc, key);
    else if (key == "workspace") s.workspace = get_as<std::string>(doc, key);
    else if (key == "out") s.out = get_as<std::string>(doc, key);
    else if (key == "http") {
      if (!value.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [hk, hv] : value.items()) {
        const std::string full = "http." + hk;
        if (hk == "base_url") s.http.base_url = get_as<std::string>(value, hk);
        else if (hk == "model") s.http.model = get_as<std::string>(value, hk);
        else if (hk == "api_key_env") s.http.api_key_env = get_as<std::string>(value, hk);
        else if (hk == "max_retries") s.http.max_retries = static_cast<int>(get_count(value, hk));
        else throw ConfigError(full, "unknown key");
      }
    } else if (key == "go") {
      if (!value.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "binary") s.go.go = get_as<std::string>(value, gk);
        else if (gk == "runner_template") s.go.runner_template = get_as<std::string>(value, gk);
        else if (gk == "race_flag") s.go.race_flag = get_as<std::string>(value, gk);
        else throw ConfigError("go." + gk, "unknown key");
      }
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
}

void validate(const Settings& s) {
  const auto& p = s.pipeline;
  if (p.m < 1) throw ConfigError("m", "must be at least 1");
  if (p.p < 1) throw ConfigError("p", "must be at least 1");
  if (p.n < 1) throw ConfigError("n", "must be at least 1");
  if (p.runs < 1) throw ConfigError("runs", "must be at least 1");
  if (p.traversal.k < 1) throw ConfigError("k", "must be at least 1");
  if (!(p.time_limit_s > 0)) throw ConfigError("time_limit", "must be positive");
  if (!(p.run_timeout_s > 0)) throw ConfigError("run_timeout", "must be positive");
  if (!fs::is_directory(s.workspace)) {
    throw ConfigError("workspace", "not a directory: " + s.workspace.string());
  }
}

std::string ticket_slug(const TestId& test) {
  std::string slug;
  for (char c : test.render()) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    slug += keep ? c : '_';
  }
  while (!slug.empty() && slug.front() == '.') slug.erase(slug.begin());
  return slug.empty() ? "ticket" : slug;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Repairs flaky Go tests"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  std::string record_path;
  std::string workspace, out, strategy, backend, transcript, tickets_file;
  std::size_t runs = 0, m = 0, p = 0, n = 0, k = 0, f = 0, depth = 0, repair_rounds = 0;
  double time_limit = 0, run_timeout = 0;
  bool race = true, no_simplify = false, record = false, keep_work = false, verbose = false;
  std::vector<std::string> ticket_args;

  app.add_option("--config", config_file, "JSON config file");
  auto* o_ws = app.add_option("--workspace", workspace, "subject workspace root");
  auto* o_out = app.add_option("--out", out, "artifact directory");
  auto* o_runs = app.add_option("--runs", runs, "reruns for reproduction and validation");
  auto* o_time = app.add_option("--time-limit", time_limit, "seconds per ticket");
  auto* o_m = app.add_option("--m", m, "context attempts");
  auto* o_p = app.add_option("--p", p, "thoughts per context");
  auto* o_n = app.add_option("--n", n, "fixes per thought");
  auto* o_k = app.add_option("--k", k, "children selected per node");
  auto* o_f = app.add_option("--f", f, "functions kept by the global filter");
  auto* o_depth = app.add_option("--depth", depth, "traversal depth bound");
  auto* o_repair = app.add_option("--repair-rounds", repair_rounds, "compile repairs per fix");
  auto* o_rto = app.add_option("--run-timeout", run_timeout, "seconds per test run");
  auto* o_strategy = app.add_option("--strategy", strategy, "guided or bfs-all");
  auto* o_backend = app.add_option("--backend", backend, "replay, http or scripted");
  auto* o_transcript = app.add_option("--transcript", transcript, "transcript or rules file");
  app.add_flag("--record", record, "append every exchange to the transcript");
  app.add_option("--record-to", record_path, "with the scripted backend: where to record");
  auto* o_race = app.add_flag("--race,!--no-race", race, "race detector");
  app.add_flag("--no-simplify", no_simplify, "repair the full table-driven test");
  app.add_flag("--keep-work", keep_work, "keep the scratch copies");
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_option("--tickets", tickets_file, "file with one ticket per line, - for stdin");

  Command cmd = Command::fix;
  for (auto [name, value, help] : {std::tuple{"reproduce", Command::reproduce, "rerun a ticket"},
                                   std::tuple{"graph", Command::graph, "dump the failing call graph"},
                                   std::tuple{"fix", Command::fix, "run the repair pipeline"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("ticket", ticket_args, "target/func/case");
    sub->callback([&cmd, value = value] { cmd = value; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  auto logger = spdlog::stderr_color_mt("flakyfix");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  Settings s;
  std::vector<TestId> tickets;
  try {
    if (!config_file.empty()) apply_config_json(s, read_file(config_file));
    auto& pc = s.pipeline;
    if (o_ws->count()) s.workspace = workspace;
    if (o_out->count()) s.out = out;
    if (o_runs->count()) pc.runs = runs;
    if (o_time->count()) pc.time_limit_s = time_limit;
    if (o_m->count()) pc.m = m;
    if (o_p->count()) pc.p = p;
    if (o_n->count()) pc.n = n;
    if (o_k->count()) pc.traversal.k = k;
    if (o_f->count()) pc.traversal.f = f;
    if (o_depth->count()) pc.traversal.depth = depth;
    if (o_repair->count()) pc.repair_rounds = repair_rounds;
    if (o_rto->count()) pc.run_timeout_s = run_timeout;
    if (o_strategy->count()) pc.traversal.strategy = strategy_of(strategy);
    if (o_backend->count()) s.backend = parse_backend(backend);
    if (o_transcript->count()) s.transcript = transcript;
    if (o_race->count()) pc.race = race;
    if (no_simplify) pc.simplify = false;
    s.keep_work = keep_work;
    if (record) {
      if (s.backend == BackendKind::replay) throw ConfigError("record", "replay cannot record");
      // The scripted backend reads its rules from --transcript.
      s.record_to = s.backend == BackendKind::scripted ? record_path : s.transcript;
      if (s.record_to.empty()) throw ConfigError("record", "no file to record to");
    }
    validate(s);
    tickets = read_tickets(ticket_args, tickets_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MalformedTicket& e) {
    std::cerr << "malformed ticket: " << e.what() << "\n";
    return kExitConfig;
  }

  int worst = kExitOk;
  try {
    BackendStack backends(s, cmd == Command::fix);
    const FailureExtractor extractor = FailureExtractor::shipped();
    for (const auto& t : tickets) {
      int code = kExitOk;
      try {
        code = run_ticket(cmd, s, t, backends, extractor);
      } catch (const InstrumentationFailed& e) {
        std::cerr << t.render() << ": instrumentation failed: " << e.what() << "\n";
        code = kExitInstrumentation;
      } catch (const ToolchainCrashed& e) {
        std::cerr << t.render() << ": workspace does not build: " << e.what() << "\n";
        code = kExitInstrumentation;
      } catch (const SelectorNotFound& e) {
        std::cerr << t.render() << ": " << e.what() << "\n";
        code = kExitConfig;
      } catch (const ReplayMiss& e) {
        std::cerr << t.render() << ": transcript has no answer: " << e.what() << "\n";
        code = kExitConfig;
      }
      worst = std::max(worst, code);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return worst;
}

}  // namespace flakyfix
