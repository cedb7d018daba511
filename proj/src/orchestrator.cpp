#include "flakyfix/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"
#include "flakyfix/instrumenter.hpp"
#include "flakyfix/transplanter.hpp"
#include "flakyfix/unified_diff.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flakyfix {

std::string_view to_string(FixStatus status) {
  switch (status) {
    case FixStatus::fixed: return "fixed";
    case FixStatus::not_reproduced: return "not-reproduced";
    case FixStatus::exhausted: return "exhausted";
    case FixStatus::timed_out: return "timed-out";
  }
  return "unknown";
}

std::string_view to_string(ValidationVerdict verdict) {
  switch (verdict) {
    case ValidationVerdict::accepted: return "accepted";
    case ValidationVerdict::compile_failed: return "compile-failed";
    case ValidationVerdict::test_failed: return "test-failed";
    case ValidationVerdict::timeout: return "timeout";
  }
  return "unknown";
}

std::size_t FixOutcome::fix_attempts() const {
  return static_cast<std::size_t>(
      std::count_if(attempts.begin(), attempts.end(), [](const auto& a) { return a.stage == "fix"; }));
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

std::string describe(const std::vector<CompileDiagnostic>& diags) {
  std::string out;
  for (std::size_t i = 0; i < diags.size() && i < 3; ++i) {
    if (!out.empty()) out += "; ";
    out += diags[i].file + ":" + std::to_string(diags[i].line) + ": " + diags[i].message;
  }
  return out;
}

// Standard packages a fix commonly reaches for, by the name used in code.
const std::map<std::string, std::string>& known_packages() {
  static const std::map<std::string, std::string> table = {
      {"atomic", "sync/atomic"}, {"bytes", "bytes"},     {"context", "context"},
      {"errors", "errors"},      {"filepath", "path/filepath"}, {"fmt", "fmt"},
      {"io", "io"},              {"json", "encoding/json"}, {"maps", "maps"},
      {"math", "math"},          {"os", "os"},           {"rand", "math/rand"},
      {"reflect", "reflect"},    {"regexp", "regexp"},   {"slices", "slices"},
      {"sort", "sort"},          {"strconv", "strconv"}, {"strings", "strings"},
      {"sync", "sync"},          {"testing", "testing"}, {"time", "time"}};
  return table;
}

// Run-test calls that respect the pipeline's wall-clock budget.
class TimedAdapter : public SubjectAdapter {
 public:
  TimedAdapter(SubjectAdapter& inner, std::function<void()> check)
      : inner_(inner), check_(std::move(check)) {}
  std::vector<SubjectFunction> parse_functions(std::string_view text,
                                               const std::string& path) const override {
    return inner_.parse_functions(text, path);
  }
  std::vector<AsyncLaunchSite> find_async_launches(const SubjectFunction& fn) const override {
    return inner_.find_async_launches(fn);
  }
  std::vector<CompileDiagnostic> compile(const fs::path& ws) override { return inner_.compile(ws); }
  std::vector<RunOutcome> run_test(const fs::path& ws, const RunRequest& r) override {
    check_();
    return inner_.run_test(ws, r);
  }
  std::vector<std::string> source_files(const fs::path& ws) const override {
    return inner_.source_files(ws);
  }
  bool is_test_file(std::string_view path) const override { return inner_.is_test_file(path); }
  std::string package_dir(const TestId& t) const override { return inner_.package_dir(t); }

 private:
  SubjectAdapter& inner_;
  std::function<void()> check_;
};

class TimedOracle : public SelectionOracle {
 public:
  TimedOracle(SelectionOracle& inner, std::function<void()> check)
      : inner_(inner), check_(std::move(check)) {}
  std::string select(const SelectQuery& q) override {
    check_();
    return inner_.select(q);
  }
  std::string filter(const SelectQuery& q) override {
    check_();
    return inner_.filter(q);
  }

 private:
  SelectionOracle& inner_;
  std::function<void()> check_;
};

class SafeLlmOracle : public LlmSelectionOracle {
 public:
  using LlmSelectionOracle::LlmSelectionOracle;
  std::string select(const SelectQuery& q) override {
    try {
      return LlmSelectionOracle::select(q);
    } catch (const HttpError& e) {
      throw OracleFailure(e.what());
    }
  }
  std::string filter(const SelectQuery& q) override {
    try {
      return LlmSelectionOracle::filter(q);
    } catch (const HttpError& e) {
      throw OracleFailure(e.what());
    }
  }
};

struct Restorer {
  fs::path file;
  std::string text;
};

}  // namespace

std::string tree_hash(const fs::path& root) {
  std::vector<std::string> files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_directory() && it->path().filename() == ".git") {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file()) files.push_back(it->path().lexically_relative(root).generic_string());
  }
  std::sort(files.begin(), files.end());
  std::string manifest;
  for (const auto& f : files) manifest += f + "\n" + sha256_hex(read_file(root / f)) + "\n";
  return sha256_hex(manifest);
}

bool add_missing_imports(std::string& file_text, const std::vector<CompileDiagnostic>& diags) {
  static const std::regex undefined_re(R"(^undefined: ([A-Za-z_]\w*)$)");
  std::set<std::string> wanted;
  for (const auto& d : diags) {
    std::smatch m;
    if (std::regex_match(d.message, m, undefined_re)) {
      if (auto it = known_packages().find(m[1].str()); it != known_packages().end()) {
        wanted.insert(it->second);
      }
    }
  }
  if (wanted.empty()) return false;
  auto tree = go::SyntaxTree::parse(file_text);
  std::set<std::string> present;
  TSNode first_list{};
  TSNode package_clause{};
  TSNode last_import{};
  for (TSNode child : go::named_children(tree.root())) {
    if (go::is_type(child, "package_clause")) package_clause = child;
    if (!go::is_type(child, "import_declaration")) continue;
    last_import = child;
    go::walk(child, [&](TSNode n) {
      if (go::is_type(n, "import_spec_list") && ts_node_is_null(first_list)) first_list = n;
      if (go::is_type(n, "import_spec")) {
        if (auto p = go::string_literal_value(tree, go::field(n, "path"))) present.insert(*p);
        return false;
      }
      return true;
    });
  }
  std::vector<std::string> missing;
  for (const auto& w : wanted) {
    if (present.count(w) == 0) missing.push_back(w);
  }
  if (missing.empty() || ts_node_is_null(package_clause)) return false;

  if (!ts_node_is_null(first_list)) {
    // Keep the first group sorted.
    for (const auto& path : missing) {
      auto list = go::SyntaxTree::parse(file_text);
      TSNode group{};
      go::walk(list.root(), [&](TSNode n) {
        if (!ts_node_is_null(group)) return false;
        if (go::is_type(n, "import_spec_list")) {
          group = n;
          return false;
        }
        return true;
      });
      std::size_t at = ts_node_start_byte(group) + 1;
      while (at < file_text.size() && file_text[at] != '\n') ++at;
      ++at;
      for (TSNode spec : go::named_children(group)) {
        if (!go::is_type(spec, "import_spec")) continue;
        const auto p = go::string_literal_value(list, go::field(spec, "path"));
        if (p && *p > path) break;
        std::size_t end = ts_node_end_byte(spec);
        while (end < file_text.size() && file_text[end] != '\n') ++end;
        const std::size_t next = end + 1;
        // A blank line ends the first group.
        if (next < file_text.size() && file_text[next] == '\n') {
          at = next;
          break;
        }
        at = next;
      }
      file_text.insert(at, "\t\"" + path + "\"\n");
    }
    return true;
  }
  std::size_t at = ts_node_is_null(last_import) ? ts_node_end_byte(package_clause)
                                                : ts_node_end_byte(last_import);
  while (at < file_text.size() && file_text[at] != '\n') ++at;
  std::string lines;
  for (const auto& path : missing) lines += "\nimport \"" + path + "\"";
  if (ts_node_is_null(last_import)) lines = "\n" + lines;
  file_text.insert(at, lines);
  return true;
}

std::string replace_function(std::string_view file_text, const std::string& func,
                             std::string_view replacement) {
  const auto fn = find_function(file_text, func);
  if (!fn) throw CaseNotFound("no function " + func);
  std::string out(file_text);
  out.replace(fn->decl_span.start, fn->decl_span.size(), replacement);
  return out;
}

Pipeline::Pipeline(SubjectAdapter& adapter, Gateway& gateway, const FailureExtractor& extractor,
                   PipelineConfig cfg, fs::path workspace, fs::path work_dir, Clock& clock)
    : adapter_(adapter),
      gateway_(gateway),
      extractor_(extractor),
      cfg_(std::move(cfg)),
      workspace_(std::move(workspace)),
      work_dir_(std::move(work_dir)),
      clock_(clock) {}

void Pipeline::check_time() const {
  if (clock_.now_s() - started_ >= cfg_.time_limit_s) {
    throw TimeLimitReached("time limit of " + std::to_string(cfg_.time_limit_s) + " s reached");
  }
}

std::vector<CompileDiagnostic> Pipeline::compile_fixing_imports(const fs::path& ws,
                                                                const std::string& file) {
  auto diags = adapter_.compile(ws);
  for (int round = 0; round < 3 && !diags.empty(); ++round) {
    std::string text = read_file(ws / file);
    if (!add_missing_imports(text, diags)) break;
    write_file(ws / file, text);
    diags = adapter_.compile(ws);
  }
  return diags;
}

TraceResult Pipeline::trace_failure(const TestId& test, RunScope scope) {
  TimedAdapter timed(adapter_, [this] { check_time(); });
  const fs::path traces = work_dir_ / "traces";
  std::error_code ec;
  fs::remove_all(traces, ec);
  fs::create_directories(traces);
  const auto shadow = instrument_workspace(adapter_, workspace_, all_packages(adapter_, workspace_),
                                           work_dir_ / "shadow", traces / "default.log");
  if (const auto diags = adapter_.compile(shadow.shadow); !diags.empty()) {
    throw InstrumentationFailed("instrumented workspace does not build: " + describe(diags));
  }
  const std::size_t budget = std::max<std::size_t>(cfg_.runs, 1);
  for (std::size_t i = 0; i < budget; ++i) {
    const fs::path log = traces / ("run-" + std::to_string(i) + ".log");
    RunRequest req;
    req.selector = test;
    req.scope = scope;
    req.runs = 1;
    req.race = cfg_.race;
    req.timeout_s = cfg_.run_timeout_s;
    req.env[std::string(kTraceLogEnv)] = fs::absolute(log).string();
    const auto outcomes = timed.run_test(shadow.shadow, req);
    const Verdict verdict = outcomes.empty() ? Verdict::fail : outcomes.front().verdict;
    if (verdict == Verdict::build_error) {
      throw InstrumentationFailed("instrumented test does not build");
    }
    const fs::path labelled =
        traces / ("run-" + std::to_string(i) + "-" + std::string(to_string(verdict)) + ".log");
    if (fs::exists(log)) fs::rename(log, labelled);
    if (verdict != Verdict::fail && verdict != Verdict::timeout) continue;

    std::ifstream in(labelled);
    const auto parsed = parse_log(in, LogMode::lenient);
    if (parsed.malformed > 0) spdlog::warn("{} malformed trace lines skipped", parsed.malformed);
    TraceResult result;
    result.graph = build_graph(parsed.edges, FunctionIndex::build(adapter_, workspace_), test.func);
    result.async = infer_async_edges(result.graph, adapter_);
    result.stats = graph_stats(result.graph);
    result.log_file = labelled.string();
    result.runs_used = i + 1;
    return result;
  }
  throw InstrumentationFailed("no failing run observed under instrumentation");
}

Thought Pipeline::generate_thought(const std::string& evidence, const std::string& test_source,
                                   const std::string& context,
                                   const std::vector<FailedThought>& history) {
  const auto prompt = thought_prompt(evidence, test_source, context, history);
  std::string last;
  for (int attempt = 0; attempt <= kOracleRetries; ++attempt) {
    check_time();
    try {
      return parse_thought(gateway_.complete(prompt));
    } catch (const ThoughtParseFailure& e) {
      last = e.what();
    } catch (const HttpError& e) {
      last = e.what();
    }
  }
  throw ThoughtParseFailure(last);
}

std::optional<std::string> Pipeline::repair_compile(const std::string& original,
                                                    const std::string& modified,
                                                    const std::vector<CompileDiagnostic>& diagnostics,
                                                    const std::string& func) {
  if (diagnostics.empty()) throw std::logic_error("repair_compile needs diagnostics");
  check_time();
  try {
    return parse_patch(gateway_.complete(repair_prompt(original, modified, diagnostics)),
                       {func, "", production_names_});
  } catch (const PatchParseFailure&) {
    return std::nullopt;
  } catch (const NonTestEdit&) {
    return std::nullopt;
  } catch (const HttpError&) {
    return std::nullopt;
  }
}

ValidationResult Pipeline::validate(const fs::path& ws, const TestId& test, RunScope scope,
                                    const std::string& file, const std::string& original,
                                    std::string candidate) {
  ValidationResult result;
  write_file(ws / file, replace_function(read_file(ws / file), test.func, candidate));
  auto diags = compile_fixing_imports(ws, file);
  while (!diags.empty()) {
    if (result.repair_rounds_used >= cfg_.repair_rounds) {
      result.candidate = candidate;
      result.diagnostics = diags;
      result.verdict = ValidationVerdict::compile_failed;
      return result;
    }
    ++result.repair_rounds_used;
    const auto repaired = repair_compile(original, candidate, diags, test.func);
    if (!repaired) continue;
    candidate = *repaired;
    write_file(ws / file, replace_function(read_file(ws / file), test.func, candidate));
    diags = compile_fixing_imports(ws, file);
  }
  result.built = true;
  result.candidate = candidate;

  TimedAdapter timed(adapter_, [this] { check_time(); });
  RunRequest req;
  req.selector = test;
  req.scope = scope;
  req.runs = cfg_.runs;
  req.race = cfg_.race;
  req.timeout_s = cfg_.run_timeout_s;
  std::vector<RunOutcome> outcomes;
  try {
    outcomes = timed.run_test(ws, req);
  } catch (const SelectorNotFound& e) {
    // The candidate no longer runs the case at all.
    result.verdict = ValidationVerdict::test_failed;
    result.reruns_total = cfg_.runs;
    return result;
  }
  result.reruns_total = outcomes.size();
  bool timed_out = false;
  bool build_error = false;
  for (const auto& o : outcomes) {
    if (o.verdict == Verdict::pass) ++result.reruns_passed;
    if (o.verdict == Verdict::timeout) timed_out = true;
    if (o.verdict == Verdict::build_error) build_error = true;
  }
  if (build_error) {
    result.built = false;
    result.verdict = ValidationVerdict::compile_failed;
  } else if (result.reruns_passed == result.reruns_total && result.reruns_total == cfg_.runs) {
    result.verdict = ValidationVerdict::accepted;
  } else {
    result.verdict = timed_out ? ValidationVerdict::timeout : ValidationVerdict::test_failed;
  }
  return result;
}

FixOutcome Pipeline::fix(const TestId& test) {
  started_ = clock_.now_s();
  FixOutcome outcome;
  outcome.test = test;
  try {
    check_time();
    TimedAdapter timed(adapter_, [this] { check_time(); });

    // Reproduction.
    Reproducer reproducer(timed, workspace_, extractor_, &gateway_);
    RunRequest base;
    base.runs = cfg_.runs;
    base.race = cfg_.race;
    base.timeout_s = cfg_.run_timeout_s;
    const auto report = reproducer.reproduce(test, base);
    outcome.reproduction = report;
    if (!report.reproduced) {
      outcome.status = FixStatus::not_reproduced;
      return outcome;
    }
    const FailureRecord failure = primary_failure(report.failures);
    outcome.failure = failure;
    const std::string evidence = render_evidence(test, failure);
    const RunScope scope = report.scope_used;

    // Dynamic call graph of a failing run.
    TraceResult trace;
    try {
      trace = trace_failure(test, scope);
    } catch (const InstrumentationFailed& e) {
      if (std::string(e.what()).find("no failing run") == std::string::npos) throw;
      outcome.notes.push_back(e.what());
      outcome.status = FixStatus::not_reproduced;
      return outcome;
    }
    outcome.graph = trace.stats;
    outcome.dot = to_dot(trace.graph);
    for (const auto& a : trace.async.ambiguous) {
      outcome.notes.push_back("ambiguous launch of " + a.site.callee_name + " at " + a.site.file +
                              ":" + std::to_string(a.site.line));
    }

    // Simplified working copy.
    outcome.test_file = failure.test_func_file.empty() ? find_test_file(adapter_, workspace_, test)
                                                       : failure.test_func_file;
    if (outcome.test_file.empty()) throw CaseNotFound("cannot find the file declaring " + test.func);
    const std::string pristine_text = read_file(workspace_ / outcome.test_file);
    for (const auto& rel : adapter_.source_files(workspace_)) {
      if (adapter_.is_test_file(rel)) continue;
      for (const auto& fn : adapter_.parse_functions(read_file(workspace_ / rel), rel)) {
        if (fn.kind == FunctionKind::named) production_names_.insert(fn.name);
      }
    }

    const fs::path work = work_dir_ / "simplified";
    copy_tree(workspace_, work);
    SimplifiedTest simp;
    if (cfg_.simplify && scope == RunScope::case_scope) {
      simp = simplify_test(pristine_text, test.func, test.case_name);
    } else {
      simp = simplify_test(pristine_text, test.func, test.case_name);
      simp.t_simp = simp.t_orig;
      simp.tracker.clear();
      simp.simplified = false;
      simp.note = scope == RunScope::target ? "the failure needs other tests in the target"
                                            : "simplification disabled";
    }
    std::string simp_text = pristine_text;
    if (simp.simplified) {
      write_file(work / outcome.test_file, replace_function(pristine_text, test.func, simp.t_simp));
      try {
        simp_text = neutralize_unused(adapter_, work, outcome.test_file).text;
      } catch (const NeutralizationDiverged& e) {
        outcome.notes.push_back(std::string("simplification dropped: ") + e.what());
        simp.simplified = false;
        simp_text = pristine_text;
        write_file(work / outcome.test_file, pristine_text);
      }
    } else if (!simp.note.empty()) {
      outcome.notes.push_back("not simplified: " + simp.note);
    }
    outcome.simplified = simp.simplified;
    const std::string t_simp = find_function(simp_text, test.func)->decl_text;
    const std::string baseline = tree_hash(work);

    SafeLlmOracle llm_oracle(gateway_);
    TimedOracle oracle(llm_oracle, [this] { check_time(); });
    std::vector<FailedThought> history;

    for (std::size_t m = 1; m <= cfg_.m; ++m) {
      const std::string guidance = render_guidance(history);
      const auto ordered = collect_context(trace.graph, cfg_.traversal, oracle, evidence, guidance);
      const auto bundle = global_filter(ordered, trace.graph, cfg_.traversal, oracle, evidence, guidance);
      for (const auto& note : bundle.fallbacks) outcome.notes.push_back(note);
      outcome.context.clear();
      for (const auto& id : bundle.final) {
        outcome.context.push_back(trace.graph.node(id).name + " (" + id.render() + ")");
      }

      for (std::size_t p = 1; p <= cfg_.p; ++p) {
        Thought thought;
        try {
          thought = generate_thought(evidence, t_simp, bundle.rendered, history);
        } catch (const ThoughtParseFailure& e) {
          outcome.attempts.push_back({m, p, 0, "thought", "", "unparsable", e.what(), 0, false, false});
          continue;
        }
        FailedThought failed{thought, {}};

        for (std::size_t n = 1; n <= cfg_.n; ++n) {
          AttemptRecord attempt{m, p, n, "fix", thought.category.to_string(), "", "", 0, false, false};
          check_time();
          std::optional<std::string> candidate;
          try {
            candidate = parse_patch(
                gateway_.complete(fix_prompt(evidence, t_simp, bundle.rendered, thought,
                                             failed.attempt_summaries)),
                {test.func, outcome.test_file, production_names_});
          } catch (const NonTestEdit& e) {
            attempt.result = "rejected";
            attempt.detail = e.what();
          } catch (const PatchParseFailure& e) {
            attempt.result = "unparsable";
            attempt.detail = e.what();
          } catch (const HttpError& e) {
            attempt.result = "backend-error";
            attempt.detail = e.what();
          }

          if (candidate) {
            const std::string before = tree_hash(work);
            ValidationResult vr = validate(work, test, scope, outcome.test_file, t_simp, *candidate);
            attempt.repair_rounds = vr.repair_rounds_used;
            attempt.result = std::string(to_string(vr.verdict));
            if (vr.verdict == ValidationVerdict::compile_failed) attempt.detail = describe(vr.diagnostics);

            if (vr.verdict == ValidationVerdict::accepted) {
              // Re-express on the pristine sources and validate again there.
              std::string final_fn = vr.candidate;
              try {
                if (simp.simplified) {
                  final_fn = restore_neutralized(transplant(t_simp, vr.candidate, simp.t_orig, simp.target_case));
                }
                const fs::path check = work_dir_ / "pristine-check";
                copy_tree(workspace_, check);
                write_file(check / outcome.test_file,
                           replace_function(pristine_text, test.func, final_fn));
                const auto diags = compile_fixing_imports(check, outcome.test_file);
                if (!diags.empty()) {
                  attempt.result = "compile-failed";
                  attempt.detail = "transplanted fix: " + describe(diags);
                } else {
                  RunRequest req;
                  req.selector = test;
                  req.scope = scope;
                  req.runs = cfg_.runs;
                  req.race = cfg_.race;
                  req.timeout_s = cfg_.run_timeout_s;
                  std::vector<RunOutcome> outcomes;
                  try {
                    outcomes = timed.run_test(check, req);
                  } catch (const SelectorNotFound&) {
                  }
                  const bool all_pass =
                      outcomes.size() == cfg_.runs &&
                      std::all_of(outcomes.begin(), outcomes.end(),
                                  [](const auto& o) { return o.verdict == Verdict::pass; });
                  if (all_pass) {
                    const std::string fixed_text = read_file(check / outcome.test_file);
                    outcome.diff = unified_diff(pristine_text, fixed_text, outcome.test_file);
                    outcome.thought = thought;
                  } else {
                    attempt.result = "test-failed";
                    attempt.detail = "transplanted fix did not pass every rerun";
                  }
                }
              } catch (const Error& e) {
                attempt.result = "merge-failed";
                attempt.detail = e.what();
              }
            }

            write_file(work / outcome.test_file, simp_text);
            attempt.reverted = true;
            attempt.revert_verified = tree_hash(work) == before && before == baseline;
            if (!attempt.revert_verified) {
              copy_tree(workspace_, work);
              write_file(work / outcome.test_file, simp_text);
              attempt.revert_verified = tree_hash(work) == baseline;
            }
          }
          outcome.attempts.push_back(attempt);
          if (outcome.thought) {
            outcome.status = FixStatus::fixed;
            return outcome;
          }
          failed.attempt_summaries.push_back(
              attempt.result + (attempt.detail.empty() ? "" : ": " + first_line(attempt.detail)));
        }
        history.push_back(std::move(failed));
      }
    }
    outcome.status = FixStatus::exhausted;
  } catch (const TimeLimitReached& e) {
    outcome.status = FixStatus::timed_out;
    outcome.notes.push_back(e.what());
  }
  return outcome;
}

// ----------------------------------------------------------------- report

std::string render_report(const FixOutcome& o) {
  std::ostringstream out;
  out << "# Flaky test report: " << o.test.render() << "\n\n";
  out << "Status: **" << to_string(o.status) << "**\n\n";
  if (o.status == FixStatus::fixed) {
    out << "## Fix\n\n```diff\n" << o.diff << "```\n\n";
    out << "## Root cause\n\n";
    out << "- Category: " << o.thought->category.to_string() << "\n";
    out << "- Explanation: " << o.thought->explanation << "\n";
    out << "- Plan: " << o.thought->plan << "\n\n";
  }
  out << "## Reproduction\n\n";
  if (o.reproduction) {
    const auto& r = *o.reproduction;
    out << "- Runs per scope: " << r.attempted_runs << "\n";
    out << "- Reproduced: " << (r.reproduced ? "yes" : "no") << "\n";
    if (r.reproduced) out << "- Scope: " << to_string(r.scope_used) << "\n";
    if (!r.reproduced) {
      out << "- Case scope failures: " << r.case_failures << "\n";
      out << "- Target scope failures: " << r.target_failures << "\n";
    }
  }
  if (o.failure) {
    out << "- Failure: `" << first_line(o.failure->message) << "`\n";
    if (o.failure->located()) {
      out << "- Assertion: " << o.failure->assertion_file << ":" << o.failure->assertion_line << "\n";
    }
  }
  out << "\n";
  if (o.graph) {
    out << "## Context\n\n";
    out << "Call graph: " << o.graph->node_count << " nodes, " << o.graph->edge_count
        << " edges, depth " << o.graph->max_depth << ".\n\n";
    for (const auto& c : o.context) out << "- " << c << "\n";
    out << "\n";
  }
  if (!o.attempts.empty()) {
    out << "## Attempts\n\n| m | p | n | stage | category | result | repairs | reverted |\n"
        << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& a : o.attempts) {
      out << "| " << a.m << " | " << a.p << " | " << a.n << " | " << a.stage << " | "
          << a.category << " | " << a.result << " | " << a.repair_rounds << " | "
          << (a.stage == "fix" ? (a.revert_verified ? "verified" : (a.reverted ? "unverified" : "-")) : "-")
          << " |\n";
    }
    out << "\n";
  }
  if (!o.notes.empty()) {
    out << "## Notes\n\n";
    for (const auto& n : o.notes) out << "- " << first_line(n) << "\n";
    out << "\n";
  }
  return out.str();
}

std::string render_attempts(const FixOutcome& o) {
  std::string out;
  for (const auto& a : o.attempts) {
    json rec = {{"m", a.m},
                {"p", a.p},
                {"n", a.n},
                {"stage", a.stage},
                {"category", a.category},
                {"result", a.result},
                {"detail", a.detail},
                {"repair_rounds", a.repair_rounds},
                {"reverted", a.reverted},
                {"revert_verified", a.revert_verified}};
    out += rec.dump() + "\n";
  }
  return out;
}

}  // namespace flakyfix
