#include "flakyfix/go_adapter.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"
#include "flakyfix/process.hpp"

namespace fs = std::filesystem;

namespace flakyfix {

namespace {

std::string receiver_type_name(const go::SyntaxTree& tree, TSNode receiver) {
  for (TSNode param : go::named_children(receiver)) {
    if (!go::is_type(param, "parameter_declaration")) continue;
    TSNode type = go::field(param, "type");
    while (!ts_node_is_null(type)) {
      const auto kind = go::type_of(type);
      if (kind == "pointer_type" || kind == "parenthesized_type") {
        type = ts_node_named_child(type, 0);
      } else if (kind == "generic_type") {
        type = go::field(type, "type");
      } else {
        return std::string(tree.text(type));
      }
    }
  }
  return {};
}

bool block_is_empty(TSNode body) {
  for (TSNode child : go::named_children(body)) {
    if (!go::is_type(child, "comment")) return false;
  }
  return true;
}

class FunctionCollector {
 public:
  FunctionCollector(const go::SyntaxTree& tree, std::string path)
      : tree_(tree), path_(std::move(path)) {}

  std::vector<SubjectFunction> run() {
    std::string package = "package";
    for (TSNode child : go::named_children(tree_.root())) {
      if (go::is_type(child, "package_clause")) {
        for (TSNode id : go::named_children(child)) package = std::string(tree_.text(id));
      }
    }
    int counter = 0;
    visit_children(tree_.root(), package, counter);
    return std::move(out_);
  }

 private:
  void visit_children(TSNode node, const std::string& enclosing, int& counter) {
    const auto count = ts_node_named_child_count(node);
    for (std::uint32_t i = 0; i < count; ++i) visit(ts_node_named_child(node, i), enclosing, counter);
  }

  void visit(TSNode node, const std::string& enclosing, int& counter) {
    const auto kind = go::type_of(node);
    if (kind == "function_declaration" || kind == "method_declaration" || kind == "func_literal") {
      TSNode body = go::field(node, "body");
      std::string name;
      FunctionKind fkind = FunctionKind::named;
      if (kind == "func_literal") {
        name = enclosing + "$anon" + std::to_string(++counter);
        fkind = FunctionKind::anonymous;
      } else {
        name = std::string(tree_.text(go::field(node, "name")));
        if (kind == "method_declaration") {
          const std::string recv = receiver_type_name(tree_, go::field(node, "receiver"));
          if (!recv.empty()) name = recv + "." + name;
          fkind = FunctionKind::method;
        }
      }
      if (ts_node_is_null(body)) return;  // declaration without body
      SubjectFunction fn;
      fn.name = name;
      fn.file = path_;
      fn.kind = fkind;
      fn.decl_line = go::start_line(node);
      fn.end_line = go::end_line(node);
      fn.body_line = go::start_line(body);
      fn.decl_span = {ts_node_start_byte(node), ts_node_end_byte(node)};
      fn.decl_text = std::string(tree_.text(node));
      fn.body_span = {ts_node_start_byte(body), ts_node_end_byte(body)};
      fn.source = std::string(tree_.text(body));
      fn.empty_body = block_is_empty(body);
      out_.push_back(std::move(fn));
      int inner = 0;
      visit_children(body, name, inner);
      return;
    }
    visit_children(node, enclosing, counter);
  }

  const go::SyntaxTree& tree_;
  std::string path_;
  std::vector<SubjectFunction> out_;
};

std::string relative_to(const fs::path& workspace, std::string path) {
  if (path.rfind("./", 0) == 0) path = path.substr(2);
  fs::path p(path);
  if (p.is_absolute()) {
    std::error_code ec;
    const auto base = fs::weakly_canonical(workspace, ec);
    const auto full = fs::weakly_canonical(p, ec);
    const auto rel = full.lexically_relative(base);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  }
  return p.lexically_normal().generic_string();
}

std::string regex_quote(std::string_view text) {
  std::string out;
  for (const char c : text) {
    if (std::string_view("\\.+*?()|[]{}^$").find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<SubjectFunction> parse_go_functions(std::string_view file_text,
                                                const std::string& path) {
  auto tree = go::SyntaxTree::parse(std::string(file_text));
  if (auto err = tree.first_error()) throw ParseError(path, err->line, err->column);
  return FunctionCollector(tree, path).run();
}

std::vector<AsyncLaunchSite> find_go_async_launches(const SubjectFunction& fn) {
  // The body alone is not a compilation unit; host it in a stub function.
  const std::string prefix = "package p\nfunc _() ";
  auto tree = go::SyntaxTree::parse(prefix + fn.source);
  const auto to_file_line = [&](TSNode node) { return fn.body_line + go::start_line(node) - 2; };

  TSNode host{};
  for (TSNode child : go::named_children(tree.root())) {
    if (go::is_type(child, "function_declaration")) host = go::field(child, "body");
  }
  std::vector<AsyncLaunchSite> sites;
  if (ts_node_is_null(host)) return sites;

  // Literals directly inside fn, in lexical order, give the $anonN suffixes.
  std::map<std::uint32_t, int> literal_index;
  int counter = 0;
  go::walk(host, [&](TSNode node) {
    if (go::is_type(node, "func_literal")) {
      literal_index[ts_node_start_byte(node)] = ++counter;
      return false;
    }
    return true;
  });

  go::walk(host, [&](TSNode node) {
    const auto kind = go::type_of(node);
    if (kind == "func_literal") return false;
    if (kind != "go_statement") return true;
    TSNode call = ts_node_named_child(node, 0);
    if (!go::is_type(call, "call_expression")) return true;
    TSNode target = go::field(call, "function");
    while (go::is_type(target, "parenthesized_expression")) target = ts_node_named_child(target, 0);
    AsyncLaunchSite site;
    site.enclosing = fn.id();
    site.file = fn.file;
    site.line = to_file_line(node);
    const auto tkind = go::type_of(target);
    if (tkind == "identifier") {
      site.callee_name = std::string(tree.text(target));
    } else if (tkind == "selector_expression") {
      site.callee_name = std::string(tree.text(go::field(target, "field")));
    } else if (tkind == "func_literal") {
      const int n = literal_index[ts_node_start_byte(target)];
      site.callee_name = fn.name + "$anon" + std::to_string(n);
      site.literal = NodeId{fn.file, to_file_line(target)};
    } else if (tkind == "index_expression" || tkind == "generic_type") {
      TSNode operand = ts_node_named_child(target, 0);
      if (go::is_type(operand, "selector_expression")) operand = go::field(operand, "field");
      site.callee_name = std::string(tree.text(operand));
    }
    if (!site.callee_name.empty()) sites.push_back(std::move(site));
    // Arguments may hold literals launched elsewhere; they are separate nodes.
    return true;
  });
  return sites;
}

std::vector<CompileDiagnostic> parse_go_diagnostics(std::string_view output,
                                                    const fs::path& workspace,
                                                    std::string_view unused_pattern) {
  static const std::regex line_re(R"(^\s*(\S+\.go):(\d+)(?::(\d+))?: (.*)$)");
  const std::regex unused_re{std::string(unused_pattern)};
  std::vector<CompileDiagnostic> out;
  std::istringstream in{std::string(output)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    CompileDiagnostic d;
    d.file = relative_to(workspace, m[1].str());
    d.line = static_cast<std::uint32_t>(std::stoul(m[2].str()));
    d.column = m[3].matched ? static_cast<std::uint32_t>(std::stoul(m[3].str())) : 0;
    d.message = m[4].str();
    d.kind = std::regex_search(d.message, unused_re) ? DiagnosticKind::unused_variable
                                                     : DiagnosticKind::other;
    out.push_back(std::move(d));
  }
  return out;
}

GoTestStream parse_go_test_json(std::string_view output, const std::string& test_name,
                                const TestId& id) {
  GoTestStream stream;
  const std::string nested_prefix = test_name + "/";
  std::string buffer;
  std::istringstream in{std::string(output)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() != '{') {
      if (!line.empty()) stream.build_output += line + "\n";
      continue;
    }
    const auto event = nlohmann::json::parse(line, nullptr, false);
    if (event.is_discarded() || !event.is_object()) continue;
    const std::string action = event.value("Action", "");
    const std::string test = event.value("Test", "");
    const std::string text = event.value("Output", "");
    if (action == "build-output") {
      stream.build_output += text;
      continue;
    }
    if (action == "build-fail" || event.contains("FailedBuild")) {
      stream.build_failed = true;
      continue;
    }
    if (test.empty() && (text.find("[build failed]") != std::string::npos ||
                         text.find("[setup failed]") != std::string::npos)) {
      stream.build_failed = true;
    }
    const bool selected = test == test_name;
    const bool nested = test.rfind(nested_prefix, 0) == 0;
    if (selected && action == "run") {
      stream.selector_seen = true;
      stream.selector_running = true;
      buffer.clear();
      continue;
    }
    if (action == "output") {
      if (stream.selector_running && (selected || nested || test.empty())) buffer += text;
      continue;
    }
    if (selected && (action == "pass" || action == "fail" || action == "skip")) {
      RunOutcome o;
      o.test = id;
      o.run_index = stream.outcomes.size();
      o.duration = event.value("Elapsed", 0.0);
      o.raw_output = buffer;
      if (action == "fail") {
        o.verdict = buffer.find("panic: test timed out") != std::string::npos ? Verdict::timeout
                                                                               : Verdict::fail;
        if (o.raw_output.empty()) o.raw_output = "--- FAIL: " + test_name + "\n";
      } else {
        o.verdict = Verdict::pass;
      }
      stream.outcomes.push_back(std::move(o));
      stream.selector_running = false;
      buffer.clear();
    }
  }
  if (stream.selector_running) stream.partial_output = buffer;
  return stream;
}

GoAdapter::GoAdapter(GoToolchainConfig config) : config_(std::move(config)) {}

std::vector<SubjectFunction> GoAdapter::parse_functions(std::string_view file_text,
                                                        const std::string& path) const {
  return parse_go_functions(file_text, path);
}

std::vector<AsyncLaunchSite> GoAdapter::find_async_launches(const SubjectFunction& fn) const {
  return find_go_async_launches(fn);
}

std::vector<std::string> GoAdapter::expand(
    const std::string& tmpl, const std::map<std::string, std::string>& values) const {
  std::vector<std::string> argv;
  std::istringstream in(tmpl);
  std::string token;
  while (in >> token) {
    for (const auto& [key, value] : values) {
      const std::string placeholder = "{" + key + "}";
      for (auto pos = token.find(placeholder); pos != std::string::npos;
           pos = token.find(placeholder, pos + value.size())) {
        token.replace(pos, placeholder.size(), value);
      }
    }
    if (!token.empty()) argv.push_back(token);
  }
  return argv;
}

std::vector<CompileDiagnostic> GoAdapter::compile(const fs::path& workspace) {
  const auto argv = expand(config_.compile_template, {{"go", config_.go}});
  const auto result = run_process(argv, workspace, config_.env, 600.0);
  if (result.exit_code == 0) return {};
  auto diags = parse_go_diagnostics(result.out + "\n" + result.err, workspace,
                                    config_.unused_pattern);
  if (diags.empty()) {
    throw ToolchainCrashed("compile failed without diagnostics (exit " +
                           std::to_string(result.exit_code) + "): " + result.err);
  }
  return diags;
}

std::string GoAdapter::package_dir(const TestId& test) const {
  std::string label = test.target;
  if (label.rfind("//", 0) == 0) label = label.substr(2);
  if (const auto colon = label.find(':'); colon != std::string::npos) label = label.substr(0, colon);
  while (!label.empty() && label.back() == '/') label.pop_back();
  if (label.rfind("./", 0) == 0) label = label.substr(2);
  return label.empty() ? "." : label;
}

std::string GoAdapter::case_pattern(const TestId& test) {
  std::string pattern = "^" + regex_quote(test.func) + "$";
  if (!test.case_name.empty()) pattern += "/^" + regex_quote(go::subtest_name(test.case_name)) + "$";
  return pattern;
}

std::string GoAdapter::reported_name(const TestId& test) {
  if (test.case_name.empty()) return test.func;
  return test.func + "/" + go::subtest_name(test.case_name);
}

std::vector<RunOutcome> GoAdapter::run_test(const fs::path& workspace, const RunRequest& request) {
  if (request.runs == 0) throw std::invalid_argument("run_test: runs must be >= 1");
  const std::string dir = package_dir(request.selector);
  if (!fs::is_directory(workspace / dir)) {
    throw SelectorNotFound("no package directory '" + dir + "' for " + request.selector.render());
  }
  const std::string name = reported_name(request.selector);
  const std::string run_pattern =
      request.scope == RunScope::case_scope ? case_pattern(request.selector) : ".";
  auto env = config_.env;
  for (const auto& [k, v] : request.env) env[k] = v;

  std::vector<RunOutcome> outcomes;
  while (outcomes.size() < request.runs) {
    const std::size_t remaining = request.runs - outcomes.size();
    const double budget = request.timeout_s * static_cast<double>(remaining);
    const auto argv = expand(config_.runner_template,
                             {{"go", config_.go},
                              {"target", "./" + dir},
                              {"runcount", std::to_string(remaining)},
                              {"raceflag", request.race ? config_.race_flag : ""},
                              {"timeout", std::to_string(static_cast<long long>(budget))},
                              {"run", run_pattern}});
    const auto result = run_process(argv, workspace, env, budget + 60.0);
    auto stream = parse_go_test_json(result.out, name, request.selector);

    if (stream.build_failed && stream.outcomes.empty() && !stream.selector_seen) {
      RunOutcome o;
      o.test = request.selector;
      o.verdict = Verdict::build_error;
      o.raw_output = stream.build_output + result.err;
      if (o.raw_output.empty()) o.raw_output = "build failed\n";
      return {o};
    }
    if (!stream.selector_seen) {
      if (outcomes.empty() && !result.timed_out) {
        throw SelectorNotFound("test " + name + " did not run in " + dir);
      }
      // The binary died before reaching the test again; charge one run.
      RunOutcome o;
      o.test = request.selector;
      o.verdict = result.timed_out ? Verdict::timeout : Verdict::fail;
      o.raw_output = result.out + result.err;
      if (o.raw_output.empty()) o.raw_output = "test binary exited early\n";
      stream.outcomes.push_back(std::move(o));
    } else if (stream.selector_running) {
      RunOutcome o;
      o.test = request.selector;
      o.verdict = result.timed_out ? Verdict::timeout : Verdict::fail;
      o.raw_output = stream.partial_output + result.err;
      if (o.raw_output.empty()) o.raw_output = "--- FAIL: " + name + " (no result)\n";
      stream.outcomes.push_back(std::move(o));
    }
    for (auto& o : stream.outcomes) {
      if (outcomes.size() == request.runs) break;
      o.run_index = outcomes.size();
      outcomes.push_back(std::move(o));
    }
    if (result.timed_out) {
      // The process budget covered every remaining run.
      while (outcomes.size() < request.runs) {
        RunOutcome o;
        o.test = request.selector;
        o.run_index = outcomes.size();
        o.verdict = Verdict::timeout;
        o.raw_output = "run not started before the timeout\n";
        outcomes.push_back(std::move(o));
      }
    }
  }
  return outcomes;
}

std::vector<std::string> GoAdapter::source_files(const fs::path& workspace) const {
  std::vector<std::string> files;
  for (auto it = fs::recursive_directory_iterator(workspace); it != fs::recursive_directory_iterator();
       ++it) {
    const auto name = it->path().filename().string();
    if (it->is_directory() && (name == "vendor" || name == "testdata" || name.front() == '.' ||
                               name.front() == '_')) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && it->path().extension() == ".go") {
      files.push_back(it->path().lexically_relative(workspace).generic_string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool GoAdapter::is_test_file(std::string_view path) const {
  return path.size() >= 8 && path.substr(path.size() - 8) == "_test.go";
}

bool go_toolchain_available(const std::string& go) {
  try {
    return run_process({go, "version"}, fs::current_path(), {}, 30.0).exit_code == 0;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace flakyfix
