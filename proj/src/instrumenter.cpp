#include "flakyfix/instrumenter.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"

namespace fs = std::filesystem;

namespace flakyfix {

namespace {

constexpr std::string_view kAlias = "ffrecorder";

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

std::string go_quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string dir_of(const std::string& rel) {
  const auto parent = fs::path(rel).parent_path().generic_string();
  return parent.empty() ? "." : parent;
}

}  // namespace

std::string go_module_path(const fs::path& workspace) {
  std::ifstream in(workspace / "go.mod");
  std::string line;
  static const std::regex module_re(R"re(^\s*module\s+"?([^\s"]+)"?)re");
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_search(line, m, module_re)) return m[1].str();
  }
  throw InjectionConflict("no module path in " + (workspace / "go.mod").string());
}

void copy_tree(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::remove_all(to, ec);
  fs::create_directories(to);
  for (auto it = fs::recursive_directory_iterator(from); it != fs::recursive_directory_iterator();
       ++it) {
    const auto name = it->path().filename().string();
    if (it->is_directory() && (name == ".git" || name == ".hg" || name == ".svn")) {
      it.disable_recursion_pending();
      continue;
    }
    const auto target = to / it->path().lexically_relative(from);
    if (it->is_directory()) {
      fs::create_directories(target);
    } else if (it->is_regular_file()) {
      fs::copy_file(it->path(), target, fs::copy_options::overwrite_existing);
    }
  }
}

std::set<std::string> all_packages(const SubjectAdapter& adapter, const fs::path& workspace) {
  std::set<std::string> dirs;
  for (const auto& rel : adapter.source_files(workspace)) dirs.insert(dir_of(rel));
  return dirs;
}

std::string instrument_source(std::string_view text, const std::vector<SubjectFunction>& fns,
                              const std::string& module_path) {
  std::vector<std::pair<std::size_t, std::string>> inserts;
  for (const auto& fn : fns) {
    if (fn.empty_body) continue;
    inserts.emplace_back(fn.body_span.start + 1,
                         std::string(kAlias) + ".Enter(" + go_quote(fn.file) + ", " +
                             std::to_string(fn.decl_line) + ", " + go_quote(fn.name) + ");");
  }
  if (inserts.empty()) return std::string(text);

  auto tree = go::SyntaxTree::parse(std::string(text));
  std::optional<std::size_t> package_end;
  for (TSNode child : go::named_children(tree.root())) {
    if (!go::is_type(child, "package_clause")) continue;
    for (TSNode id : go::named_children(child)) {
      if (go::is_type(id, "package_identifier")) package_end = ts_node_end_byte(id);
    }
  }
  if (!package_end) throw InjectionConflict("no package clause in " + fns.front().file);
  inserts.emplace_back(*package_end, "; import " + std::string(kAlias) + " " +
                                         go_quote(module_path + "/" + std::string(kRecorderDir)));

  std::sort(inserts.begin(), inserts.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::string out(text);
  for (const auto& [pos, snippet] : inserts) out.insert(pos, snippet);
  return out;
}

std::string strip_instrumentation(std::string_view text) {
  static const std::regex entry("ffrecorder\\.Enter\\(\"(?:[^\"\\\\]|\\\\.)*\", [0-9]+, \"(?:[^\"\\\\]|\\\\.)*\"\\);");
  static const std::regex import("; import ffrecorder \"[^\"]*\"");
  std::string out = std::regex_replace(std::string(text), entry, "");
  return std::regex_replace(out, import, "", std::regex_constants::format_first_only);
}

std::string recorder_source(const fs::path& shadow_root, const fs::path& default_log,
                            const std::vector<SubjectFunction>& functions) {
  std::map<std::string, std::vector<const SubjectFunction*>> by_file;
  for (const auto& fn : functions) by_file[fn.file].push_back(&fn);

  std::ostringstream out;
  out << "// Code generated by flakyfix. DO NOT EDIT.\n\n"
      << "package ffrecorder\n\n"
      << "import (\n\t\"os\"\n\t\"runtime\"\n\t\"strconv\"\n\t\"strings\"\n\t\"sync\"\n)\n\n"
      << "type span struct {\n\tstart, end, decl int\n\tname       string\n}\n\n"
      << "const root = " << go_quote(shadow_root.generic_string() + "/") << "\n\n"
      << "const defaultLog = " << go_quote(default_log.generic_string()) << "\n\n"
      << "var spans = map[string][]span{\n";
  for (const auto& [file, fns] : by_file) {
    out << "\t" << go_quote(file) << ": {\n";
    for (const auto* fn : fns) {
      out << "\t\t{" << fn->decl_line << ", " << fn->end_line << ", " << fn->decl_line << ", "
          << go_quote(fn->name) << "},\n";
    }
    out << "\t},\n";
  }
  out << "}\n\n";
  out << R"GO(var (
	mu     sync.Mutex
	seen   = map[string]bool{}
	out    *os.File
	opened bool
)

func logPath() string {
	if p := os.Getenv("FLAKYFIX_TRACE_LOG"); p != "" {
		return p
	}
	return defaultLog
}

func skipped(f runtime.Frame) bool {
	return strings.HasPrefix(f.Function, "runtime.") ||
		strings.Contains(f.Function, ".gowrap") ||
		strings.Contains(f.Function, ".deferwrap") ||
		strings.HasSuffix(f.Function, "-fm") ||
		f.File == "<autogenerated>"
}

func resolve(f runtime.Frame) (string, int, string) {
	if !strings.HasPrefix(f.File, root) {
		return "-", 0, "-"
	}
	rel := f.File[len(root):]
	table, ok := spans[rel]
	if !ok {
		return "-", 0, "-"
	}
	if f.Func != nil {
		if _, decl := f.Func.FileLine(f.Entry); decl > 0 {
			for _, s := range table {
				if s.decl == decl {
					return rel, s.decl, s.name
				}
			}
		}
	}
	best := -1
	for i, s := range table {
		if s.start <= f.Line && f.Line <= s.end {
			if best < 0 || s.end-s.start <= table[best].end-table[best].start {
				best = i
			}
		}
	}
	if best < 0 {
		return "-", 0, "-"
	}
	return rel, table[best].decl, table[best].name
}

func caller() (string, int, string) {
	var pcs [64]uintptr
	n := runtime.Callers(1, pcs[:])
	frames := runtime.CallersFrames(pcs[:n])
	state := 0
	for {
		f, more := frames.Next()
		switch {
		case state == 0:
			if strings.HasSuffix(f.Function, "zz_flakyfix_recorder.Enter") {
				state = 1
			}
		case state == 1:
			state = 2
		case !skipped(f):
			return resolve(f)
		}
		if !more {
			return "-", 0, "-"
		}
	}
}

// Enter records the edge from the calling function to the function that
// called Enter. Each distinct edge is written once per process.
//
//go:noinline
func Enter(file string, line int, name string) {
	cf, cl, cn := caller()
	rec := "MethodEntry: " + file + ", " + strconv.Itoa(line) + ", " + name +
		" Caller: " + cf + ", " + strconv.Itoa(cl) + ", " + cn + "\n"
	mu.Lock()
	defer mu.Unlock()
	if seen[rec] {
		return
	}
	seen[rec] = true
	if !opened {
		opened = true
		out, _ = os.OpenFile(logPath(), os.O_APPEND|os.O_CREATE|os.O_WRONLY, 0o644)
	}
	if out == nil {
		return
	}
	if _, err := out.WriteString(rec); err != nil {
		out.WriteString("RECORDER-ERROR\n")
	}
}
)GO";
  return out.str();
}

InstrumentedWorkspace instrument_workspace(const SubjectAdapter& adapter, const fs::path& workspace,
                                           const std::set<std::string>& scope,
                                           const fs::path& shadow, const fs::path& log_path) {
  const fs::path abs_shadow = fs::absolute(shadow).lexically_normal();
  copy_tree(workspace, abs_shadow);
  const std::string module_path = go_module_path(workspace);

  InstrumentedWorkspace result;
  result.shadow = abs_shadow;
  result.manifest.support_unit = std::string(kRecorderDir) + "/recorder.go";
  result.manifest.log_path = fs::absolute(log_path).lexically_normal().generic_string();

  std::vector<SubjectFunction> all;
  for (const auto& rel : adapter.source_files(workspace)) {
    if (scope.count(dir_of(rel)) == 0) continue;
    const std::string text = read_file(workspace / rel);
    auto fns = adapter.parse_functions(text, rel);
    for (const auto& fn : fns) {
      result.manifest.entries.push_back({fn.file, fn.decl_line, fn.name, fn.empty_body});
    }
    const std::string instrumented = instrument_source(text, fns, module_path);
    if (instrumented != text) write_file(abs_shadow / rel, instrumented);
    all.insert(all.end(), fns.begin(), fns.end());
  }
  write_file(abs_shadow / result.manifest.support_unit,
             recorder_source(abs_shadow, result.manifest.log_path, all));
  return result;
}

}  // namespace flakyfix
