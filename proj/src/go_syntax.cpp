#include "flakyfix/go_syntax.hpp"

#include <cstring>
#include <stdexcept>

extern "C" const TSLanguage* tree_sitter_go(void);

namespace flakyfix::go {

namespace {

struct ParserDeleter {
  void operator()(TSParser* parser) const { ts_parser_delete(parser); }
};

}  // namespace

SyntaxTree::SyntaxTree(std::string source, TSTree* tree)
    : source_(std::move(source)), tree_(tree) {}

SyntaxTree SyntaxTree::parse(std::string source) {
  std::unique_ptr<TSParser, ParserDeleter> parser(ts_parser_new());
  if (!ts_parser_set_language(parser.get(), tree_sitter_go())) {
    throw std::runtime_error("tree-sitter-go ABI mismatch");
  }
  TSTree* tree = ts_parser_parse_string(parser.get(), nullptr, source.data(),
                                        static_cast<std::uint32_t>(source.size()));
  if (tree == nullptr) throw std::runtime_error("tree-sitter parse aborted");
  return SyntaxTree(std::move(source), tree);
}

TSNode SyntaxTree::root() const { return ts_tree_root_node(tree_.get()); }

std::string_view SyntaxTree::text(TSNode node) const {
  const auto begin = ts_node_start_byte(node);
  const auto end = ts_node_end_byte(node);
  return std::string_view(source_).substr(begin, end - begin);
}

bool SyntaxTree::has_error() const { return ts_node_has_error(root()); }

std::optional<SourcePoint> SyntaxTree::first_error() const {
  if (!has_error()) return std::nullopt;
  std::optional<SourcePoint> found;
  walk(root(), [&](TSNode node) {
    if (found) return false;
    if (ts_node_is_error(node) || ts_node_is_missing(node)) {
      const TSPoint p = ts_node_start_point(node);
      found = SourcePoint{p.row + 1, p.column + 1};
      return false;
    }
    return ts_node_has_error(node);
  });
  if (!found) {
    const TSPoint p = ts_node_start_point(root());
    found = SourcePoint{p.row + 1, p.column + 1};
  }
  return found;
}

std::string_view type_of(TSNode node) {
  if (ts_node_is_null(node)) return {};
  return ts_node_type(node);
}

bool is_type(TSNode node, std::string_view type) { return type_of(node) == type; }

TSNode field(TSNode node, std::string_view name) {
  return ts_node_child_by_field_name(node, name.data(),
                                     static_cast<std::uint32_t>(name.size()));
}

std::vector<TSNode> named_children(TSNode node) {
  std::vector<TSNode> out;
  const auto count = ts_node_named_child_count(node);
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(ts_node_named_child(node, i));
  return out;
}

std::uint32_t start_line(TSNode node) { return ts_node_start_point(node).row + 1; }

std::uint32_t end_line(TSNode node) {
  const TSPoint end = ts_node_end_point(node);
  // A node ending exactly at column 0 finished on the previous line.
  if (end.column == 0 && end.row > ts_node_start_point(node).row) return end.row;
  return end.row + 1;
}

void walk(TSNode node, const std::function<bool(TSNode)>& visit) {
  if (ts_node_is_null(node)) return;
  TSTreeCursor cursor = ts_tree_cursor_new(node);
  bool descend = visit(node);
  for (;;) {
    if (descend && ts_tree_cursor_goto_first_child(&cursor)) {
      descend = visit(ts_tree_cursor_current_node(&cursor));
      continue;
    }
    bool moved = false;
    while (!moved) {
      if (ts_tree_cursor_goto_next_sibling(&cursor)) {
        moved = true;
      } else if (!ts_tree_cursor_goto_parent(&cursor)) {
        ts_tree_cursor_delete(&cursor);
        return;
      }
    }
    descend = visit(ts_tree_cursor_current_node(&cursor));
  }
}

std::optional<std::string> string_literal_value(const SyntaxTree& tree, TSNode node) {
  const auto type = type_of(node);
  const std::string_view raw = tree.text(node);
  if (raw.size() < 2) return std::nullopt;
  if (type == "raw_string_literal") return std::string(raw.substr(1, raw.size() - 2));
  if (type != "interpreted_string_literal") return std::nullopt;
  std::string out;
  const std::string_view body = raw.substr(1, raw.size() - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      continue;
    }
    const char e = body[++i];
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case '\'': out.push_back('\''); break;
      default:
        // Numeric and unicode escapes are kept verbatim; case names using
        // them are matched on their source spelling.
        out.push_back('\\');
        out.push_back(e);
    }
  }
  return out;
}

std::string subtest_name(std::string_view name) {
  std::string out(name);
  for (char& c : out) {
    if (c == ' ') c = '_';
  }
  return out;
}

}  // namespace flakyfix::go
