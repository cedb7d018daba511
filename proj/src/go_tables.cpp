#include "flakyfix/go_tables.hpp"

#include "flakyfix/errors.hpp"
#include "flakyfix/go_syntax.hpp"

namespace flakyfix {

namespace {

constexpr std::string_view kPrefix = "package p\n";

struct Finder {
  const go::SyntaxTree& tree;
  std::size_t shift = kPrefix.size();

  ByteSpan span(TSNode n) const {
    return {ts_node_start_byte(n) - shift, ts_node_end_byte(n) - shift};
  }
  std::string text(TSNode n) const { return std::string(tree.text(n)); }

  // Innermost expression inside literal_element wrappers.
  static TSNode unwrap(TSNode n) {
    while (!ts_node_is_null(n) && go::is_type(n, "literal_element") &&
           ts_node_named_child_count(n) == 1) {
      n = ts_node_named_child(n, 0);
    }
    return n;
  }

  // literal_value of an element: {..}, T{..} or &T{..}.
  static TSNode element_body(TSNode n) {
    n = unwrap(n);
    if (go::is_type(n, "unary_expression")) n = go::field(n, "operand");
    if (go::is_type(n, "composite_literal")) n = go::field(n, "body");
    return go::is_type(n, "literal_value") ? n : TSNode{};
  }

  std::vector<TSNode> elements(TSNode literal_value) const {
    std::vector<TSNode> out;
    for (TSNode c : go::named_children(literal_value)) {
      if (!go::is_type(c, "comment")) out.push_back(c);
    }
    return out;
  }

  std::optional<std::string> string_of(TSNode n) const {
    return go::string_literal_value(tree, unwrap(n));
  }

  // Declared position of `field` in an inline struct type, if any.
  std::optional<std::size_t> field_index(TSNode type, const std::string& field) const {
    TSNode st{};
    go::walk(type, [&](TSNode n) {
      if (!ts_node_is_null(st)) return false;
      if (go::is_type(n, "struct_type")) {
        st = n;
        return false;
      }
      return true;
    });
    if (ts_node_is_null(st)) return std::nullopt;
    std::size_t index = 0;
    std::optional<std::size_t> found;
    go::walk(st, [&](TSNode n) {
      if (!go::is_type(n, "field_declaration")) return true;
      std::size_t names = 0;
      for (TSNode c : go::named_children(n)) {
        if (!go::is_type(c, "field_identifier")) continue;
        if (!found && text(c) == field) found = index;
        ++index;
        ++names;
      }
      if (names == 0) ++index;  // embedded field
      return false;
    });
    return found;
  }

  std::optional<std::string> name_in_struct(TSNode body, const std::string& field,
                                            std::optional<std::size_t> position) const {
    const auto els = elements(body);
    for (TSNode e : els) {
      if (!go::is_type(e, "keyed_element")) continue;
      if (text(unwrap(go::field(e, "key"))) == field) return string_of(go::field(e, "value"));
    }
    if (position && *position < els.size() && !go::is_type(els[*position], "keyed_element")) {
      return string_of(els[*position]);
    }
    return std::nullopt;
  }

  // The composite literal `name` was initialised with before `before`.
  TSNode declared_literal(TSNode body, const std::string& name, std::uint32_t before) const {
    TSNode found{};
    go::walk(body, [&](TSNode n) {
      if (ts_node_start_byte(n) >= before) return false;
      const auto kind = go::type_of(n);
      if (kind == "func_literal") return false;
      TSNode left{}, right{};
      if (kind == "short_var_declaration" || kind == "assignment_statement") {
        left = go::field(n, "left");
        right = go::field(n, "right");
      } else if (kind == "var_spec") {
        right = go::field(n, "value");
        left = n;
      } else {
        return true;
      }
      if (ts_node_is_null(right)) return true;
      std::vector<TSNode> names;
      for (TSNode c : go::named_children(left)) {
        if (go::is_type(c, "identifier")) names.push_back(c);
      }
      const auto values = go::named_children(right);
      for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
        if (text(names[i]) == name && go::is_type(values[i], "composite_literal")) found = values[i];
      }
      return false;
    });
    return found;
  }

  // Call arguments without interleaved comments.
  static std::vector<TSNode> arguments(TSNode call) {
    std::vector<TSNode> out;
    for (TSNode c : go::named_children(go::field(call, "arguments"))) {
      if (!go::is_type(c, "comment")) out.push_back(c);
    }
    return out;
  }

  static bool is_run_call(TSNode call) {
    if (!go::is_type(call, "call_expression")) return false;
    TSNode fn = go::field(call, "function");
    if (!go::is_type(fn, "selector_expression")) return false;
    return arguments(call).size() == 2 &&
           go::field(fn, "field").id != nullptr &&
           go::type_of(go::field(fn, "field")) == "field_identifier";
  }

  bool is_named_run(TSNode call) const {
    return is_run_call(call) && text(go::field(go::field(call, "function"), "field")) == "Run";
  }

  std::optional<CaseTable> range_table(TSNode body, TSNode loop) const {
    TSNode clause{};
    for (TSNode c : go::named_children(loop)) {
      if (go::is_type(c, "range_clause")) clause = c;
    }
    if (ts_node_is_null(clause)) return std::nullopt;
    std::vector<std::string> vars;
    for (TSNode c : go::named_children(go::field(clause, "left"))) vars.push_back(text(c));
    if (vars.empty()) return std::nullopt;
    const std::string key = vars[0];
    const std::string value = vars.size() > 1 ? vars[1] : "";

    // The subtest name: tt.<field> or the map key.
    std::optional<std::string> field;
    bool by_key = false;
    go::walk(go::field(loop, "body"), [&](TSNode n) {
      if (field || by_key) return false;
      if (!is_named_run(n)) return true;
      TSNode arg = arguments(n)[0];
      if (go::is_type(arg, "selector_expression") && !value.empty() &&
          text(go::field(arg, "operand")) == value) {
        field = text(go::field(arg, "field"));
      } else if (go::is_type(arg, "identifier") && text(arg) == key && key != "_") {
        by_key = true;
      }
      return false;
    });
    if (!field && !by_key) return std::nullopt;

    TSNode literal = go::field(clause, "right");
    if (go::is_type(literal, "identifier")) {
      literal = declared_literal(body, text(literal), ts_node_start_byte(loop));
    }
    if (!go::is_type(literal, "composite_literal")) return std::nullopt;
    TSNode type = go::field(literal, "type");
    const bool is_map = go::is_type(type, "map_type");
    TSNode lit_body = go::field(literal, "body");
    std::optional<std::size_t> position;
    if (field) position = field_index(type, *field);

    CaseTable table;
    table.shape = TableShape::range_literal;
    table.span = span(lit_body);
    for (TSNode e : elements(lit_body)) {
      std::optional<std::string> name;
      if (is_map) {
        if (!go::is_type(e, "keyed_element")) return std::nullopt;
        if (by_key) {
          name = string_of(go::field(e, "key"));
        } else if (TSNode v = element_body(go::field(e, "value")); !ts_node_is_null(v)) {
          name = name_in_struct(v, *field, position);
        }
      } else if (field) {
        if (TSNode v = element_body(e); !ts_node_is_null(v)) name = name_in_struct(v, *field, position);
      }
      if (!name) return std::nullopt;
      table.entries.push_back({*name, span(e)});
    }
    if (table.entries.empty()) return std::nullopt;
    return table;
  }

  std::optional<CaseTable> inline_table(TSNode body) const {
    std::optional<CaseTable> result;
    bool rejected = false;
    go::walk(body, [&](TSNode n) {
      if (result || rejected) return false;
      if (!go::is_type(n, "statement_list")) return true;
      std::vector<TSNode> stmts;
      for (TSNode c : go::named_children(n)) {
        if (!go::is_type(c, "comment")) stmts.push_back(c);
      }
      std::vector<std::size_t> runs;
      for (std::size_t i = 0; i < stmts.size(); ++i) {
        if (!go::is_type(stmts[i], "expression_statement")) continue;
        TSNode call = ts_node_named_child(stmts[i], 0);
        if (!is_named_run(call)) continue;
        if (!string_of(arguments(call)[0])) continue;
        runs.push_back(i);
      }
      if (runs.empty()) return true;
      if (runs.back() - runs.front() + 1 != runs.size()) {
        rejected = true;
        return false;
      }
      CaseTable table;
      table.shape = TableShape::inline_subtests;
      table.span = {span(stmts[runs.front()]).start, span(stmts[runs.back()]).end};
      for (const std::size_t i : runs) {
        TSNode call = ts_node_named_child(stmts[i], 0);
        table.entries.push_back(
            {*string_of(arguments(call)[0]), span(stmts[i])});
      }
      result = std::move(table);
      return false;
    });
    return result;
  }
};

}  // namespace

std::optional<CaseTable> find_case_table(std::string_view function_text) {
  auto tree = go::SyntaxTree::parse(std::string(kPrefix) + std::string(function_text));
  if (tree.has_error()) return std::nullopt;
  TSNode fn{};
  for (TSNode c : go::named_children(tree.root())) {
    if (go::is_type(c, "function_declaration") || go::is_type(c, "method_declaration")) fn = c;
  }
  if (ts_node_is_null(fn)) return std::nullopt;
  TSNode body = go::field(fn, "body");
  if (ts_node_is_null(body)) return std::nullopt;
  Finder finder{tree};

  std::optional<CaseTable> table;
  go::walk(body, [&](TSNode n) {
    if (table) return false;
    if (go::is_type(n, "for_statement")) table = finder.range_table(body, n);
    return !table.has_value();
  });
  if (table) return table;
  return finder.inline_table(body);
}

std::size_t match_case(const CaseTable& table, const std::string& case_name) {
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    if (table.entries[i].name == case_name) return i;
  }
  const std::string wanted = go::subtest_name(case_name);
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    if (go::subtest_name(table.entries[i].name) == wanted) return i;
  }
  std::optional<std::size_t> unique;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    if (go::subtest_name(table.entries[i].name).find(wanted) != std::string::npos) {
      if (unique) throw CaseNotFound("case name '" + case_name + "' is ambiguous");
      unique = i;
    }
  }
  if (!unique) throw CaseNotFound("no case named '" + case_name + "'");
  return *unique;
}

}  // namespace flakyfix
