#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tree_sitter/api.h>

namespace flakyfix::go {

struct SourcePoint {
  std::uint32_t line = 0;    // 1-based
  std::uint32_t column = 0;  // 1-based, in bytes
};

// Owns a Go source buffer together with its tree-sitter parse tree. Nodes
// handed out by the tree stay valid only while the tree is alive.
class SyntaxTree {
 public:
  static SyntaxTree parse(std::string source);

  SyntaxTree(SyntaxTree&&) noexcept = default;
  SyntaxTree& operator=(SyntaxTree&&) noexcept = default;

  TSNode root() const;
  const std::string& source() const { return source_; }
  std::string_view text(TSNode node) const;

  bool has_error() const;
  // Location of the first ERROR or MISSING node in document order.
  std::optional<SourcePoint> first_error() const;

 private:
  struct TreeDeleter {
    void operator()(TSTree* tree) const { ts_tree_delete(tree); }
  };
  SyntaxTree(std::string source, TSTree* tree);

  std::string source_;
  std::unique_ptr<TSTree, TreeDeleter> tree_;
};

std::string_view type_of(TSNode node);
bool is_type(TSNode node, std::string_view type);
TSNode field(TSNode node, std::string_view name);
std::vector<TSNode> named_children(TSNode node);
std::uint32_t start_line(TSNode node);  // 1-based
std::uint32_t end_line(TSNode node);    // 1-based, line holding the last byte

// Preorder walk. Returning false from the visitor skips the node's subtree.
void walk(TSNode node, const std::function<bool(TSNode)>& visit);

// Decodes an interpreted or raw Go string literal node. Returns nullopt for
// any other node kind.
std::optional<std::string> string_literal_value(const SyntaxTree& tree, TSNode node);

// Go's subtest name rewriting: spaces become underscores.
std::string subtest_name(std::string_view name);

}  // namespace flakyfix::go
