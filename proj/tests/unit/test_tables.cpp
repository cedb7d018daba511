#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/simplifier.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

CaseTable table_of(const std::string& file, const std::string& func) {
  const std::string text = slurp(fixtures() / "tables" / file);
  const auto fn = find_function(text, func);
  EXPECT_TRUE(fn.has_value());
  auto table = find_case_table(fn->decl_text);
  EXPECT_TRUE(table.has_value()) << file;
  return table.value_or(CaseTable{});
}

std::vector<std::string> names(const CaseTable& t) {
  std::vector<std::string> out;
  for (const auto& e : t.entries) out.push_back(e.name);
  return out;
}

}  // namespace

TEST(CaseTables, Shapes) {
  EXPECT_EQ(names(table_of("keyed_slice_test.go", "TestKeyedSlice")),
            (std::vector<std::string>{"zero", "one", "from base"}));
  EXPECT_EQ(names(table_of("positional_slice_test.go", "TestPositional")),
            (std::vector<std::string>{"lower", "already lower", "mixed", "empty"}));
  EXPECT_EQ(names(table_of("map_key_test.go", "TestMapKey")),
            (std::vector<std::string>{"small", "at limit", "large"}));
  EXPECT_EQ(names(table_of("map_value_field_test.go", "TestMapValueField")),
            (std::vector<std::string>{"first", "second", "third"}));
  const auto inl = table_of("inline_subtests_test.go", "TestInline");
  EXPECT_EQ(inl.shape, TableShape::inline_subtests);
  EXPECT_EQ(names(inl), (std::vector<std::string>{"sum", "len", "empty"}));
  EXPECT_EQ(names(table_of("assigned_test.go", "TestAssigned")),
            (std::vector<std::string>{"origin", "diag", "axis"}));
  EXPECT_EQ(names(table_of("single_line_test.go", "TestSingleLine")),
            (std::vector<std::string>{"a", "b", "c"}));
}

TEST(CaseTables, EntrySpansCoverElements) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  const auto fn = find_function(text, "TestKeyedSlice");
  const auto t = find_case_table(fn->decl_text);
  ASSERT_TRUE(t);
  EXPECT_EQ(fn->decl_text.substr(t->entries[1].span.start, t->entries[1].span.size()),
            "{name: \"one\", in: 1, want: 2}");
  EXPECT_EQ(fn->decl_text[t->span.start], '{');
  EXPECT_EQ(fn->decl_text[t->span.end - 1], '}');
}

TEST(CaseTables, NoTable) {
  EXPECT_FALSE(find_case_table("func TestPlain(t *testing.T) {\n\tt.Log(1)\n}").has_value());
}

TEST(CaseTables, MatchCase) {
  const auto t = table_of("positional_slice_test.go", "TestPositional");
  EXPECT_EQ(match_case(t, "mixed"), 2u);
  EXPECT_EQ(match_case(t, "already_lower"), 1u);
  EXPECT_EQ(match_case(t, "empt"), 3u);
  EXPECT_THROW(match_case(t, "nope"), CaseNotFound);
  // "lower" is both exact and a substring of another; exact wins.
  EXPECT_EQ(match_case(t, "lower"), 0u);
  EXPECT_THROW(match_case(t, "e"), CaseNotFound);
}
