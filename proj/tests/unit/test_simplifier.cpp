#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/simplifier.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

TEST(Simplify, KeepsOnlyTarget) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  const auto s = simplify_test(text, "TestKeyedSlice", "one");
  ASSERT_TRUE(s.simplified);
  EXPECT_EQ(s.target_case, "one");
  EXPECT_EQ(s.tracker.size(), 2u);
  EXPECT_EQ(s.t_simp.find("\"zero\""), std::string::npos);
  EXPECT_EQ(s.t_simp.find("\"from base\""), std::string::npos);
  EXPECT_NE(s.t_simp.find("\t\t{name: \"one\", in: 1, want: 2},\n\t}"), std::string::npos);
  EXPECT_EQ(apply_edits(s.t_orig, s.tracker), s.t_simp);
  EXPECT_EQ(text.substr(s.function_span.start, s.function_span.size()), s.t_orig);
}

TEST(Simplify, LastElementWithoutComma) {
  const std::string text = slurp(fixtures() / "tables/no_trailing_comma_test.go");
  const auto s = simplify_test(text, "TestNoTrailingComma", "no");
  const auto table = find_case_table(s.t_simp);
  ASSERT_TRUE(table);
  ASSERT_EQ(table->entries.size(), 1u);
  EXPECT_EQ(table->entries[0].name, "no");
  const auto again = simplify_test(text, "TestNoTrailingComma", "maybe");
  EXPECT_EQ(find_case_table(again.t_simp)->entries.size(), 1u);
}

TEST(Simplify, SingleLineTable) {
  const std::string text = slurp(fixtures() / "tables/single_line_test.go");
  const auto s = simplify_test(text, "TestSingleLine", "b");
  EXPECT_NE(s.t_simp.find("{{name: \"b\", v: 2}}"), std::string::npos) << s.t_simp;
}

TEST(Simplify, NoTableLeavesTestAlone) {
  const std::string text = "package p\n\nfunc TestX(t *testing.T) {\n\tt.Log(1)\n}\n";
  const auto s = simplify_test(text, "TestX", "");
  EXPECT_FALSE(s.simplified);
  EXPECT_EQ(s.t_simp, s.t_orig);
  EXPECT_FALSE(s.note.empty());
}

TEST(Simplify, UnknownCase) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  EXPECT_THROW(simplify_test(text, "TestKeyedSlice", "eleven"), CaseNotFound);
}

TEST(Neutralize, CommentAndStripAreInverse) {
  const std::string text = "a\n\tb := 1\n\tc\nd\n";
  const auto commented = comment_lines(text, 2, 3);
  EXPECT_EQ(commented, "a\n// FLAKYGUARD-RESTORE \tb := 1\n// FLAKYGUARD-RESTORE \tc\nd\n");
  EXPECT_EQ(strip_markers(commented), text);
}

TEST(Neutralize, DeclarationLines) {
  const std::string text =
      "package p\n"
      "func f() {\n"
      "\tx := 1\n"
      "\tvar (\n"
      "\t\ty = 2\n"
      "\t\tz = func() int {\n"
      "\t\t\treturn 3\n"
      "\t\t}\n"
      "\t)\n"
      "}\n";
  EXPECT_EQ(declaration_lines(text, 3, 2), (std::pair<std::uint32_t, std::uint32_t>{3, 3}));
  EXPECT_EQ(declaration_lines(text, 5, 3), (std::pair<std::uint32_t, std::uint32_t>{5, 5}));
  EXPECT_EQ(declaration_lines(text, 6, 3), (std::pair<std::uint32_t, std::uint32_t>{6, 8}));
  EXPECT_FALSE(declaration_lines(text, 2, 1).has_value());
}

TEST(NeutralizeLive, UnusedCaseHelpersAreCommented) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir tmp("neutralize");
  copy_tree(fixtures() / "tables", tmp.path());
  const std::string file = "grouped_helpers_test.go";
  const std::string text = slurp(tmp / file);
  const auto s = simplify_test(text, "TestGroupedHelpers", "inline");
  spit(tmp / file, text.substr(0, s.function_span.start) + s.t_simp + text.substr(s.function_span.end));
  GoAdapter adapter;
  const auto r = neutralize_unused(adapter, tmp.path(), file);
  EXPECT_GE(r.commented_lines.size(), 2u);
  EXPECT_TRUE(adapter.compile(tmp.path()).empty());
  EXPECT_NE(r.text.find("// FLAKYGUARD-RESTORE \t\topen   = func() error { return nil }"),
            std::string::npos)
      << r.text;
}

TEST(NeutralizeLive, OtherErrorsDiverge) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir tmp("diverge");
  copy_tree(fixtures() / "tables", tmp.path());
  const std::string file = "keyed_slice_test.go";
  std::string text = slurp(tmp / file);
  text.replace(text.find("tt.in * 2"), 9, "tt.in * undefinedName");
  spit(tmp / file, text);
  GoAdapter adapter;
  EXPECT_THROW(neutralize_unused(adapter, tmp.path(), file), NeutralizationDiverged);
}
