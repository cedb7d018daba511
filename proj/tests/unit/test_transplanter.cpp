#include <gtest/gtest.h>

#include "flakyfix/errors.hpp"
#include "flakyfix/go_tables.hpp"
#include "flakyfix/simplifier.hpp"
#include "flakyfix/transplanter.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

namespace {

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

}  // namespace

TEST(Transplant, IdentityOnUnchangedFix) {
  const std::string text = slurp(fixtures() / "tables/map_key_test.go");
  for (const std::string c : {"small", "at limit", "large"}) {
    const auto s = simplify_test(text, "TestMapKey", c);
    EXPECT_EQ(transplant(s.t_simp, s.t_simp, s.t_orig, c), s.t_orig) << c;
  }
}

TEST(Transplant, CaseEditLandsOnTargetOnly) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  const auto s = simplify_test(text, "TestKeyedSlice", "one");
  const auto fixed = replace_once(s.t_simp, "in: 1, want: 2", "in: 1, want: 1 + 1");
  const auto merged = transplant(s.t_simp, fixed, s.t_orig, "one");
  EXPECT_EQ(merged, replace_once(s.t_orig, "in: 1, want: 2", "in: 1, want: 1 + 1"));
}

TEST(Transplant, BodyEditIsKept) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  const auto s = simplify_test(text, "TestKeyedSlice", "zero");
  const auto fixed = replace_once(s.t_simp, "t.Run(tt.name, func(t *testing.T) {",
                                  "t.Run(tt.name, func(t *testing.T) {\n\t\t\tt.Parallel()");
  const auto merged = transplant(s.t_simp, fixed, s.t_orig, "zero");
  EXPECT_EQ(merged, replace_once(s.t_orig, "t.Run(tt.name, func(t *testing.T) {",
                                 "t.Run(tt.name, func(t *testing.T) {\n\t\t\tt.Parallel()"));
}

TEST(Transplant, InlineSubtests) {
  const std::string text = slurp(fixtures() / "tables/inline_subtests_test.go");
  const auto s = simplify_test(text, "TestInline", "len");
  ASSERT_TRUE(s.simplified);
  const auto fixed = replace_once(s.t_simp, "t.Fatal(\"len\")", "t.Fatalf(\"len %d\", len(shared))");
  EXPECT_EQ(transplant(s.t_simp, fixed, s.t_orig, "len"),
            replace_once(s.t_orig, "t.Fatal(\"len\")", "t.Fatalf(\"len %d\", len(shared))"));
}

TEST(Transplant, Errors) {
  const std::string text = slurp(fixtures() / "tables/keyed_slice_test.go");
  const auto s = simplify_test(text, "TestKeyedSlice", "one");
  EXPECT_THROW(transplant(s.t_simp, "func TestKeyedSlice(t *testing.T) {\n}", s.t_orig, "one"),
               TableNotFound);
  const auto broken = replace_once(s.t_simp, "want: 2},", "want: 2},\n\t\t{name: \"x\",");
  EXPECT_ANY_THROW(transplant(s.t_simp, broken, s.t_orig, "one"));
}

TEST(Restore, ReferencedComeBackOthersGo) {
  const std::string text =
      "func TestX(t *testing.T) {\n"
      "// FLAKYGUARD-RESTORE \tkeep := 1\n"
      "// FLAKYGUARD-RESTORE \tdrop := 2\n"
      "\t_ = keep\n"
      "}\n";
  EXPECT_EQ(restore_neutralized(text), "func TestX(t *testing.T) {\n\tkeep := 1\n\t_ = keep\n}\n");
}

TEST(Restore, GroupedDeclaration) {
  const std::string text =
      "func TestX(t *testing.T) {\n"
      "// FLAKYGUARD-RESTORE \tf := func() int {\n"
      "// FLAKYGUARD-RESTORE \t\treturn 1\n"
      "// FLAKYGUARD-RESTORE \t}\n"
      "\t_ = f()\n"
      "}\n";
  EXPECT_EQ(restore_neutralized(text),
            "func TestX(t *testing.T) {\n\tf := func() int {\n\t\treturn 1\n\t}\n\t_ = f()\n}\n");
}
