#include <gtest/gtest.h>

#include <random>

#include "flakyfix/edits.hpp"
#include "flakyfix/errors.hpp"

using namespace flakyfix;

TEST(Edits, AppliesAgainstOriginalOffsets) {
  const std::string src = "alpha beta gamma";
  const std::vector<Edit> edits = {{{0, 5}, "A"}, {{6, 10}, ""}, {{16, 16}, "!"}};
  EXPECT_EQ(apply_edits(src, edits), "A  gamma!");
}

TEST(Edits, OrderDoesNotMatter) {
  const std::string src = "0123456789";
  std::vector<Edit> edits = {{{8, 9}, "x"}, {{1, 3}, "yy"}, {{4, 4}, "+"}};
  const auto once = apply_edits(src, edits);
  std::reverse(edits.begin(), edits.end());
  EXPECT_EQ(apply_edits(src, edits), once);
  EXPECT_EQ(once, "0yy3+4567x9");
}

TEST(Edits, Rejections) {
  EXPECT_THROW(apply_edits("abc", {{{1, 3}, ""}, {{2, 3}, ""}}), OverlappingEdits);
  EXPECT_THROW(apply_edits("abc", {{{1, 1}, "a"}, {{1, 1}, "b"}}), OverlappingEdits);
  EXPECT_THROW(apply_edits("abc", {{{2, 4}, ""}}), SpanOutOfRange);
  EXPECT_THROW(apply_edits("abc", {{{2, 1}, ""}}), SpanOutOfRange);
  EXPECT_EQ(apply_edits("abc", {}), "abc");
}

TEST(Edits, AdjacentSpansAreFine) {
  EXPECT_EQ(apply_edits("abcd", {{{0, 2}, "X"}, {{2, 4}, "Y"}}), "XY");
}
