#include <gtest/gtest.h>

#include <random>

#include "flakyfix/process.hpp"
#include "flakyfix/unified_diff.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

TEST(UnifiedDiff, EqualTextsGiveNothing) {
  EXPECT_EQ(unified_diff("a\nb\n", "a\nb\n", "x.go"), "");
}

TEST(UnifiedDiff, SingleChange) {
  const auto d = unified_diff("a\nb\nc\n", "a\nB\nc\n", "pkg/x_test.go");
  EXPECT_EQ(d,
            "--- a/pkg/x_test.go\n"
            "+++ b/pkg/x_test.go\n"
            "@@ -1,3 +1,3 @@\n"
            " a\n"
            "-b\n"
            "+B\n"
            " c\n");
}

TEST(UnifiedDiff, MissingFinalNewline) {
  const auto d = unified_diff("a\nb", "a\nc", "f");
  EXPECT_NE(d.find("\\ No newline at end of file"), std::string::npos) << d;
}

TEST(UnifiedDiff, RandomTextsApplyWithGit) {
  std::mt19937 rng(7);
  for (int round = 0; round < 40; ++round) {
    std::vector<std::string> lines;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) lines.push_back("line" + std::to_string(rng() % 12));
    auto after = lines;
    const int edits = 1 + static_cast<int>(rng() % 5);
    for (int e = 0; e < edits; ++e) {
      const auto at = after.empty() ? 0 : rng() % (after.size() + 1);
      switch (rng() % 3) {
        case 0: after.insert(after.begin() + at, "new" + std::to_string(e)); break;
        case 1: if (at < after.size()) after.erase(after.begin() + at); break;
        default: if (at < after.size()) after[at] = "changed" + std::to_string(e);
      }
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& l : v) s += l + "\n";
      return s;
    };
    const std::string before_text = join(lines), after_text = join(after);
    const auto diff = unified_diff(before_text, after_text, "f.txt");
    if (before_text == after_text) {
      EXPECT_TRUE(diff.empty());
      continue;
    }
    TempDir tmp("diff");
    spit(tmp / "f.txt", before_text);
    spit(tmp / "change.diff", diff);
    const auto r = run_process({"git", "apply", "change.diff"}, tmp.path(), {}, 30.0);
    ASSERT_EQ(r.exit_code, 0) << r.err << "\n" << diff;
    EXPECT_EQ(slurp(tmp / "f.txt"), after_text) << diff;
  }
}
