#pragma once

#include <string>
#include <string_view>

namespace flakyfix {

// Line-based unified diff of one file, `a/` and `b/` prefixed. Empty when
// the texts are equal.
std::string unified_diff(std::string_view before, std::string_view after, const std::string& path,
                         int context = 3);

}  // namespace flakyfix
