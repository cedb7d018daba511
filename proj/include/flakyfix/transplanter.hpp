#pragma once

#include <string>
#include <string_view>

namespace flakyfix {

// Puts a fix made on the simplified test back into the full original:
// T_orig's case table replaces the one in T_simp_fixed, then the target case
// inside it is swapped for the fixed case. Throws TableNotFound,
// CaseNotFound and MergeParseError.
std::string transplant(std::string_view t_simp, std::string_view t_simp_fixed,
                       std::string_view t_orig, const std::string& target_case);

// Uncomments marker lines whose declared names are still referenced and
// drops the rest, so no marker survives.
std::string restore_neutralized(std::string_view text);

}  // namespace flakyfix
