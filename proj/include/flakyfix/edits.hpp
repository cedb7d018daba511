#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flakyfix/subject.hpp"

namespace flakyfix {

enum class EditTag { removal, neutralize, other };

struct Edit {
  ByteSpan span;  // against the pre-edit text
  std::string replacement;
  EditTag tag = EditTag::other;
  bool operator==(const Edit&) const = default;
};

// Applies edits from the highest start offset down so every span keeps
// referring to the original bytes. Zero-width inserts at the same offset are
// rejected as overlapping. Throws OverlappingEdits and SpanOutOfRange.
std::string apply_edits(std::string_view source, std::vector<Edit> edits);

}  // namespace flakyfix
