#include "flakyfix/edits.hpp"

#include <algorithm>

#include "flakyfix/errors.hpp"

namespace flakyfix {

std::string apply_edits(std::string_view source, std::vector<Edit> edits) {
  for (const auto& e : edits) {
    if (e.span.start > e.span.end || e.span.end > source.size()) {
      throw SpanOutOfRange("edit [" + std::to_string(e.span.start) + "," +
                           std::to_string(e.span.end) + ") outside " +
                           std::to_string(source.size()) + " bytes");
    }
  }
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    return a.span.start != b.span.start ? a.span.start > b.span.start : a.span.end > b.span.end;
  });
  for (std::size_t i = 1; i < edits.size(); ++i) {
    const auto& later = edits[i - 1];
    const auto& earlier = edits[i];
    if (earlier.span.end > later.span.start || earlier.span.start == later.span.start) {
      throw OverlappingEdits("edits overlap at offset " + std::to_string(later.span.start));
    }
  }
  std::string out(source);
  for (const auto& e : edits) out.replace(e.span.start, e.span.size(), e.replacement);
  return out;
}

}  // namespace flakyfix
