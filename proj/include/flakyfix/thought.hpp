#pragma once

#include <array>
#include <string>
#include <string_view>

namespace flakyfix {

class RootCauseCategory {
 public:
  enum class Kind {
    schedule_randomness,
    unordered_collection_iteration,
    timestamp_discrepancy,
    state_pollution,
    time_dependent,
    other,
  };

  RootCauseCategory() = default;
  static RootCauseCategory of(Kind kind);
  static RootCauseCategory other(std::string label);
  // Maps free text onto the taxonomy through an alias table; anything
  // unrecognized becomes other(text).
  static RootCauseCategory normalize(std::string_view text);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  // Stable slug, e.g. "state-pollution" or "other(sampling size)".
  std::string to_string() const;
  bool operator==(const RootCauseCategory&) const = default;

 private:
  Kind kind_ = Kind::other;
  std::string label_ = "unspecified";
};

struct CategoryInfo {
  RootCauseCategory::Kind kind;
  std::string_view slug;
  std::string_view title;
  std::string_view description;
};

// Known categories in prevalence order, with the one-line descriptions shown
// to the model.
const std::array<CategoryInfo, 6>& category_taxonomy();

struct Thought {
  RootCauseCategory category;
  std::string explanation;
  std::string plan;
};

}  // namespace flakyfix
