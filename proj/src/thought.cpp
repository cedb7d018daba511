#include "flakyfix/thought.hpp"

#include <cctype>
#include <utility>
#include <vector>

namespace flakyfix {

namespace {

using Kind = RootCauseCategory::Kind;

std::string squash(std::string_view text) {
  std::string out;
  bool space = false;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      if (space && !out.empty()) out.push_back(' ');
      out.push_back(static_cast<char>(std::tolower(c)));
      space = false;
    } else {
      space = true;
    }
  }
  return out;
}

const std::vector<std::pair<std::string_view, Kind>>& aliases() {
  static const std::vector<std::pair<std::string_view, Kind>> table = {
      {"schedule randomness", Kind::schedule_randomness},
      {"scheduling randomness", Kind::schedule_randomness},
      {"schedule", Kind::schedule_randomness},
      {"scheduling", Kind::schedule_randomness},
      {"concurrency", Kind::schedule_randomness},
      {"race condition", Kind::schedule_randomness},
      {"data race", Kind::schedule_randomness},
      {"goroutine scheduling", Kind::schedule_randomness},
      {"async wait", Kind::schedule_randomness},
      {"asynchronous wait", Kind::schedule_randomness},
      {"select randomness", Kind::schedule_randomness},
      {"random iteration of unordered collections", Kind::unordered_collection_iteration},
      {"unordered collection iteration", Kind::unordered_collection_iteration},
      {"unordered collections", Kind::unordered_collection_iteration},
      {"unordered collection", Kind::unordered_collection_iteration},
      {"map iteration order", Kind::unordered_collection_iteration},
      {"map iteration", Kind::unordered_collection_iteration},
      {"map order", Kind::unordered_collection_iteration},
      {"iteration order", Kind::unordered_collection_iteration},
      {"random iteration", Kind::unordered_collection_iteration},
      {"timestamp discrepancy", Kind::timestamp_discrepancy},
      {"timestamp mismatch", Kind::timestamp_discrepancy},
      {"timestamp", Kind::timestamp_discrepancy},
      {"state pollution", Kind::state_pollution},
      {"test pollution", Kind::state_pollution},
      {"shared state", Kind::state_pollution},
      {"global state", Kind::state_pollution},
      {"environment pollution", Kind::state_pollution},
      {"test order dependency", Kind::state_pollution},
      {"order dependency", Kind::state_pollution},
      {"time dependent flakiness", Kind::time_dependent},
      {"time dependent", Kind::time_dependent},
      {"time dependency", Kind::time_dependent},
      {"wall clock", Kind::time_dependent},
      {"clock dependency", Kind::time_dependent},
  };
  return table;
}

bool contains_words(const std::string& haystack, std::string_view needle) {
  const std::string padded = " " + haystack + " ";
  return padded.find(" " + std::string(needle) + " ") != std::string::npos;
}

}  // namespace

RootCauseCategory RootCauseCategory::of(Kind kind) {
  RootCauseCategory c;
  c.kind_ = kind;
  c.label_.clear();
  if (kind == Kind::other) c.label_ = "unspecified";
  return c;
}

RootCauseCategory RootCauseCategory::other(std::string label) {
  RootCauseCategory c;
  c.kind_ = Kind::other;
  c.label_ = label.empty() ? "unspecified" : std::move(label);
  return c;
}

RootCauseCategory RootCauseCategory::normalize(std::string_view text) {
  const std::string key = squash(text);
  for (const auto& info : category_taxonomy()) {
    if (info.kind != Kind::other && key == squash(info.slug)) return of(info.kind);
  }
  for (const auto& [alias, kind] : aliases()) {
    if (key == alias) return of(kind);
  }
  // Longest alias occurring as whole words wins, so "map iteration order
  // bug" still lands on the collection category.
  std::size_t best_len = 0;
  Kind best = Kind::other;
  for (const auto& [alias, kind] : aliases()) {
    if (alias.size() > best_len && contains_words(key, alias)) {
      best_len = alias.size();
      best = kind;
    }
  }
  if (best_len > 0) return of(best);
  std::string label(text);
  while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back()))) label.pop_back();
  std::size_t lead = 0;
  while (lead < label.size() && std::isspace(static_cast<unsigned char>(label[lead]))) ++lead;
  label = label.substr(lead);
  if (key == "other" || key == "others") label = "unspecified";
  return other(label);
}

std::string RootCauseCategory::to_string() const {
  for (const auto& info : category_taxonomy()) {
    if (info.kind == kind_ && kind_ != Kind::other) return std::string(info.slug);
  }
  return "other(" + label_ + ")";
}

const std::array<CategoryInfo, 6>& category_taxonomy() {
  static const std::array<CategoryInfo, 6> table = {{
      {Kind::schedule_randomness, "schedule-randomness", "Schedule randomness",
       "Outcome depends on goroutine interleaving: unsynchronized goroutines, "
       "select over several ready channels, or asynchronous work the test does not wait for."},
      {Kind::unordered_collection_iteration, "unordered-collection-iteration",
       "Random iteration of unordered collections",
       "The test relies on an element order that map or set iteration does not guarantee."},
      {Kind::timestamp_discrepancy, "timestamp-discrepancy", "Timestamp discrepancy",
       "Expected and actual values take time.Now() at different moments, so timestamp "
       "fields differ."},
      {Kind::state_pollution, "state-pollution", "State pollution",
       "Another test mutates shared state (globals, environment variables, files, databases) "
       "that this test reads."},
      {Kind::time_dependent, "time-dependent", "Time-dependent flakiness",
       "Behavior depends on the wall clock, e.g. a cutoff or truncation computed at two "
       "different instants."},
      {Kind::other, "other", "Others",
       "None of the above; name a new category in a few words."},
  }};
  return table;
}

}  // namespace flakyfix
