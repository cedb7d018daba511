#include "flakyfix/subject.hpp"

#include <stdexcept>

namespace flakyfix {

std::string TestId::render() const { return target + "/" + func + "/" + case_name; }

std::string SubjectFunction::unqualified_name() const {
  const auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::timeout: return "timeout";
    case Verdict::build_error: return "build-error";
  }
  return "unknown";
}

std::string_view to_string(RunScope scope) {
  return scope == RunScope::case_scope ? "case" : "target";
}

RunScope parse_scope(std::string_view text) {
  if (text == "case") return RunScope::case_scope;
  if (text == "target") return RunScope::target;
  throw std::invalid_argument("unknown scope: " + std::string(text));
}

}  // namespace flakyfix
