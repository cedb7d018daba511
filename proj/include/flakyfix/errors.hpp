#pragma once

#include <stdexcept>
#include <string>

namespace flakyfix {

// Root of every error the pipeline raises on purpose. Each subclass names one
// documented failure path so callers can map it to a status or exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FLAKYFIX_ERROR(Name)            \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// subject adapter
FLAKYFIX_ERROR(ToolchainMissing);
FLAKYFIX_ERROR(ToolchainCrashed);
FLAKYFIX_ERROR(SelectorNotFound);

class ParseError : public Error {
 public:
  ParseError(std::string path, unsigned line, unsigned column)
      : Error(path + ":" + std::to_string(line) + ":" + std::to_string(column) +
              ": syntax error"),
        path_(std::move(path)),
        line_(line),
        column_(column) {}
  const std::string& path() const { return path_; }
  unsigned line() const { return line_; }
  unsigned column() const { return column_; }

 private:
  std::string path_;
  unsigned line_;
  unsigned column_;
};

// reproducer
FLAKYFIX_ERROR(MalformedTicket);
FLAKYFIX_ERROR(ExtractionFailed);
FLAKYFIX_ERROR(NoStatementAtLine);

// instrumenter
FLAKYFIX_ERROR(InjectionConflict);

// dcg builder
class MalformedLine : public Error {
 public:
  MalformedLine(std::size_t line_number, const std::string& text)
      : Error("malformed log line " + std::to_string(line_number) + ": " + text),
        line_number_(line_number) {}
  std::size_t line_number() const { return line_number_; }

 private:
  std::size_t line_number_;
};
FLAKYFIX_ERROR(UnresolvedNode);

// context collector
FLAKYFIX_ERROR(OracleFailure);

// simplifier / transplanter
FLAKYFIX_ERROR(CaseNotFound);
FLAKYFIX_ERROR(OverlappingEdits);
FLAKYFIX_ERROR(SpanOutOfRange);
FLAKYFIX_ERROR(NeutralizationDiverged);
FLAKYFIX_ERROR(TableNotFound);
FLAKYFIX_ERROR(MergeParseError);

// llm gateway
FLAKYFIX_ERROR(ReplayMiss);
FLAKYFIX_ERROR(HttpError);
FLAKYFIX_ERROR(EmptySelection);
FLAKYFIX_ERROR(ThoughtParseFailure);
FLAKYFIX_ERROR(PatchParseFailure);
FLAKYFIX_ERROR(NonTestEdit);

// orchestrator
FLAKYFIX_ERROR(TimeLimitReached);
FLAKYFIX_ERROR(InstrumentationFailed);

// configuration
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

#undef FLAKYFIX_ERROR

}  // namespace flakyfix
