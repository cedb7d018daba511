#include <gtest/gtest.h>

#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "flakyfix/errors.hpp"
#include "flakyfix/llm.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;
using nlohmann::json;

TEST(Hashing, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hashing, CanonicalFormIgnoresLineEndingsAndTrailingBlanks) {
  EXPECT_EQ(canonicalize("a  \r\nb\t\n\n\n"), "a\nb");
  const PromptBundle a{"sys", "line one\nline two\n", Purpose::fix};
  const PromptBundle b{"sys \r\n", "line one  \r\nline two", Purpose::fix};
  const PromptBundle c{"sys", "line one\nline  two", Purpose::fix};
  EXPECT_EQ(a.canonical_hash(), b.canonical_hash());
  EXPECT_NE(a.canonical_hash(), c.canonical_hash());
  // Moving text between system and user changes the digest.
  const PromptBundle d{"sysline one", "line two", Purpose::fix};
  EXPECT_NE(a.canonical_hash(), d.canonical_hash());
}

TEST(Replay, SameHashInRecordingOrder) {
  Transcript t;
  const PromptBundle p{"s", "u", Purpose::select};
  t.add({p.canonical_hash(), Purpose::select, "first"});
  t.add({p.canonical_hash(), Purpose::select, "second"});
  ReplayBackend replay(std::move(t));
  EXPECT_EQ(replay.complete(p), "first");
  EXPECT_EQ(replay.complete(p), "second");
  EXPECT_THROW(replay.complete(p), ReplayMiss);
  EXPECT_THROW(replay.complete(PromptBundle{"s", "other", Purpose::select}), ReplayMiss);
}

TEST(Replay, MalformedTranscript) {
  TempDir tmp("transcript");
  spit(tmp / "t.jsonl", "{\"hash\": \"x\"}\n");
  EXPECT_THROW(Transcript::load(tmp / "t.jsonl"), ConfigError);
  EXPECT_THROW(Transcript::load(tmp / "missing.jsonl"), ConfigError);
}

TEST(Replay, RecordThenReplayIsEquivalent) {
  TempDir tmp("record");
  ScriptedBackend scripted({{Purpose::thought, {"alpha"}, {"A1", "A2"}},
                            {std::nullopt, {}, {"fallback"}}});
  RecordingBackend recorder(scripted, tmp / "t.jsonl");
  const std::vector<PromptBundle> prompts = {{"s", "alpha", Purpose::thought},
                                             {"s", "beta", Purpose::select},
                                             {"s", "alpha", Purpose::thought},
                                             {"s", "alpha", Purpose::thought}};
  std::vector<std::string> live;
  for (const auto& p : prompts) live.push_back(recorder.complete(p));
  EXPECT_EQ(live, (std::vector<std::string>{"A1", "fallback", "A2", "A2"}));
  ReplayBackend replay(Transcript::load(tmp / "t.jsonl"));
  for (std::size_t i = 0; i < prompts.size(); ++i) EXPECT_EQ(replay.complete(prompts[i]), live[i]);
}

TEST(Scripted, NoRuleIsAMiss) {
  ScriptedBackend scripted({{Purpose::fix, {"x"}, {"y"}}});
  EXPECT_THROW(scripted.complete({"s", "x", Purpose::thought}), ReplayMiss);
  EXPECT_EQ(scripted.complete({"s", "x", Purpose::fix}), "y");
  EXPECT_EQ(scripted.prompts().size(), 2u);
}

TEST(Gateway, CountsCallsPerPurpose) {
  ScriptedBackend scripted({{std::nullopt, {}, {"ok"}}});
  Gateway gateway(scripted);
  gateway.complete({"s", "a", Purpose::select});
  gateway.complete({"s", "b", Purpose::select});
  gateway.complete({"s", "c", Purpose::fix});
  EXPECT_EQ(gateway.calls().size(), 3u);
  EXPECT_EQ(gateway.call_count(Purpose::select), 2u);
  EXPECT_EQ(gateway.call_count(Purpose::thought), 0u);
}

TEST(Selection, Examples) {
  EXPECT_EQ(parse_selection("I choose 2 and 5.", 5, 3), (std::vector<std::size_t>{2, 5}));
  EXPECT_EQ(parse_selection("1, 1, 9", 5, 3), (std::vector<std::size_t>{1}));
  EXPECT_EQ(parse_selection("4 3 2 1", 5, 2), (std::vector<std::size_t>{4, 3}));
  EXPECT_THROW(parse_selection("none are relevant", 5, 3), EmptySelection);
  EXPECT_THROW(parse_selection("0 and 6", 5, 3), EmptySelection);
  EXPECT_THROW(parse_selection("99999999999999999999", 5, 3), EmptySelection);
}

TEST(Thoughts, SectionsInAnyOrder) {
  const auto t = parse_thought(
      "PLAN: sort the slice\nbefore comparing\n"
      "**Category:** Map iteration order\n"
      "EXPLANATION: keys come back in random order\n");
  EXPECT_EQ(t.category, RootCauseCategory::of(RootCauseCategory::Kind::unordered_collection_iteration));
  EXPECT_EQ(t.plan, "sort the slice\nbefore comparing");
  EXPECT_EQ(t.explanation, "keys come back in random order");
}

TEST(Thoughts, UnknownCategoryIsOther) {
  const auto t = parse_thought("CATEGORY: sampling size\nEXPLANATION: e\nPLAN: p\n");
  EXPECT_EQ(t.category.kind(), RootCauseCategory::Kind::other);
  EXPECT_EQ(t.category.to_string(), "other(sampling size)");
  EXPECT_EQ(RootCauseCategory::normalize("State Pollution").to_string(), "state-pollution");
}

TEST(Thoughts, MissingSection) {
  EXPECT_THROW(parse_thought("CATEGORY: x\nEXPLANATION: y\n"), ThoughtParseFailure);
  EXPECT_THROW(parse_thought("CATEGORY: x\nEXPLANATION: y\nPLAN:\n"), ThoughtParseFailure);
}

namespace {

const PatchExpectations kExpect{"TestX", "pkg/x_test.go", {"Helper"}};

}  // namespace

TEST(Patches, SingleFunction) {
  const auto code = parse_patch(
      "Here is the fix:\n```go\nfunc TestX(t *testing.T) {\n\tt.Log(1)\n}\n```\nDone.", kExpect);
  EXPECT_EQ(code, "func TestX(t *testing.T) {\n\tt.Log(1)\n}");
}

TEST(Patches, Rejections) {
  EXPECT_THROW(parse_patch("no code here", kExpect), PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc TestX(t *testing.T) {\n", kExpect), PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc TestX(t *testing.T) {}\n```\n```go\nfunc TestX(t *testing.T) {}\n```",
                           kExpect),
               PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc TestY(t *testing.T) {}\n```", kExpect), PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc TestX(t *testing.T) {\n```", kExpect), PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc TestX(t *testing.T) {}\nfunc Other() {}\n```", kExpect),
               PatchParseFailure);
  EXPECT_THROW(parse_patch("```go\nfunc Helper() {}\n```", kExpect), NonTestEdit);
  EXPECT_THROW(parse_patch("```go pkg/x.go\nfunc TestX(t *testing.T) {}\n```", kExpect), NonTestEdit);
  EXPECT_THROW(parse_patch("```go\n// file: pkg/x.go\nfunc TestX(t *testing.T) {}\n```", kExpect),
               NonTestEdit);
}

class HttpStub : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      auth_ = req.get_header_value("Authorization");
      request_ = json::parse(req.body);
      if (hits_ <= fail_first_) {
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      }
      res.set_content(json{{"choices", {{{"message", {{"content", "answer"}}}}}}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    setenv("FLAKYFIX_TEST_KEY", "secret", 1);
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
    unsetenv("FLAKYFIX_TEST_KEY");
  }
  HttpBackendConfig config() const {
    HttpBackendConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    c.model = "stub-model";
    c.api_key_env = "FLAKYFIX_TEST_KEY";
    c.initial_backoff = std::chrono::milliseconds(1);
    c.request_timeout_s = 10;
    return c;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int hits_ = 0;
  int fail_first_ = 0;
  std::string auth_;
  json request_;
};

TEST_F(HttpStub, ChatCompletion) {
  HttpBackend backend(config());
  EXPECT_EQ(backend.complete({"system text", "user text", Purpose::select}), "answer");
  EXPECT_EQ(auth_, "Bearer secret");
  EXPECT_EQ(request_["model"], "stub-model");
  EXPECT_EQ(request_["messages"][0]["role"], "system");
  EXPECT_EQ(request_["messages"][0]["content"], "system text");
  EXPECT_EQ(request_["messages"][1]["content"], "user text");
  EXPECT_EQ(request_["temperature"], 0.0);
}

TEST_F(HttpStub, RetriesServerErrors) {
  fail_first_ = 2;
  HttpBackend backend(config());
  EXPECT_EQ(backend.complete({"s", "u", Purpose::fix}), "answer");
  EXPECT_EQ(hits_, 3);
  EXPECT_FALSE(request_.contains("temperature"));
}

TEST_F(HttpStub, GivesUpAfterRetries) {
  fail_first_ = 100;
  auto c = config();
  c.max_retries = 1;
  HttpBackend backend(c);
  EXPECT_THROW(backend.complete({"s", "u", Purpose::fix}), HttpError);
  EXPECT_EQ(hits_, 2);
}

TEST(HttpConfig, MissingKey) {
  HttpBackendConfig c;
  c.api_key_env = "FLAKYFIX_SURELY_UNSET_KEY";
  unsetenv("FLAKYFIX_SURELY_UNSET_KEY");
  EXPECT_THROW(HttpBackend{c}, ConfigError);
}
