#include <gtest/gtest.h>

#include "flakyfix/cli.hpp"
#include "flakyfix/errors.hpp"
#include "flakyfix/process.hpp"
#include "flakyfix/reproducer.hpp"
#include "test_support.hpp"

using namespace flakyfix;
using namespace flakyfix::testing;

TEST(Settings, Defaults) {
  const Settings s;
  EXPECT_EQ(s.pipeline.m, 3u);
  EXPECT_EQ(s.pipeline.p, 2u);
  EXPECT_EQ(s.pipeline.n, 3u);
  EXPECT_EQ(s.pipeline.runs, 1000u);
  EXPECT_EQ(s.pipeline.time_limit_s, 7200.0);
  EXPECT_EQ(s.pipeline.repair_rounds, 2u);
  EXPECT_EQ(s.pipeline.traversal.k, 3u);
  EXPECT_EQ(s.pipeline.traversal.f, 5u);
  EXPECT_FALSE(s.pipeline.traversal.depth.has_value());
  EXPECT_TRUE(s.pipeline.race);
  EXPECT_EQ(s.backend, BackendKind::replay);
}

TEST(Settings, ConfigJson) {
  Settings s;
  apply_config_json(s, R"({"m": 1, "runs": 50, "depth": 2, "race": false, "backend": "scripted",
                           "http": {"model": "m2", "max_retries": 0}, "go": {"binary": "/opt/go"}})");
  EXPECT_EQ(s.pipeline.m, 1u);
  EXPECT_EQ(s.pipeline.runs, 50u);
  EXPECT_EQ(s.pipeline.traversal.depth, 2u);
  EXPECT_FALSE(s.pipeline.race);
  EXPECT_EQ(s.backend, BackendKind::scripted);
  EXPECT_EQ(s.http.model, "m2");
  EXPECT_EQ(s.http.max_retries, 0);
  EXPECT_EQ(s.go.go, "/opt/go");
  apply_config_json(s, R"({"depth": null})");
  EXPECT_FALSE(s.pipeline.traversal.depth.has_value());
}

TEST(Settings, BadValues) {
  Settings s;
  try {
    apply_config_json(s, R"({"mm": 1})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "mm");
  }
  EXPECT_THROW(apply_config_json(s, "{not json"), ConfigError);
  s = Settings{};
  s.workspace = fixtures() / "flaky5";
  EXPECT_NO_THROW(validate(s));
  s.pipeline.traversal.k = 0;
  EXPECT_THROW(validate(s), ConfigError);
  s = Settings{};
  s.workspace = fixtures() / "flaky5";
  s.pipeline.time_limit_s = 0;
  EXPECT_THROW(validate(s), ConfigError);
  s = Settings{};
  s.workspace = fixtures() / "no-such-dir";
  EXPECT_THROW(validate(s), ConfigError);
}

TEST(Settings, TicketSlug) {
  EXPECT_EQ(ticket_slug(parse_ticket("./sched/TestFirstResult/both_ready")),
            "_sched_TestFirstResult_both_ready");
  EXPECT_EQ(ticket_slug(parse_ticket("//svc/pay:test/TestCharge/a b")), "__svc_pay_test_TestCharge_a_b");
}

namespace {

ProcessResult cli(std::vector<std::string> args, const fs::path& cwd) {
  args.insert(args.begin(), cli_path().string());
  return run_process(args, cwd, {}, 600.0);
}

}  // namespace

TEST(CliExit, MalformedTicket) {
  TempDir out("cli");
  const auto r = cli({"fix", "TestCharge", "--workspace", (fixtures() / "flaky5").string(), "--backend",
                      "scripted", "--transcript", (fixtures() / "flaky5_script/rules.json").string()},
                     out.path());
  EXPECT_EQ(r.exit_code, kExitConfig) << r.err;
}

TEST(CliExit, UnknownFlagAndReplayRecord) {
  TempDir out("cli");
  EXPECT_EQ(cli({"fix", "./a/TestB/c", "--bogus"}, out.path()).exit_code, kExitConfig);
  EXPECT_EQ(cli({"fix", "./a/TestB/c", "--record", "--transcript", "t.jsonl", "--workspace",
                 (fixtures() / "flaky5").string()},
                out.path())
                .exit_code,
            kExitConfig);
  EXPECT_EQ(cli({"fix", "./a/TestB/c", "--k", "0", "--workspace", (fixtures() / "flaky5").string()},
                out.path())
                .exit_code,
            kExitConfig);
}

TEST(CliExit, HttpWithoutKey) {
  TempDir out("cli");
  spit(out / "config.json", R"({"backend": "http", "http": {"api_key_env": "FLAKYFIX_UNSET_FOR_TEST"}})");
  const auto r = cli({"fix", "./sched/TestFirstResult/both_ready", "--config", (out / "config.json").string(),
                      "--workspace", (fixtures() / "flaky5").string()},
                     out.path());
  EXPECT_EQ(r.exit_code, kExitConfig) << r.err;
  EXPECT_NE(r.err.find("FLAKYFIX_UNSET_FOR_TEST"), std::string::npos) << r.err;
}

TEST(CliExit, StableTestIsNotReproduced) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir out("cli");
  const auto r = cli({"reproduce", "./maporder/TestKeys/single_key", "--runs", "20", "--workspace",
                      (fixtures() / "flaky5").string(), "--out", (out / "o").string()},
                     out.path());
  EXPECT_EQ(r.exit_code, kExitNotReproduced) << r.err;
  EXPECT_TRUE(fs::exists(out / "o/_maporder_TestKeys_single_key/reproduction.json"));
}

TEST(CliExit, BrokenWorkspace) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir out("cli");
  copy_tree(fixtures() / "async_chain", out / "ws");
  spit(out / "ws/backend/backend.go", slurp(out / "ws/backend/backend.go") + "\nfunc broken( {\n");
  const auto r = cli({"graph", "./backend/TestAddProgram/valid_program", "--runs", "5", "--workspace",
                      (out / "ws").string(), "--out", (out / "o").string()},
                     out.path());
  EXPECT_EQ(r.exit_code, kExitInstrumentation) << r.err;
}

TEST(CliExit, GraphOfAsyncChain) {
  if (!go_available()) GTEST_SKIP() << "go toolchain not installed";
  TempDir out("cli");
  const auto r = cli({"graph", "./backend/TestAddProgram/valid_program", "--runs", "20", "--workspace",
                      (fixtures() / "async_chain").string(), "--out", (out / "o").string()},
                     out.path());
  ASSERT_EQ(r.exit_code, kExitOk) << r.err;
  const auto dot = slurp(out / "o/_backend_TestAddProgram_valid_program/graph.dot");
  EXPECT_NE(dot.find("style=dashed"), std::string::npos) << dot;
  EXPECT_TRUE(fs::exists(out / "o/_backend_TestAddProgram_valid_program/graph.json"));
}
