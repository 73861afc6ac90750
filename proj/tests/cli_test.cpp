#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "comoto/report.hpp"

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("comoto_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

/// Runs the CLI with `args` and returns its exit code. `env` is prefixed verbatim.
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = "env -u COMOTO_OUT_DIR " + env + " '" + std::string(COMOTO_CLI_PATH) + "' " +
                          args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(cli(""), 1); }

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(cli("fly"), 1); }

TEST(Cli, HelpSucceeds) { EXPECT_EQ(cli("--help"), 0); }

TEST(Cli, UnknownFamilyIsUsageError) {
  EXPECT_EQ(cli("gen --family sitting --out " + fresh_dir("family").string()), 1);
}

TEST(Cli, BadSeedsAreUsageErrors) {
  EXPECT_EQ(cli("gen --seeds abc --out " + fresh_dir("seeds").string()), 1);
  EXPECT_EQ(cli("gen --seeds 5-1 --out " + fresh_dir("seeds").string()), 1);
  EXPECT_EQ(cli("gen --seeds 1,1 --out " + fresh_dir("seeds").string()), 1);
}

TEST(Cli, UnknownFormatIsUsageError) {
  EXPECT_EQ(cli("run --family stationary --seeds 1 --format xml --out " + fresh_dir("fmt").string()), 1);
}

TEST(Cli, MissingConfigIsRuntimeFailure) {
  EXPECT_EQ(cli("gen --config /nonexistent/run.yaml --out " + fresh_dir("cfg").string()), 2);
}

TEST(Cli, GenWritesScenarioFiles) {
  const fs::path out = fresh_dir("gen");
  ASSERT_EQ(cli("gen --family reaching_near --seeds 1-2 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "scenario_reaching_near_1.yaml"));
  EXPECT_TRUE(fs::exists(out / "scenario_reaching_near_2.yaml"));
  EXPECT_TRUE(fs::exists(out / "human_reaching_near_2.txt"));
}

TEST(Cli, EnvironmentSetsOutputDir) {
  const fs::path env_dir = fresh_dir("env");
  ASSERT_EQ(cli("gen --family stationary --seeds 3", "COMOTO_OUT_DIR=" + env_dir.string()), 0);
  EXPECT_TRUE(fs::exists(env_dir / "scenario_stationary_3.yaml"));
}

TEST(Cli, OutFlagBeatsEnvironment) {
  const fs::path env_dir = fresh_dir("env_loses");
  const fs::path flag_dir = fresh_dir("flag_wins");
  ASSERT_EQ(cli("gen --family stationary --seeds 3 --out " + flag_dir.string(),
                "COMOTO_OUT_DIR=" + env_dir.string()),
            0);
  EXPECT_TRUE(fs::exists(flag_dir / "scenario_stationary_3.yaml"));
  EXPECT_FALSE(fs::exists(env_dir));
}

TEST(Cli, RunWritesReports) {
  const fs::path out = fresh_dir("run");
  ASSERT_EQ(cli("run --family stationary --seeds 1 --out " + out.string()), 0);
  for (const char* f : {"results.csv", "timings.csv", "results.json", "results.md"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto rows = comoto::parse_results_csv(comoto::read_text_file(out / "results.csv"));
  EXPECT_EQ(rows.size(), 5u);
  EXPECT_TRUE(fs::exists(out / "trajectories" / "stationary_1_comoto.txt"));
}

TEST(Cli, RunWithShippedConfigFile) {
  const fs::path out = fresh_dir("run_cfg");
  ASSERT_EQ(cli("run --config " + std::string(COMOTO_TEST_CONFIG_DIR) +
                "/run.yaml --family reaching_far --seeds 2 --format csv --out " + out.string()),
            0);
  EXPECT_TRUE(fs::exists(out / "results.csv"));
  EXPECT_FALSE(fs::exists(out / "results.md"));
}

TEST(Cli, SolveThenEval) {
  const fs::path out = fresh_dir("solve");
  ASSERT_EQ(cli("solve --family reaching_near --seeds 1 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "trace_reaching_near_1.csv"));
  const std::string eval_args = "eval --scenario " + (out / "scenario_reaching_near_1.yaml").string() +
                                " --trajectory " + (out / "comoto_reaching_near_1.txt").string() +
                                " --nominal " + (out / "nominal_reaching_near_1.txt").string();
  EXPECT_EQ(cli(eval_args), 0);
  EXPECT_EQ(cli(eval_args + " --format json"), 0);
  EXPECT_EQ(cli(eval_args + " --format markdown"), 1);
}

TEST(Cli, SolveNeedsOneScenario) {
  EXPECT_EQ(cli("solve --seeds 1-2 --family stationary --out " + fresh_dir("solve2").string()), 1);
}

TEST(Cli, EvalMissingFilesIsRuntimeFailure) {
  const fs::path out = fresh_dir("eval");
  ASSERT_EQ(cli("gen --family stationary --seeds 1 --out " + out.string()), 0);
  EXPECT_EQ(cli("eval --scenario " + (out / "scenario_stationary_1.yaml").string() +
                " --trajectory " + (out / "missing.txt").string()),
            2);
  EXPECT_EQ(cli("eval --scenario " + (out / "scenario_stationary_1.yaml").string()), 1);
}

}  // namespace
