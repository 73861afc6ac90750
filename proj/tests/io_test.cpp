#include <gtest/gtest.h>

#include <filesystem>

#include "comoto/config_io.hpp"
#include "comoto/errors.hpp"
#include "comoto/report.hpp"
#include "comoto/trajectory_io.hpp"
#include "test_support.hpp"

namespace comoto {
namespace {

namespace fs = std::filesystem;
using testing::Gen;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "comoto_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(ChainFile, ShippedChainMatchesBuiltIn) {
  const ChainSpec file = load_chain(default_config_dir() / "iiwa_r820.yaml");
  const ChainSpec built = default_chain();
  ASSERT_EQ(file.dof(), built.dof());
  Gen g(3);
  for (int i = 0; i < 20; ++i) {
    const JointConfig q = g.config_within(built, 0.0);
    EXPECT_LE((fk_eef(file, q) - fk_eef(built, q)).norm(), 1e-12);
  }
}

TEST(ChainFile, RoundTripPreservesKinematics) {
  Gen g(17);
  for (int trial = 0; trial < 25; ++trial) {
    const ChainSpec chain = testing::random_chain(g, g.index(2, 6));
    const ChainSpec back = parse_chain(chain_to_yaml(chain));
    ASSERT_EQ(back.dof(), chain.dof());
    for (std::size_t j = 0; j < chain.dof(); ++j) {
      EXPECT_EQ(back.joint_limits[j].lo, chain.joint_limits[j].lo);
      EXPECT_EQ(back.joint_limits[j].hi, chain.joint_limits[j].hi);
      EXPECT_EQ(back.links[j].a, chain.links[j].a);
    }
    const JointConfig q = g.config_within(chain, 0.0);
    const auto a = fk_points(chain, q);
    const auto b = fk_points(back, q);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE((a[i] - b[i]).norm(), 1e-12);
  }
}

TEST(ChainFile, Errors) {
  EXPECT_THROW(parse_chain("name: x\n"), UsageError);
  EXPECT_THROW(parse_chain("dh: [[0, 0, 0]]\njoint_limits: [[-1, 1]]\n"), UsageError);
  EXPECT_THROW(parse_chain("dh: [[1, 0, 0, 0], [1, 0, 0, 0]]\njoint_limits: [[-1, 1]]\n"), UsageError);
  EXPECT_THROW(parse_chain("dh: [[1, 0, 0, 0], [1, 0, 0, 0]]\njoint_limits: [[1, -1], [-1, 1]]\n"),
               ContractViolation);
  EXPECT_THROW(parse_chain("dh: [[1, 0, 0, zero], [1, 0, 0, 0]]\njoint_limits: [[-1, 1], [-1, 1]]\n"),
               UsageError);
  EXPECT_THROW(parse_chain(": : ["), UsageError);
  EXPECT_THROW(load_chain(scratch("no_such_chain.yaml")), IoError);
}

TEST(SkeletonFile, ShippedMatchesDefaults) {
  const SkeletonOffsets file = load_skeleton(default_config_dir() / "skeleton_offsets.yaml");
  const SkeletonOffsets built = SkeletonOffsets::defaults();
  for (HumanJoint j : kAllHumanJoints) {
    if (!is_right_arm(j)) {
      EXPECT_EQ(file[j], built[j]) << joint_name(j);
    }
  }
}

TEST(SkeletonFile, ParsesAndRejects) {
  const SkeletonOffsets s = parse_skeleton("offsets:\n  head: [0.1, 0.2, 0.3]\n");
  EXPECT_EQ(s[HumanJoint::kHead], Vec3(0.1, 0.2, 0.3));
  EXPECT_THROW(parse_skeleton("offsets:\n  tail: [0, 0, 0]\n"), UsageError);
  EXPECT_THROW(parse_skeleton("offsets:\n  right_palm: [0, 0, 0]\n"), UsageError);
  EXPECT_THROW(parse_skeleton("offsets:\n  head: [0, 0]\n"), UsageError);
}

TEST(WeightsFile, AppliesOnlyPresentKeys) {
  RunConfig c;
  const CostWeights before = c.comoto;
  apply_weights("alpha_vis: 0.5\nbaselines:\n  distvis_dist: 3\n", c);
  EXPECT_EQ(c.comoto.vis, 0.5);
  EXPECT_EQ(c.comoto.dist, before.dist);
  EXPECT_EQ(c.comoto.legibility, before.legibility);
  EXPECT_EQ(c.baselines.distvis_dist, 3.0);
  EXPECT_THROW(apply_weights("alpha_vis: lots\n", c), UsageError);
}

TEST(WeightsFile, ShippedMatchesBuiltInDefaults) {
  RunConfig c;
  c.comoto = {};
  load_weights(default_config_dir() / "weights.yaml", c);
  const RunConfig built;
  EXPECT_EQ(c.comoto.dist, built.comoto.dist);
  EXPECT_EQ(c.comoto.vis, built.comoto.vis);
  EXPECT_EQ(c.comoto.legibility, built.comoto.legibility);
  EXPECT_EQ(c.comoto.nominal, built.comoto.nominal);
  EXPECT_EQ(c.comoto.smooth, built.comoto.smooth);
  EXPECT_EQ(c.nominal_smoothing, built.nominal_smoothing);
}

TEST(RunFile, DefaultConfigIsValid) {
  const RunConfig c = default_run_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.families.size(), 3u);
  EXPECT_EQ(c.geometry.waypoints, 20u);
  EXPECT_EQ(c.thresholds.separation, 0.20);
  EXPECT_EQ(c.thresholds.fov_deg, 160.0);
  EXPECT_EQ(c.speed.d_stop, 0.06);
}

TEST(RunFile, OverridesAndRelativePaths) {
  const RunConfig c = parse_run_config(
      "chain: iiwa_r820.yaml\nseeds: [7, 9]\nfamilies: [reaching_near]\nout_dir: elsewhere\n"
      "thresholds:\n  separation: 0.3\n",
      default_config_dir());
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 9}));
  ASSERT_EQ(c.families.size(), 1u);
  EXPECT_EQ(c.families[0], ScenarioFamily::kReachingNear);
  EXPECT_EQ(c.out_dir, "elsewhere");
  EXPECT_EQ(c.thresholds.separation, 0.3);
  EXPECT_EQ(c.chain.dof(), 7u);
}

TEST(RunFile, Errors) {
  EXPECT_THROW(parse_run_config("families: [flying]\n", default_config_dir()), UsageError);
  EXPECT_THROW(parse_run_config("chain: missing.yaml\n", default_config_dir()), IoError);
  EXPECT_THROW(load_run_config(scratch("no_run.yaml")), IoError);
}

TEST(JointTrajectoryText, ExactRoundTrip) {
  Gen g(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = g.index(3, 20);
    const std::size_t dof = g.index(1, 7);
    JointTrajectory t;
    t.dt = g.uniform(0.01, 1.0);
    t.t0 = g.uniform(-2.0, 2.0);
    for (std::size_t k = 0; k < n; ++k) {
      JointConfig q(static_cast<Eigen::Index>(dof));
      for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = g.uniform(-3.0, 3.0);
      t.waypoints.push_back(q);
    }
    const std::string text = joint_trajectory_to_text(t);
    const JointTrajectory back = parse_joint_trajectory(text);
    EXPECT_TRUE(back == t);
    EXPECT_EQ(back.dt, t.dt);
    EXPECT_EQ(back.t0, t.t0);
    EXPECT_EQ(joint_trajectory_to_text(back), text);
  }
}

TEST(JointTrajectoryText, FileRoundTripAndErrors) {
  const JointTrajectory t = straightline_joint_init(JointConfig::Zero(2), JointConfig::Ones(2), 4, 0.25);
  const fs::path p = scratch("traj.txt");
  save_joint_trajectory(p, t);
  EXPECT_TRUE(load_joint_trajectory(p) == t);
  EXPECT_THROW(parse_joint_trajectory("garbage"), UsageError);
  std::string text = joint_trajectory_to_text(t);
  EXPECT_THROW(parse_joint_trajectory(text.substr(0, text.size() / 2)), UsageError);
  EXPECT_THROW(load_joint_trajectory(scratch("none.txt")), IoError);
}

TEST(HumanTrajectoryText, ExactRoundTrip) {
  const Scenario s = generate_scenarios(ScenarioFamily::kReachingFar, {4}).front();
  const HumanTrajectory h = generate_reach(s.human_script, 100.0);
  const std::string text = human_trajectory_to_text(h);
  EXPECT_EQ(text.substr(0, text.find('\n')), "# comoto human trajectory");
  const HumanTrajectory back = parse_human_trajectory(text);
  EXPECT_TRUE(back == h);
  const fs::path p = scratch("human.txt");
  save_human_trajectory(p, h);
  EXPECT_TRUE(load_human_trajectory(p) == h);
}

TEST(HumanTrajectoryText, Errors) {
  EXPECT_THROW(parse_human_trajectory("# comoto human trajectory\nrate: 100\njoints: head\n"), UsageError);
  const Scenario s = generate_scenarios(ScenarioFamily::kStationary, {1}).front();
  std::string text = human_trajectory_to_text(generate_reach(s.human_script, 10.0));
  text += "99,head,0,0,0\n";
  EXPECT_THROW(parse_human_trajectory(text), UsageError);
}

TEST(ScenarioYaml, RoundTripIsExact) {
  for (ScenarioFamily f : kAllFamilies) {
    for (const Scenario& s : generate_scenarios(f, {1, 2, 3})) {
      const Scenario back = parse_scenario(scenario_to_yaml(s), s.chain);
      EXPECT_TRUE(back == s) << family_name(f) << " " << s.seed;
      EXPECT_EQ(back.robot_start, s.robot_start);
      EXPECT_EQ(back.human_script.move_duration, s.human_script.move_duration);
    }
  }
}

TEST(ScenarioYaml, WrongChainRejected) {
  const Scenario s = generate_scenarios(ScenarioFamily::kStationary, {1}).front();
  ChainSpec other = planar_chain({1.0, 1.0});
  other.name = "planar";
  EXPECT_THROW(parse_scenario(scenario_to_yaml(s), other), UsageError);
  EXPECT_THROW(parse_scenario("family: [", s.chain), UsageError);
}

}  // namespace
}  // namespace comoto
