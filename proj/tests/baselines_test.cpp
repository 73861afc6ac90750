#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "comoto/baselines.hpp"
#include "comoto/benchmark.hpp"
#include "comoto/config_io.hpp"
#include "comoto/errors.hpp"
#include "comoto/metrics.hpp"
#include "test_support.hpp"

namespace comoto {
namespace {

using testing::Gen;

// A human standing still with every keypoint at `p`.
HumanTrajectory still_human(const Vec3& p, double duration, double rate = 100.0) {
  HumanTrajectory h;
  h.rate = rate;
  const auto n = static_cast<std::size_t>(std::ceil(duration * rate)) + 1;
  for (auto& track : h.samples) track.assign(n, p);
  return h;
}

// Base joint of a planar chain sweeping 0 -> angle; every robot point keeps a
// fixed distance to points on the z axis.
JointTrajectory sweep(double angle, std::size_t n = 11, double dt = 0.1) {
  JointConfig a(2), b(2);
  a << 0.0, 0.3;
  b << angle, 0.3;
  return straightline_joint_init(a, b, n, dt);
}

double polyline_distance(const JointTrajectory& path, const JointConfig& q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Eigen::VectorXd a = path.waypoints[k], d = path.waypoints[k + 1] - a;
    const double len2 = d.squaredNorm();
    const double u = len2 > 0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + u * d - q).norm());
  }
  return best;
}

TEST(NominalTrajectory, NoObstaclesGivesStraightLine) {
  Gen g(61);
  const ChainSpec chain = default_chain();
  NominalProblem p{chain, g.config_within(chain), g.config_within(chain), {}, 20, 2.0 / 19.0, 0.0};
  const OptResult r = nominal_trajectory(p, NominalWeights{}, OptimizerOptions{});
  const JointTrajectory line = straightline_joint_init(p.start, p.goal, 20, p.dt);
  for (std::size_t k = 0; k < line.size(); ++k) {
    EXPECT_LE((r.trajectory.waypoints[k] - line.waypoints[k]).lpNorm<Eigen::Infinity>(), 1e-9);
  }
  EXPECT_TRUE((r.trajectory.waypoints.front().array() == p.start.array()).all());
  EXPECT_TRUE((r.trajectory.waypoints.back().array() == p.goal.array()).all());
}

TEST(NominalTrajectory, SphereOnPathIsCleared) {
  Gen g(62);
  const ChainSpec chain = default_chain();
  const NominalWeights w;
  for (int trial = 0; trial < 5; ++trial) {
    const JointConfig a = solve_position_ik(chain, Vec3(0.35, -0.45, 0.3) + g.vec3(-0.05, 0.05), chain.mid_config());
    const JointConfig b = solve_position_ik(chain, Vec3(0.4, 0.45, 0.15) + g.vec3(-0.05, 0.05), a);
    const JointTrajectory line = straightline_joint_init(a, b, 20, 2.0 / 19.0);
    const Sphere s{fk_eef(chain, line.waypoints[10]), 0.05};
    const OptResult r = nominal_trajectory({chain, a, b, {s}, 20, 2.0 / 19.0, 0.0}, w, OptimizerOptions{});
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& q : r.trajectory.waypoints) {
      for (const Vec3& p : fk_points(chain, q)) clearance = std::min(clearance, (p - s.center).norm() - s.radius);
    }
    EXPECT_GE(clearance, w.margin / 2) << "trial " << trial;
    EXPECT_TRUE((r.trajectory.waypoints.front().array() == a.array()).all());
    EXPECT_TRUE((r.trajectory.waypoints.back().array() == b.array()).all());
  }
}

TEST(ObstacleHinge, GradientMatchesFiniteDifferences) {
  Gen g(63);
  const ChainSpec chain = default_chain();
  for (int trial = 0; trial < 20; ++trial) {
    JointTrajectory t = straightline_joint_init(g.config_within(chain, 0.2), g.config_within(chain, 0.2), 6, 0.2);
    const std::vector<Sphere> obstacles = {{fk_eef(chain, t.waypoints[2]) + g.vec3(-0.05, 0.05), 0.1},
                                           {fk_points(chain, t.waypoints[3])[4] + g.vec3(-0.05, 0.05), 0.15}};
    const CostValue c = obstacle_hinge_cost(t, chain, obstacles, 0.05);
    const Eigen::VectorXd numeric = testing::central_difference(
        [&](const JointTrajectory& x) { return obstacle_hinge_cost(x, chain, obstacles, 0.05).value; }, t);
    EXPECT_LE(testing::relative_error(interior_gradient(c.gradient), numeric), 1e-4);
  }
}

TEST(SpeedScale, PiecewiseLinearAndContinuous) {
  const SpeedAdjustParams p;
  EXPECT_EQ(speed_scale(0.0, p), 0.0);
  EXPECT_EQ(speed_scale(p.d_stop, p), 0.0);
  EXPECT_EQ(speed_scale(p.d_slow, p), 1.0);
  EXPECT_EQ(speed_scale(5.0, p), 1.0);
  EXPECT_NEAR(speed_scale(0.5 * (p.d_stop + p.d_slow), p), 0.5, 1e-15);
  double prev = 0.0;
  for (double d = 0.0; d < 0.3; d += 1e-4) {
    const double s = speed_scale(d, p);
    EXPECT_GE(s, prev);
    EXPECT_LE(s - prev, 1e-4 / (p.d_slow - p.d_stop) + 1e-12);
    prev = s;
  }
}

TEST(SpeedAdjust, FarHumanRunsAtFullSpeed) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  const JointTrajectory path = sweep(1.0);
  SpeedAdjustParams p;
  p.timeout = 3.0;
  const ExecutionTrace tr = speed_adjusted_execute(path, chain, still_human(Vec3(0, 0, 10), 4.0), p);
  EXPECT_TRUE(tr.completed);
  EXPECT_NEAR(tr.duration(), path.duration(), 1e-9);
  for (double s : tr.speed_scale) EXPECT_EQ(s, 1.0);
  EXPECT_TRUE(tr.stop_events.empty());
}

TEST(SpeedAdjust, HumanAtGoalPreventsCompletion) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  const JointTrajectory path = sweep(1.0);
  SpeedAdjustParams p;
  p.timeout = 3.0;
  const Vec3 goal = fk_eef(chain, path.waypoints.back());
  const ExecutionTrace tr = speed_adjusted_execute(path, chain, still_human(goal + Vec3(0, 0, 0.03), 4.0), p);
  EXPECT_FALSE(tr.completed);
  EXPECT_NEAR(tr.duration(), p.timeout, 1e-9);
  // Progress slows toward the stop distance without crossing it.
  for (double d : tr.min_separation) EXPECT_GE(d, p.d_stop - 1e-9);
  EXPECT_LT(tr.speed_scale.back(), 0.05);
}

TEST(SpeedAdjust, HumanOnTheArmStopsImmediately) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  const JointTrajectory path = sweep(1.0);
  SpeedAdjustParams p;
  p.timeout = 2.0;
  const Vec3 elbow = fk_points(chain, path.waypoints.front())[1];
  const ExecutionTrace tr = speed_adjusted_execute(path, chain, still_human(elbow, 3.0), p);
  EXPECT_FALSE(tr.completed);
  for (double s : tr.speed_scale) EXPECT_EQ(s, 0.0);
  for (const JointConfig& q : tr.configs) EXPECT_EQ(q, path.waypoints.front());
  ASSERT_EQ(tr.stop_events.size(), 1u);
  EXPECT_EQ(tr.stop_events[0].time, path.t0);
  EXPECT_NEAR(tr.stop_events[0].duration, p.timeout, 1e-9);
}

TEST(SpeedAdjust, HalfSpeedDoublesDuration) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  const JointTrajectory path = sweep(1.0);
  SpeedAdjustParams p;
  p.timeout = 5.0;
  // The base point stays exactly 0.13 m below the human; the other points are farther.
  const ExecutionTrace tr = speed_adjusted_execute(path, chain, still_human(Vec3(0, 0, 0.13), 6.0), p);
  EXPECT_TRUE(tr.completed);
  for (double s : tr.speed_scale) EXPECT_NEAR(s, 0.5, 1e-12);
  EXPECT_NEAR(tr.duration(), 2.0 * path.duration(), 1.0 / p.control_rate + 1e-9);
}

TEST(SpeedAdjust, PathIsNeverAltered) {
  Gen g(64);
  const ChainSpec chain = default_chain();
  for (int trial = 0; trial < 20; ++trial) {
    const JointTrajectory path = straightline_joint_init(g.config_within(chain), g.config_within(chain), 20, 2.0 / 19.0);
    JointTrajectory bent = path;
    for (std::size_t k = 1; k + 1 < bent.size(); ++k) bent.waypoints[k] = g.config_within(chain);
    const Vec3 near = fk_eef(chain, bent.waypoints[10]) + g.vec3(-0.15, 0.15);
    SpeedAdjustParams p;
    const ExecutionTrace tr = speed_adjusted_execute(bent, chain, still_human(near, 7.0), p);
    for (const auto& q : tr.configs) ASSERT_LE(polyline_distance(bent, q), 1e-9);
    for (std::size_t k = 1; k < tr.timestamps.size(); ++k) ASSERT_GT(tr.timestamps[k], tr.timestamps[k - 1]);
  }
}

TEST(SpeedAdjust, FartherHumanNeverSlowsExecution) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  const JointTrajectory path = sweep(1.2);
  SpeedAdjustParams p;
  p.timeout = 10.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double h = 0.07; h < 0.25; h += 0.01) {
    const ExecutionTrace tr = speed_adjusted_execute(path, chain, still_human(Vec3(0, 0, h), 11.0), p);
    EXPECT_LE(tr.duration(), prev + 1e-12);
    prev = tr.duration();
  }
}

TEST(SpeedAdjust, RejectsShortGroundTruthAndBadParams) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  SpeedAdjustParams p;
  p.timeout = 3.0;
  EXPECT_THROW(speed_adjusted_execute(sweep(1.0), chain, still_human(Vec3(0, 0, 5), 1.0), p), ContractViolation);
  p.d_stop = 0.3;
  EXPECT_THROW(speed_adjusted_execute(sweep(1.0), chain, still_human(Vec3(0, 0, 5), 4.0), p), ContractViolation);
}

TEST(SpeedAdjust, TraceCsvColumns) {
  const ChainSpec chain = planar_chain({1.0, 1.0});
  SpeedAdjustParams p;
  p.timeout = 3.0;
  const std::string csv = trace_to_csv(speed_adjusted_execute(sweep(1.0), chain, still_human(Vec3(0, 0, 5), 4.0), p));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,q0,q1,min_separation,speed_scale");
}

class SeededBaselines : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new RunConfig(default_run_config());
    for (ScenarioFamily f : kAllFamilies) {
      for (const Scenario& s : generate_scenarios(f, {1, 2, 3, 4, 5}, config_->geometry, config_->chain)) {
        scenarios_->push_back(s);
        prepared_->push_back(prepare_scenario(s, *config_));
      }
    }
  }
  static RunConfig* config_;
  static std::vector<Scenario>* scenarios_;
  static std::vector<PreparedScenario>* prepared_;
};

RunConfig* SeededBaselines::config_ = nullptr;
std::vector<Scenario>* SeededBaselines::scenarios_ = new std::vector<Scenario>();
std::vector<PreparedScenario>* SeededBaselines::prepared_ = new std::vector<PreparedScenario>();

TEST_F(SeededBaselines, LegibleBeatsNominalScoreAndKeepsEndpoints) {
  for (const auto& p : *prepared_) {
    const OptResult r = legible_optimize(p.context, config_->optimizer, config_->baselines);
    EXPECT_GE(legibility_score(r.trajectory, p.context), legibility_score(p.nominal, p.context));
    EXPECT_TRUE((r.trajectory.waypoints.front().array() == p.nominal.waypoints.front().array()).all());
    EXPECT_TRUE((r.trajectory.waypoints.back().array() == p.nominal.waypoints.back().array()).all());
  }
}

TEST_F(SeededBaselines, DistVisImprovesSeparationAndVisibility) {
  for (std::size_t i = 0; i < prepared_->size(); ++i) {
    const auto& p = (*prepared_)[i];
    const Scenario& s = (*scenarios_)[i];
    const OptResult r = distvis_optimize(p.context, config_->optimizer, config_->baselines);
    const ChainSpec& chain = p.context.chain();
    const auto min_sep = [&](const JointTrajectory& t) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < t.size(); ++k) {
        std::array<Vec3, kHumanJointCount> pose;
        for (HumanJoint j : kAllHumanJoints) pose[index_of(j)] = p.prediction.at(j, k).mean;
        best = std::min(best, min_separation(fk_points(chain, t.waypoints[k]), pose));
      }
      return best;
    };
    EXPECT_GE(min_sep(r.trajectory), min_sep(p.nominal)) << family_name(s.family) << " " << s.seed;
    const double vis_nom = metric_visibility(TimedPath::from(p.nominal), chain, p.truth, s.human_object, 160.0);
    const double vis_dv = metric_visibility(TimedPath::from(r.trajectory), chain, p.truth, s.human_object, 160.0);
    EXPECT_GE(vis_dv, vis_nom);
    EXPECT_TRUE((r.trajectory.waypoints.back().array() == p.nominal.waypoints.back().array()).all());
  }
}

TEST_F(SeededBaselines, DistVisLeavesNominalAloneWhenHumanIsFarBehind) {
  for (const auto& p : *prepared_) {
    // Move the whole predicted human well behind the robot base; they keep looking
    // at their object.
    PredictedHumanTrajectory far = p.context.prediction();
    const Vec3 shift(-3.0, 0.0, 0.0);
    for (auto& track : far.tracks) {
      for (auto& gp : track) gp.mean += shift;
    }
    const CostContext ctx(p.context.chain(), far, p.nominal, p.context.object(), p.context.goal_config());
    const OptResult r = distvis_optimize(ctx, config_->optimizer, config_->baselines);
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
      EXPECT_LE((fk_eef(ctx.chain(), r.trajectory.waypoints[k]) - fk_eef(ctx.chain(), p.nominal.waypoints[k])).norm(),
                0.05);
    }
  }
}

TEST_F(SeededBaselines, LegibleOnStraightCartesianTaskStaysNearOne) {
  // A planar arm whose nominal end-effector path is a straight line to the goal.
  const ChainSpec chain = planar_chain({1.0, 1.0});
  JointTrajectory nominal;
  nominal.dt = 0.1;
  for (int k = 0; k < 20; ++k) {
    const double x = 1.8 - 0.05 * k;
    const double c2 = (x * x - 2.0) / 2.0;
    const double q2 = std::acos(c2);
    JointConfig q(2);
    q << -std::atan2(std::sin(q2), 1 + std::cos(q2)), q2;
    nominal.waypoints.push_back(q);
  }
  const auto pred = testing::make_prediction(
      20, {HumanJoint::kHead}, [](HumanJoint, std::size_t) { return Vec3(3, 3, 1); },
      [](HumanJoint, std::size_t) { return Mat3(Mat3::Identity() * 0.01); });
  const CostContext ctx(chain, pred, nominal, Vec3(2, 2, 0), nominal.waypoints.back());
  EXPECT_NEAR(legibility_score(nominal, ctx), 1.0, 1e-12);
  const OptResult r = legible_optimize(ctx, config_->optimizer, config_->baselines);
  EXPECT_NEAR(legibility_score(r.trajectory, ctx), 1.0, 1e-3);
}

}  // namespace
}  // namespace comoto
