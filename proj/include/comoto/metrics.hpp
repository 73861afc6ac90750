#pragma once

#include <string>
#include <vector>

#include "comoto/baselines.hpp"
#include "comoto/human_motion.hpp"
#include "comoto/kinematics.hpp"

namespace comoto {

/// Evaluation thresholds, overridable per run.
struct MetricThresholds {
  double separation = 0.20;  // m
  double fov_deg = 160.0;
  double stop_distance = 0.06;  // m, speed-adjustment stop threshold
  /// Path lengths in the legibility metric are measured in units of this length.
  double legibility_length_unit = 0.1;  // m
};

/// Robot configurations at explicit times: a waypoint trajectory on its own grid
/// or an executed trace on the control grid.
struct TimedPath {
  std::vector<double> times;
  std::vector<JointConfig> configs;

  static TimedPath from(const JointTrajectory& traj);
  static TimedPath from(const ExecutionTrace& trace);

  std::size_t size() const { return times.size(); }
};

struct GoalSet {
  Vec3 true_goal = Vec3::Zero();
  std::vector<Vec3> distractors;

  std::size_t size() const { return 1 + distractors.size(); }
  /// At least one distractor, all goals pairwise distinct.
  void validate() const;
};

/// Percentage of steps where the minimum human-robot distance exceeds `threshold`.
/// The human is interpolated to each path time.
double metric_separation(const TimedPath& path, const ChainSpec& chain,
                         const HumanTrajectory& human_truth, double threshold);

/// Percentage of steps whose end effector lies within fov_deg / 2 of the gaze ray
/// head -> target. Steps with a degenerate gaze count as not visible and are
/// reported through `flags` when given.
double metric_visibility(const TimedPath& path, const ChainSpec& chain,
                         const HumanTrajectory& human_truth, const Vec3& target, double fov_deg,
                         std::vector<std::string>* flags = nullptr);

/// Goal-normalized legibility of the end-effector motion, scaled so that chance
/// maps to 0 and certainty to 100. Weighted by f(k) = (T - 1) - k over the T steps.
double metric_legibility(const TimedPath& path, const ChainSpec& chain, const GoalSet& goals,
                         double length_unit = MetricThresholds{}.legibility_length_unit);

/// Same, from end-effector positions directly.
double legibility_score_from_points(const std::vector<Vec3>& eef, const GoalSet& goals,
                                    double length_unit);

/// Sum over waypoints of squared end-effector distance to the nominal, m^2.
double metric_nominal_dev(const JointTrajectory& traj, const JointTrajectory& nominal,
                          const ChainSpec& chain);

/// Where the executed trace actually was at each nominal waypoint time, compared
/// with the nominal waypoint.
double metric_nominal_dev(const ExecutionTrace& trace, const JointTrajectory& nominal,
                          const ChainSpec& chain);

struct MetricReport {
  double dst_pct = 0.0;
  double vis_pct = 0.0;
  double legibility = 0.0;
  double nom_dev = 0.0;
  bool completed = true;

  bool operator==(const MetricReport&) const = default;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Sample mean and standard deviation (n - 1 denominator, 0 for one value).
MeanSd mean_sd(const std::vector<double>& values);

struct MetricAggregate {
  MeanSd dst_pct;
  MeanSd vis_pct;
  MeanSd legibility;
  MeanSd nom_dev;
  std::size_t count = 0;
};

MetricAggregate aggregate(const std::vector<MetricReport>& reports);

}  // namespace comoto
