#pragma once

#include <string>
#include <vector>

#include "comoto/costs.hpp"
#include "comoto/human_motion.hpp"
#include "comoto/kinematics.hpp"
#include "comoto/optimizer.hpp"

namespace comoto {

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Everything needed to plan the human-free nominal trajectory.
struct NominalProblem {
  ChainSpec chain;
  JointConfig start;
  JointConfig goal;
  std::vector<Sphere> obstacles;
  std::size_t waypoints = 20;
  double dt = 2.0 / 19.0;
  double t0 = 0.0;
};

struct NominalWeights {
  double smooth = 1.0;
  double obstacle = 1e4;
  double margin = 0.05;  // m
};

/// sum_t sum_spheres sum_points max(0, r + margin - |p - c|)^2, with the gradient
/// over every waypoint (dof x N).
CostValue obstacle_hinge_cost(const JointTrajectory& traj, const ChainSpec& chain,
                              const std::vector<Sphere>& obstacles, double margin);

/// Smoothness plus obstacle hinge, no human, fixed endpoints, from the
/// straight joint-space line.
OptResult nominal_trajectory(const NominalProblem& problem, const NominalWeights& weights,
                             const OptimizerOptions& opts);

struct SpeedAdjustParams {
  double d_stop = 0.06;        // m
  double d_slow = 0.20;        // m
  double control_rate = 100.0;  // Hz
  double timeout = 6.0;        // s of execution before giving up

  void validate() const;
};

/// Speed scale clamp((d - d_stop) / (d_slow - d_stop), 0, 1).
double speed_scale(double separation, const SpeedAdjustParams& p);

struct StopEvent {
  double time = 0.0;
  double duration = 0.0;
};

struct ExecutionTrace {
  std::vector<double> timestamps;
  std::vector<JointConfig> configs;
  std::vector<double> min_separation;
  std::vector<double> speed_scale;
  bool completed = false;
  std::vector<StopEvent> stop_events;

  double duration() const { return timestamps.empty() ? 0.0 : timestamps.back() - timestamps.front(); }
};

/// Minimum Euclidean distance between any human keypoint and any robot point.
double min_separation(const std::vector<Vec3>& robot_points,
                      const std::array<Vec3, kHumanJointCount>& human_pose);

/// Follows `nominal` exactly in joint space while scaling the progress rate by the
/// current separation to the ground-truth human. Starts at nominal.t0.
ExecutionTrace speed_adjusted_execute(const JointTrajectory& nominal, const ChainSpec& chain,
                                      const HumanTrajectory& human_truth,
                                      const SpeedAdjustParams& p);

/// CSV with columns time,q0..q{n-1},min_separation,speed_scale.
std::string trace_to_csv(const ExecutionTrace& trace);

/// Regularizers of the single-purpose baselines.
struct BaselineWeights {
  double legible_smooth = 1e-3;  // multiplies the legibility weight (1)
  double distvis_dist = 1.0;
  double distvis_vis = 1.0;
  double distvis_nominal = 1e-2;
};

/// Legibility with a small smoothness regularizer, from the nominal.
OptResult legible_optimize(const CostContext& ctx, const OptimizerOptions& opts,
                           const BaselineWeights& w = {});

/// Distance + visibility with identity covariances and a small nominal
/// regularizer, from the nominal.
OptResult distvis_optimize(const CostContext& ctx, const OptimizerOptions& opts,
                           const BaselineWeights& w = {});

}  // namespace comoto
