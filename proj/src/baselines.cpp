#include "comoto/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "comoto/errors.hpp"

namespace comoto {

CostValue obstacle_hinge_cost(const JointTrajectory& traj, const ChainSpec& chain,
                              const std::vector<Sphere>& obstacles, double margin) {
  CostValue out{0.0,
                Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(traj.dof()),
                                      static_cast<Eigen::Index>(traj.size())),
                {}};
  if (obstacles.empty()) return out;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const KinematicState state = forward(chain, traj.waypoints[t]);
    for (std::size_t j = 0; j < state.points.size(); ++j) {
      Vec3 grad_p = Vec3::Zero();
      for (const Sphere& s : obstacles) {
        const Vec3 diff = state.points[j] - s.center;
        const double dist = diff.norm();
        const double pen = s.radius + margin - dist;
        if (pen <= 0.0) continue;
        out.value += pen * pen;
        if (dist > 1e-12) grad_p -= 2.0 * pen * diff / dist;
      }
      if (j > 0) {
        out.gradient.col(static_cast<Eigen::Index>(t)) +=
            state.jacobian_transpose_times(j, grad_p);
      }
    }
  }
  return out;
}

OptResult nominal_trajectory(const NominalProblem& problem, const NominalWeights& weights,
                             const OptimizerOptions& opts) {
  problem.chain.validate();
  require(weights.smooth >= 0.0 && weights.obstacle >= 0.0 && weights.margin >= 0.0,
          "nominal weights must be non-negative");
  const JointTrajectory init = straightline_joint_init(problem.start, problem.goal,
                                                       problem.waypoints, problem.dt, problem.t0);
  auto f = [&](const JointTrajectory& traj) {
    const double smooth = cost_smoothness(traj);
    Eigen::MatrixXd grad =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(traj.dof()),
                              static_cast<Eigen::Index>(traj.size()));
    const double inv_dt2 = 1.0 / (traj.dt * traj.dt);
    for (std::size_t t = 0; t + 2 < traj.size(); ++t) {
      const Eigen::VectorXd acc =
          (traj.waypoints[t + 2] - 2.0 * traj.waypoints[t + 1] + traj.waypoints[t]) * inv_dt2;
      const Eigen::VectorXd g = 2.0 * inv_dt2 * acc;
      const auto c = static_cast<Eigen::Index>(t);
      grad.col(c) += weights.smooth * g;
      grad.col(c + 1) -= 2.0 * weights.smooth * g;
      grad.col(c + 2) += weights.smooth * g;
    }
    const CostValue obstacle =
        obstacle_hinge_cost(traj, problem.chain, problem.obstacles, weights.margin);
    grad += weights.obstacle * obstacle.gradient;

    CostReport r;
    r.per_cost["smoothness"] = smooth;
    r.per_cost["obstacle"] = obstacle.value;
    r.total = weights.smooth * smooth + weights.obstacle * obstacle.value;
    r.gradient = interior_gradient(grad);
    return r;
  };
  return minimize(f, init, problem.chain, opts);
}

void SpeedAdjustParams::validate() const {
  require(d_stop > 0.0 && d_stop < d_slow, "speed adjustment needs 0 < d_stop < d_slow");
  require(control_rate > 0.0, "control_rate must be positive");
  require(timeout > 0.0, "timeout must be positive");
}

double speed_scale(double separation, const SpeedAdjustParams& p) {
  return std::clamp((separation - p.d_stop) / (p.d_slow - p.d_stop), 0.0, 1.0);
}

double min_separation(const std::vector<Vec3>& robot_points,
                      const std::array<Vec3, kHumanJointCount>& human_pose) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& r : robot_points) {
    for (const Vec3& h : human_pose) best = std::min(best, (r - h).norm());
  }
  return best;
}

ExecutionTrace speed_adjusted_execute(const JointTrajectory& nominal, const ChainSpec& chain,
                                      const HumanTrajectory& human_truth,
                                      const SpeedAdjustParams& p) {
  p.validate();
  nominal.validate();
  human_truth.validate();
  require(human_truth.duration() + 1e-9 >= nominal.t0 + p.timeout,
          "human ground truth ends before the speed-adjustment timeout window");

  const double tick = 1.0 / p.control_rate;
  const double path_duration = nominal.duration();
  ExecutionTrace trace;
  double progressed = 0.0;  // s of nominal timing already executed
  for (std::size_t k = 0;; ++k) {
    const double t = nominal.t0 + static_cast<double>(k) * tick;
    const JointConfig q = nominal.at_parameter(progressed / nominal.dt);
    const double d = min_separation(fk_points(chain, q), human_truth.pose_at(t));
    const double s = speed_scale(d, p);
    trace.timestamps.push_back(t);
    trace.configs.push_back(q);
    trace.min_separation.push_back(d);
    trace.speed_scale.push_back(s);

    if (progressed >= path_duration) {
      trace.completed = true;
      break;
    }
    if (t - nominal.t0 >= p.timeout - 1e-12) break;

    progressed += s * tick;
    if (progressed >= path_duration - 1e-9) progressed = path_duration;
  }

  for (std::size_t k = 0; k < trace.speed_scale.size(); ++k) {
    if (trace.speed_scale[k] != 0.0) continue;
    std::size_t end = k;
    while (end < trace.speed_scale.size() && trace.speed_scale[end] == 0.0) ++end;
    const double until = end < trace.timestamps.size() ? trace.timestamps[end] : trace.timestamps.back();
    trace.stop_events.push_back({trace.timestamps[k], until - trace.timestamps[k]});
    k = end;
  }
  return trace;
}

std::string trace_to_csv(const ExecutionTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  const std::size_t dof = trace.configs.empty() ? 0 : static_cast<std::size_t>(trace.configs[0].size());
  out << "time";
  for (std::size_t j = 0; j < dof; ++j) out << ",q" << j;
  out << ",min_separation,speed_scale\n";
  for (std::size_t k = 0; k < trace.timestamps.size(); ++k) {
    out << trace.timestamps[k];
    for (std::size_t j = 0; j < dof; ++j) out << ',' << trace.configs[k][static_cast<Eigen::Index>(j)];
    out << ',' << trace.min_separation[k] << ',' << trace.speed_scale[k] << '\n';
  }
  return out.str();
}

OptResult legible_optimize(const CostContext& ctx, const OptimizerOptions& opts,
                           const BaselineWeights& w) {
  CostWeights weights;
  weights.legibility = 1.0;
  weights.smooth = w.legible_smooth * weights.legibility;
  return optimize(ctx, weights, ctx.nominal(), opts);
}

OptResult distvis_optimize(const CostContext& ctx, const OptimizerOptions& opts,
                           const BaselineWeights& w) {
  const CostContext deterministic = ctx.with_prediction(with_identity_covariance(ctx.prediction()));
  CostWeights weights;
  weights.dist = w.distvis_dist;
  weights.vis = w.distvis_vis;
  weights.nominal = w.distvis_nominal;
  return optimize(deterministic, weights, ctx.nominal(), opts);
}

}  // namespace comoto
