#include "comoto/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "comoto/errors.hpp"

namespace comoto {

void ChainSpec::validate() const {
  require(links.size() >= 2, "chain '" + name + "' needs at least 2 links");
  require(joint_limits.size() == links.size(),
          "chain '" + name + "': joint_limits count does not match link count");
  for (std::size_t i = 0; i < joint_limits.size(); ++i) {
    require(joint_limits[i].lo < joint_limits[i].hi,
            "chain '" + name + "': joint " + std::to_string(i) + " has lo >= hi");
  }
  const Mat3 r = base_pose.linear();
  require((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9,
          "chain '" + name + "': base_pose rotation is not orthonormal");
}

JointConfig ChainSpec::clamp(const JointConfig& q) const {
  JointConfig out = q;
  for (std::size_t i = 0; i < joint_limits.size() && i < static_cast<std::size_t>(q.size()); ++i) {
    out[i] = std::clamp(q[i], joint_limits[i].lo, joint_limits[i].hi);
  }
  return out;
}

bool ChainSpec::within_limits(const JointConfig& q) const {
  for (std::size_t i = 0; i < joint_limits.size(); ++i) {
    if (q[i] < joint_limits[i].lo || q[i] > joint_limits[i].hi) return false;
  }
  return true;
}

JointConfig ChainSpec::mid_config() const {
  JointConfig q(dof());
  for (std::size_t i = 0; i < dof(); ++i) q[i] = 0.5 * (joint_limits[i].lo + joint_limits[i].hi);
  return q;
}

ChainSpec planar_chain(const std::vector<double>& link_lengths) {
  ChainSpec chain;
  chain.name = "planar";
  for (double a : link_lengths) {
    chain.links.push_back({a, 0.0, 0.0, 0.0});
    chain.joint_limits.push_back({-std::numbers::pi, std::numbers::pi});
  }
  return chain;
}

ChainSpec default_chain() {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  constexpr double kDeg = std::numbers::pi / 180.0;
  ChainSpec chain;
  chain.name = "iiwa_r820_like";
  chain.links = {
      {0.0, -kHalfPi, 0.360, 0.0}, {0.0, kHalfPi, 0.0, 0.0},  {0.0, kHalfPi, 0.420, 0.0},
      {0.0, -kHalfPi, 0.0, 0.0},   {0.0, -kHalfPi, 0.400, 0.0}, {0.0, kHalfPi, 0.0, 0.0},
      {0.0, 0.0, 0.126, 0.0},
  };
  chain.joint_limits = {
      {-170 * kDeg, 170 * kDeg}, {-120 * kDeg, 120 * kDeg}, {-170 * kDeg, 170 * kDeg},
      {-120 * kDeg, 120 * kDeg}, {-170 * kDeg, 170 * kDeg}, {-120 * kDeg, 120 * kDeg},
      {-175 * kDeg, 175 * kDeg},
  };
  return chain;
}

void JointTrajectory::validate() const {
  require(waypoints.size() >= 3, "trajectory needs at least 3 waypoints");
  require(dt > 0.0 && std::isfinite(dt), "trajectory dt must be positive");
  const auto n = waypoints.front().size();
  for (const auto& w : waypoints) require(w.size() == n, "trajectory waypoints differ in dimension");
}

JointConfig JointTrajectory::at_parameter(double u) const {
  const double last = static_cast<double>(size() - 1);
  u = std::clamp(u, 0.0, last);
  const auto k = std::min(static_cast<std::size_t>(std::floor(u)), size() - 2);
  const double frac = u - static_cast<double>(k);
  if (frac == 0.0) return waypoints[k];
  if (frac == 1.0) return waypoints[k + 1];
  return (1.0 - frac) * waypoints[k] + frac * waypoints[k + 1];
}

bool JointTrajectory::operator==(const JointTrajectory& other) const {
  if (dt != other.dt || t0 != other.t0 || size() != other.size()) return false;
  for (std::size_t k = 0; k < size(); ++k) {
    if (waypoints[k].size() != other.waypoints[k].size()) return false;
    if (waypoints[k] != other.waypoints[k]) return false;
  }
  return true;
}

Eigen::Matrix3Xd KinematicState::jacobian(std::size_t index) const {
  require(index < points.size(), "jacobian point index out of range");
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < index; ++j) {
    jac.col(static_cast<Eigen::Index>(j)) = axes[j].cross(points[index] - points[j]);
  }
  return jac;
}

Eigen::VectorXd KinematicState::jacobian_transpose_times(std::size_t index, const Vec3& v) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < index; ++j) {
    // (z x r) . v == z . (r x v)
    out[static_cast<Eigen::Index>(j)] = axes[j].dot((points[index] - points[j]).cross(v));
  }
  return out;
}

KinematicState forward(const ChainSpec& chain, const JointConfig& q) {
  require(static_cast<std::size_t>(q.size()) == chain.dof(),
          "joint config has " + std::to_string(q.size()) + " entries, chain '" + chain.name +
              "' has " + std::to_string(chain.dof()) + " joints");
  KinematicState state;
  state.points.reserve(chain.dof() + 1);
  state.axes.reserve(chain.dof());

  Eigen::Isometry3d frame = chain.base_pose;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    state.points.push_back(frame.translation());
    state.axes.push_back(frame.linear().col(2));

    const DhRow& row = chain.links[i];
    const double theta = row.theta_offset + q[static_cast<Eigen::Index>(i)];
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
    Eigen::Matrix4d link;
    link << ct, -st * ca, st * sa, row.a * ct,
            st, ct * ca, -ct * sa, row.a * st,
            0.0, sa, ca, row.d,
            0.0, 0.0, 0.0, 1.0;
    frame = frame * Eigen::Isometry3d(link);
  }
  state.points.push_back(frame.translation());
  return state;
}

std::vector<Vec3> fk_points(const ChainSpec& chain, const JointConfig& q) {
  return forward(chain, q).points;
}

Vec3 fk_eef(const ChainSpec& chain, const JointConfig& q) {
  return forward(chain, q).points.back();
}

Eigen::Matrix3Xd position_jacobian(const ChainSpec& chain, const JointConfig& q,
                                   std::size_t point_index) {
  require(point_index <= chain.dof(), "point index " + std::to_string(point_index) +
                                          " invalid for chain with " +
                                          std::to_string(chain.point_count()) + " points");
  return forward(chain, q).jacobian(point_index);
}

JointConfig solve_position_ik(const ChainSpec& chain, const Vec3& target, const JointConfig& seed,
                              int max_iters, double tolerance) {
  JointConfig q = chain.clamp(seed);
  JointConfig best = q;
  double best_err = std::numeric_limits<double>::infinity();
  constexpr double kDamping = 0.05;
  for (int it = 0; it < max_iters; ++it) {
    const KinematicState state = forward(chain, q);
    const Vec3 err = target - state.points.back();
    const double norm = err.norm();
    if (norm < best_err) {
      best_err = norm;
      best = q;
    }
    if (norm < tolerance) break;
    const Eigen::Matrix3Xd jac = state.jacobian(chain.dof());
    const Mat3 jjt = jac * jac.transpose() + kDamping * kDamping * Mat3::Identity();
    Eigen::VectorXd dq = jac.transpose() * jjt.ldlt().solve(err);
    const double max_step = 0.2;
    if (dq.cwiseAbs().maxCoeff() > max_step) dq *= max_step / dq.cwiseAbs().maxCoeff();
    q = chain.clamp(q + dq);
  }
  return best;
}

}  // namespace comoto
